//! Pairwise and pointwise judging of trajectories.
//!
//! A pairwise evaluation always runs two directional calls, one per
//! presentation order, and sums the two raw scores each side received.
//! A constant presentation-order bias therefore contributes equally to both
//! sides and cancels out of every score difference. Backends are
//! interchangeable behind the [`Judge`] trait: a noisy simulator for
//! laboratory work, a replay reader for reproducing logged runs, a remote
//! HTTP judge for production, and a pointwise simulator for baselines.

mod remote;
mod replay;
mod scripted;
mod simulated;

pub use remote::RemoteJudge;
pub use replay::ReplayJudge;
pub use scripted::ScriptedJudge;
pub use simulated::{PointwiseSimulatedJudge, SimulatedJudge};

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trajectory::{Rubric, Trajectory};

/// Combined outcome of one bidirectional pairwise evaluation.
///
/// `forward` holds the raw directional scores with `a` presented first, as
/// (first presented, second presented); `reverse` holds the same for the
/// swapped order. The combined scores satisfy
/// `score_a = forward.0 + reverse.1` and `score_b = forward.1 + reverse.0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScorePair {
    pub score_a: f64,
    pub score_b: f64,
    pub forward: (f64, f64),
    pub reverse: (f64, f64),
}

impl ScorePair {
    /// Assemble the pair from two directional outcomes.
    pub fn from_directions(forward: (f64, f64), reverse: (f64, f64)) -> Self {
        ScorePair {
            score_a: forward.0 + reverse.1,
            score_b: forward.1 + reverse.0,
            forward,
            reverse,
        }
    }

    /// The same evaluation seen from the other side's perspective.
    pub fn swapped(&self) -> ScorePair {
        ScorePair {
            score_a: self.score_b,
            score_b: self.score_a,
            forward: self.reverse,
            reverse: self.forward,
        }
    }
}

/// Noise applied by simulated judges on top of a trajectory's latent utility.
///
/// Each directional raw score is `score_scale * latent_utility`, plus
/// `position_bias` if the trajectory is presented first, plus a Gaussian
/// draw with standard deviation `gaussian_sigma`, optionally rounded to the
/// nearest multiple of `quantization`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseModel {
    pub gaussian_sigma: f64,
    pub position_bias: f64,
    pub quantization: Option<f64>,
    pub score_scale: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel {
            gaussian_sigma: 0.0,
            position_bias: 0.0,
            quantization: None,
            score_scale: 1.0,
        }
    }
}

impl NoiseModel {
    /// Noise-free scoring at unit scale.
    pub fn noiseless() -> Self {
        NoiseModel::default()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gaussian_sigma >= 0.0) {
            return Err(Error::Config(format!(
                "gaussian_sigma {} must be nonnegative",
                self.gaussian_sigma
            )));
        }
        if !self.position_bias.is_finite() {
            return Err(Error::Config("position_bias must be finite".to_string()));
        }
        if let Some(q) = self.quantization {
            if !(q > 0.0) {
                return Err(Error::Config(format!("quantization {q} must be positive")));
            }
        }
        if !(self.score_scale > 0.0) {
            return Err(Error::Config(format!(
                "score_scale {} must be positive",
                self.score_scale
            )));
        }
        Ok(())
    }
}

/// Which backend a [`JudgeSpec`] selects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JudgeKind {
    Simulated,
    PointwiseSimulated,
    Replay,
    Remote,
}

fn default_timeout_secs() -> f64 {
    120.0
}

fn default_max_attempts() -> u32 {
    3
}

fn default_concurrency() -> usize {
    8
}

/// Serializable description of a judge backend.
///
/// Only the fields relevant to `kind` are consulted; [`JudgeSpec::validate`]
/// checks that the required ones are present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JudgeSpec {
    pub kind: JudgeKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub noise: NoiseModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replay_log: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endpoint: Option<String>,
    #[serde(default = "default_timeout_secs")]
    pub timeout_secs: f64,
    #[serde(default = "default_max_attempts")]
    pub max_attempts: u32,
    #[serde(default = "default_concurrency")]
    pub concurrency: usize,
}

impl JudgeSpec {
    pub fn simulated(seed: u64, noise: NoiseModel) -> Self {
        JudgeSpec {
            kind: JudgeKind::Simulated,
            seed,
            noise,
            ..JudgeSpec::defaults()
        }
    }

    pub fn pointwise_simulated(seed: u64, noise: NoiseModel) -> Self {
        JudgeSpec {
            kind: JudgeKind::PointwiseSimulated,
            seed,
            noise,
            ..JudgeSpec::defaults()
        }
    }

    pub fn replay(log: impl Into<PathBuf>) -> Self {
        JudgeSpec {
            kind: JudgeKind::Replay,
            replay_log: Some(log.into()),
            ..JudgeSpec::defaults()
        }
    }

    pub fn remote(endpoint: impl Into<String>) -> Self {
        JudgeSpec {
            kind: JudgeKind::Remote,
            endpoint: Some(endpoint.into()),
            ..JudgeSpec::defaults()
        }
    }

    fn defaults() -> Self {
        JudgeSpec {
            kind: JudgeKind::Simulated,
            seed: 0,
            noise: NoiseModel::default(),
            replay_log: None,
            endpoint: None,
            timeout_secs: default_timeout_secs(),
            max_attempts: default_max_attempts(),
            concurrency: default_concurrency(),
        }
    }

    /// Check that the fields required by `kind` are present and sane.
    pub fn validate(&self) -> Result<()> {
        match self.kind {
            JudgeKind::Simulated | JudgeKind::PointwiseSimulated => self.noise.validate(),
            JudgeKind::Replay => {
                if self.replay_log.is_none() {
                    return Err(Error::Config(
                        "replay judge requires replay_log".to_string(),
                    ));
                }
                Ok(())
            }
            JudgeKind::Remote => {
                if self.endpoint.is_none() {
                    return Err(Error::Config("remote judge requires endpoint".to_string()));
                }
                if !(self.timeout_secs > 0.0) {
                    return Err(Error::Config(format!(
                        "timeout_secs {} must be positive",
                        self.timeout_secs
                    )));
                }
                if self.max_attempts == 0 {
                    return Err(Error::Config("max_attempts must be at least 1".to_string()));
                }
                if self.concurrency == 0 {
                    return Err(Error::Config("concurrency must be at least 1".to_string()));
                }
                Ok(())
            }
        }
    }
}

/// A trajectory comparator. Implementations must be deterministic functions
/// of their configuration and the supplied keys, so that identical calls
/// yield identical scores regardless of thread scheduling.
pub trait Judge: Send + Sync {
    /// Compare `a` against `b` with both presentation orders and return the
    /// combined scores. `match_key` identifies the comparison for logging,
    /// replay, and keyed noise.
    fn evaluate_pair(
        &self,
        query: &str,
        a: &Trajectory,
        b: &Trajectory,
        rubric: &Rubric,
        match_key: &str,
    ) -> Result<ScorePair>;

    /// Score a single trajectory in isolation. Only pointwise-capable
    /// backends support this; others return a configuration error.
    fn pointwise_score(
        &self,
        query: &str,
        trajectory: &Trajectory,
        rubric: &Rubric,
        call_key: &str,
    ) -> Result<f64>;
}

/// Construct the backend a spec describes.
pub fn build_judge(spec: &JudgeSpec) -> Result<Box<dyn Judge>> {
    spec.validate()?;
    match spec.kind {
        JudgeKind::Simulated => Ok(Box::new(SimulatedJudge::new(spec.seed, spec.noise.clone()))),
        JudgeKind::PointwiseSimulated => Ok(Box::new(PointwiseSimulatedJudge::new(
            spec.seed,
            spec.noise.clone(),
        ))),
        JudgeKind::Replay => {
            let path = spec.replay_log.as_ref().expect("validated above");
            Ok(Box::new(ReplayJudge::from_jsonl(path)?))
        }
        JudgeKind::Remote => {
            let endpoint = spec.endpoint.clone().expect("validated above");
            Ok(Box::new(RemoteJudge::new(
                endpoint,
                std::time::Duration::from_secs_f64(spec.timeout_secs),
                spec.max_attempts,
                spec.concurrency,
            )?))
        }
    }
}
