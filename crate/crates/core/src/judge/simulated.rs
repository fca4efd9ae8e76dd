//! Simulated judges that score from ground-truth latent utility plus keyed
//! noise. Noise for a directional call is a pure function of the judge seed,
//! the match or call key, and the trajectory ids involved, so evaluations can
//! run in any order on any number of threads without changing results.

use rand::RngExt;
use rand_distr::Normal;

use crate::error::{Error, Result};
use crate::rng::derive_rng;
use crate::trajectory::{Rubric, Trajectory};

use super::{Judge, NoiseModel, ScorePair};

fn latent_utility(t: &Trajectory) -> Result<f64> {
    t.latent_utility.ok_or_else(|| {
        Error::Config(format!(
            "trajectory '{}' has no latent_utility, which simulated judges require",
            t.id
        ))
    })
}

fn quantize(score: f64, quantization: Option<f64>) -> f64 {
    match quantization {
        Some(q) => (score / q).round() * q,
        None => score,
    }
}

/// Score the two sides of one directional presentation, first then second.
fn directional_scores(
    seed: u64,
    noise: &NoiseModel,
    first: &Trajectory,
    second: &Trajectory,
    key_kind: &str,
    key: &str,
) -> Result<(f64, f64)> {
    let mut rng = derive_rng(seed, &[key_kind, key, &first.id, &second.id]);
    let gaussian = if noise.gaussian_sigma > 0.0 {
        Some(Normal::new(0.0, noise.gaussian_sigma).expect("validated sigma"))
    } else {
        None
    };
    let mut score_one = |t: &Trajectory, is_first: bool| -> Result<f64> {
        let mut s = noise.score_scale * latent_utility(t)?;
        if is_first {
            s += noise.position_bias;
        }
        if let Some(normal) = &gaussian {
            s += rng.sample(normal);
        }
        Ok(quantize(s, noise.quantization))
    };
    let first_score = score_one(first, true)?;
    let second_score = score_one(second, false)?;
    Ok((first_score, second_score))
}

/// Pairwise simulator: bidirectional comparisons over latent utility.
#[derive(Debug, Clone)]
pub struct SimulatedJudge {
    seed: u64,
    noise: NoiseModel,
}

impl SimulatedJudge {
    pub fn new(seed: u64, noise: NoiseModel) -> Self {
        SimulatedJudge { seed, noise }
    }
}

impl Judge for SimulatedJudge {
    fn evaluate_pair(
        &self,
        _query: &str,
        a: &Trajectory,
        b: &Trajectory,
        _rubric: &Rubric,
        match_key: &str,
    ) -> Result<ScorePair> {
        if a.id == b.id {
            return Err(Error::Contract(format!(
                "evaluate_pair needs two distinct trajectories, got '{}' twice",
                a.id
            )));
        }
        let forward = directional_scores(self.seed, &self.noise, a, b, "pair", match_key)?;
        let reverse = directional_scores(self.seed, &self.noise, b, a, "pair", match_key)?;
        Ok(ScorePair::from_directions(forward, reverse))
    }

    fn pointwise_score(
        &self,
        _query: &str,
        _trajectory: &Trajectory,
        _rubric: &Rubric,
        _call_key: &str,
    ) -> Result<f64> {
        Err(Error::Config(
            "simulated judge serves pairwise comparisons only; use kind pointwise-simulated"
                .to_string(),
        ))
    }
}

/// Pointwise simulator: scores one trajectory at a time, for baselines that
/// skip pairwise comparison entirely.
#[derive(Debug, Clone)]
pub struct PointwiseSimulatedJudge {
    seed: u64,
    noise: NoiseModel,
}

impl PointwiseSimulatedJudge {
    pub fn new(seed: u64, noise: NoiseModel) -> Self {
        PointwiseSimulatedJudge { seed, noise }
    }
}

impl Judge for PointwiseSimulatedJudge {
    fn evaluate_pair(
        &self,
        _query: &str,
        _a: &Trajectory,
        _b: &Trajectory,
        _rubric: &Rubric,
        _match_key: &str,
    ) -> Result<ScorePair> {
        Err(Error::Config(
            "pointwise-simulated judge scores single trajectories only; use kind simulated"
                .to_string(),
        ))
    }

    fn pointwise_score(
        &self,
        _query: &str,
        trajectory: &Trajectory,
        _rubric: &Rubric,
        call_key: &str,
    ) -> Result<f64> {
        let mut rng = derive_rng(self.seed, &["point", call_key, &trajectory.id]);
        let mut s = self.noise.score_scale * latent_utility(trajectory)?;
        if self.noise.gaussian_sigma > 0.0 {
            let normal = Normal::new(0.0, self.noise.gaussian_sigma).expect("validated sigma");
            s += rng.sample(normal);
        }
        Ok(quantize(s, self.noise.quantization))
    }
}
