//! Synthetic trajectory groups. Latent utilities are drawn from a normal
//! distribution and clipped to [0, 1]; `utility_spread` models how far the
//! policy's samples still differ from each other, so driving it toward zero
//! reproduces the converged-policy regime the collapse experiment probes.
//! The first trajectory serves as the anchor.

use arena_core::rng::derive_rng;
use arena_core::trajectory::{Rubric, Step, Trajectory, TrajectoryGroup};
use rand::RngExt;
use rand_distr::Normal;
use serde::{Deserialize, Serialize};

/// How the anchor trajectory's quality relates to the group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnchorPolicy {
    /// Anchor utility is pinned to `utility_mean`, modeling greedy decoding
    /// as a central draw from the policy.
    MeanUtility,
    /// Anchor is an ordinary sample.
    Sampled,
}

/// Recipe for one synthetic group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub n: usize,
    pub utility_mean: f64,
    pub utility_spread: f64,
    pub anchor_policy: AnchorPolicy,
    pub seed: u64,
}

impl GroupSpec {
    pub fn validate(&self) -> arena_core::Result<()> {
        if self.n < 2 {
            return Err(arena_core::Error::Contract(format!(
                "group spec needs n >= 2, got {}",
                self.n
            )));
        }
        if !(0.0..=1.0).contains(&self.utility_mean) {
            return Err(arena_core::Error::Contract(format!(
                "utility_mean must lie in [0, 1], got {}",
                self.utility_mean
            )));
        }
        if !(self.utility_spread >= 0.0) {
            return Err(arena_core::Error::Contract(format!(
                "utility_spread must be nonnegative, got {}",
                self.utility_spread
            )));
        }
        Ok(())
    }
}

/// Build the group described by `spec`. Deterministic in `spec.seed`.
pub fn generate_group(spec: &GroupSpec) -> arena_core::Result<TrajectoryGroup> {
    spec.validate()?;
    let mut utilities = vec![spec.utility_mean; spec.n];
    if spec.utility_spread > 0.0 {
        let mut rng = derive_rng(spec.seed, &["group", "utilities"]);
        let normal = Normal::new(spec.utility_mean, spec.utility_spread)
            .map_err(|e| arena_core::Error::Contract(format!("utility distribution: {e}")))?;
        for u in utilities.iter_mut() {
            *u = rng.sample(normal).clamp(0.0, 1.0);
        }
    }
    if spec.anchor_policy == AnchorPolicy::MeanUtility {
        utilities[0] = spec.utility_mean;
    }
    let trajectories = utilities
        .iter()
        .enumerate()
        .map(|(i, &u)| Trajectory {
            id: format!("t{i}"),
            query: format!("synthetic task {}", spec.seed),
            steps: vec![Step {
                thought: format!("candidate {i} reasoning"),
                tool_call: None,
                tool_response: None,
            }],
            answer: format!("candidate {i} answer"),
            latent_utility: Some(u),
            likelihood_ratio: None,
            kl_estimate: None,
        })
        .collect();
    Ok(TrajectoryGroup {
        group_id: format!("sim-{}", spec.seed),
        query: format!("synthetic task {}", spec.seed),
        trajectories,
        anchor_index: Some(0),
        rubric: Rubric {
            id: "sim".to_string(),
            text: "prefer higher quality work".to_string(),
        },
    })
}
