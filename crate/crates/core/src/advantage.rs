//! Rank-to-advantage conversion and the clipped surrogate objective. Ranks
//! become evenly spaced quantile rewards on [0, 1] (rank 0 maps to 1, the
//! last rank to 0), rewards are standardized against the group's population
//! mean and standard deviation with a small stabilizer in the denominator,
//! and the loss calculator evaluates the clipped ratio-times-advantage
//! objective with an optional KL penalty on caller-supplied estimates. All
//! functions here are pure.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tournament::RankingResult;

/// Stabilizer added to the reward standard deviation before dividing.
pub const DEFAULT_EPSILON: f64 = 1e-6;
/// Clip half-width for the surrogate objective's ratio.
pub const DEFAULT_CLIP_EPSILON: f64 = 0.2;
/// KL penalty weight; zero disables the penalty.
pub const DEFAULT_BETA: f64 = 0.0;

/// Rewards and standardized advantages for one group, in input order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdvantageVector {
    pub rewards: Vec<f64>,
    pub advantages: Vec<f64>,
    pub mean_reward: f64,
    pub std_reward: f64,
    pub epsilon: f64,
}

/// Per-trajectory inputs to [`arena_loss`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossInputs {
    pub ratios: Vec<f64>,
    pub advantages: Vec<f64>,
    pub kl_estimates: Vec<f64>,
    pub clip_epsilon: f64,
    pub beta: f64,
}

impl LossInputs {
    /// Bundle the per-trajectory series with the default clip width and a
    /// disabled KL penalty.
    pub fn with_defaults(ratios: Vec<f64>, advantages: Vec<f64>, kl_estimates: Vec<f64>) -> Self {
        LossInputs {
            ratios,
            advantages,
            kl_estimates,
            clip_epsilon: DEFAULT_CLIP_EPSILON,
            beta: DEFAULT_BETA,
        }
    }
}

fn population_stats(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Map a full ranking to evenly spaced rewards: r_i = 1 - rank_i/(n-1).
pub fn quantile_rewards(ranks: &[usize], n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::Contract(format!(
            "quantile rewards need a group of at least 2, got {n}"
        )));
    }
    if ranks.len() != n {
        return Err(Error::Contract(format!(
            "expected {n} ranks, got {}",
            ranks.len()
        )));
    }
    let mut seen = vec![false; n];
    for &rank in ranks {
        if rank >= n || seen[rank] {
            return Err(Error::Contract(format!(
                "ranks must be a permutation of 0..{n}, offending value {rank}"
            )));
        }
        seen[rank] = true;
    }
    Ok(ranks
        .iter()
        .map(|&rank| 1.0 - rank as f64 / (n - 1) as f64)
        .collect())
}

/// Standardize rewards against the group's population statistics. A group
/// of identical rewards yields advantages that are all exactly zero.
pub fn standardize(rewards: &[f64], epsilon: f64) -> Result<AdvantageVector> {
    if rewards.len() < 2 {
        return Err(Error::Contract(format!(
            "standardization needs at least 2 rewards, got {}",
            rewards.len()
        )));
    }
    if !(epsilon > 0.0) {
        return Err(Error::Contract(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    if rewards.iter().all(|r| *r == rewards[0]) {
        return Ok(AdvantageVector {
            rewards: rewards.to_vec(),
            advantages: vec![0.0; rewards.len()],
            mean_reward: rewards[0],
            std_reward: 0.0,
            epsilon,
        });
    }
    let (mean, std) = population_stats(rewards);
    let advantages = rewards
        .iter()
        .map(|r| (r - mean) / (std + epsilon))
        .collect();
    Ok(AdvantageVector {
        rewards: rewards.to_vec(),
        advantages,
        mean_reward: mean,
        std_reward: std,
        epsilon,
    })
}

/// Quantile rewards plus standardization, emitted in the group's input
/// trajectory order.
pub fn ranks_to_advantages(result: &RankingResult, epsilon: f64) -> Result<AdvantageVector> {
    let ranks = result.ranks_in_input_order();
    let rewards = quantile_rewards(&ranks, ranks.len())?;
    standardize(&rewards, epsilon)
}

/// The pointwise baseline: z-score each score against the group. A constant
/// group has no signal and returns all zeros rather than dividing by a zero
/// deviation.
pub fn grpo_pointwise_advantages(scores: &[f64]) -> Result<Vec<f64>> {
    if scores.len() < 2 {
        return Err(Error::Contract(format!(
            "pointwise advantages need at least 2 scores, got {}",
            scores.len()
        )));
    }
    if scores.iter().all(|s| *s == scores[0]) {
        return Ok(vec![0.0; scores.len()]);
    }
    let (mean, std) = population_stats(scores);
    Ok(scores.iter().map(|s| (s - mean) / std).collect())
}

/// Mean over the group of the clipped surrogate term minus the weighted KL
/// estimate: (1/N) sum_i [min(rho_i A_i, clip(rho_i, 1-eps, 1+eps) A_i) - beta kl_i].
pub fn arena_loss(inputs: &LossInputs) -> Result<f64> {
    let n = inputs.ratios.len();
    if n == 0 {
        return Err(Error::Contract("loss inputs are empty".to_string()));
    }
    if inputs.advantages.len() != n || inputs.kl_estimates.len() != n {
        return Err(Error::Contract(format!(
            "loss input lengths disagree: {n} ratios, {} advantages, {} kl estimates",
            inputs.advantages.len(),
            inputs.kl_estimates.len()
        )));
    }
    if let Some(bad) = inputs.ratios.iter().find(|r| !(**r > 0.0)) {
        return Err(Error::Contract(format!(
            "ratios must be strictly positive, got {bad}"
        )));
    }
    if let Some(bad) = inputs.kl_estimates.iter().find(|k| !(**k >= 0.0)) {
        return Err(Error::Contract(format!(
            "kl estimates must be nonnegative, got {bad}"
        )));
    }
    if !(inputs.clip_epsilon > 0.0) {
        return Err(Error::Contract(format!(
            "clip epsilon must be positive, got {}",
            inputs.clip_epsilon
        )));
    }
    if !(inputs.beta >= 0.0) {
        return Err(Error::Contract(format!(
            "beta must be nonnegative, got {}",
            inputs.beta
        )));
    }
    let (lo, hi) = (1.0 - inputs.clip_epsilon, 1.0 + inputs.clip_epsilon);
    let total: f64 = (0..n)
        .map(|i| {
            let rho = inputs.ratios[i];
            let a = inputs.advantages[i];
            let term = (rho * a).min(rho.clamp(lo, hi) * a);
            term - inputs.beta * inputs.kl_estimates[i]
        })
        .sum();
    Ok(total / n as f64)
}
