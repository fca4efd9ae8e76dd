//! Signal-to-noise estimation for pointwise scoring. Each trajectory is
//! scored repeatedly under distinct call keys; the spread of per-trajectory
//! mean scores is the group signal, and the average within-trajectory
//! spread across repetitions is the evaluation noise. When samples within a
//! group grow alike while the judge stays noisy, the ratio collapses toward
//! zero and pointwise advantages stop carrying information.

use arena_core::judge::Judge;
use arena_core::trajectory::TrajectoryGroup;
use arena_core::{Error, Result};
use serde::{Deserialize, Serialize};

use crate::stats::{mean, population_std};

/// Default repetition count for SNR estimation.
pub const DEFAULT_REPETITIONS: usize = 16;

const SIGMA_FLOOR: f64 = 1e-12;

/// Estimated signal and noise for one group under one judge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnrReport {
    pub sigma_group: f64,
    pub sigma_noise: f64,
    pub snr: f64,
    pub repetitions: usize,
}

/// Score every trajectory `repetitions` times and compare the spread of
/// per-trajectory means against the mean within-trajectory spread.
pub fn estimate_snr(
    group: &TrajectoryGroup,
    judge: &dyn Judge,
    repetitions: usize,
) -> Result<SnrReport> {
    if repetitions < 2 {
        return Err(Error::Contract(format!(
            "snr estimation needs at least 2 repetitions, got {repetitions}"
        )));
    }
    if group.trajectories.len() < 2 {
        return Err(Error::Contract(format!(
            "snr estimation needs at least 2 trajectories, got {}",
            group.trajectories.len()
        )));
    }
    let mut per_trajectory_mean = Vec::with_capacity(group.trajectories.len());
    let mut per_trajectory_std = Vec::with_capacity(group.trajectories.len());
    for trajectory in &group.trajectories {
        let scores: Vec<f64> = (0..repetitions)
            .map(|rep| {
                let call_key = format!("snr/{rep}/{}", trajectory.id);
                judge.pointwise_score(&group.query, trajectory, &group.rubric, &call_key)
            })
            .collect::<Result<_>>()?;
        per_trajectory_mean.push(mean(&scores));
        per_trajectory_std.push(population_std(&scores));
    }
    let sigma_group = population_std(&per_trajectory_mean);
    let sigma_noise = mean(&per_trajectory_std);
    Ok(SnrReport {
        sigma_group,
        sigma_noise,
        snr: sigma_group / sigma_noise.max(SIGMA_FLOOR),
        repetitions,
    })
}

#[cfg(test)]
mod tests {
    use arena_core::judge::{NoiseModel, PointwiseSimulatedJudge};

    use crate::generate::{generate_group, AnchorPolicy, GroupSpec};

    use super::*;

    fn spec(spread: f64, seed: u64) -> GroupSpec {
        GroupSpec {
            n: 8,
            utility_mean: 0.5,
            utility_spread: spread,
            anchor_policy: AnchorPolicy::Sampled,
            seed,
        }
    }

    fn judge(sigma: f64) -> PointwiseSimulatedJudge {
        PointwiseSimulatedJudge::new(
            7,
            NoiseModel {
                gaussian_sigma: sigma,
                ..NoiseModel::noiseless()
            },
        )
    }

    #[test]
    fn noiseless_scores_have_no_noise_component() {
        let group = generate_group(&spec(0.1, 5)).unwrap();
        let report = estimate_snr(&group, &judge(0.0), 8).unwrap();
        // Averaging k identical scores is not exact in binary, so the
        // deviations land at the last-ulp scale rather than at zero.
        assert!(
            report.sigma_noise < 1e-12,
            "sigma_noise {}",
            report.sigma_noise
        );
        assert!(report.sigma_group > 0.0);
        // The floor guard keeps the ratio finite and large.
        assert!(report.snr > 1e6);
    }

    #[test]
    fn identical_latents_leave_only_noise() {
        let group = generate_group(&spec(0.0, 5)).unwrap();
        let report = estimate_snr(&group, &judge(0.05), 400).unwrap();
        assert!(
            report.sigma_noise > 0.04 && report.sigma_noise < 0.06,
            "sigma_noise {}",
            report.sigma_noise
        );
        // sigma_group is the std of per-trajectory means of 400 draws: about
        // 0.05/20, far below the noise floor of the judge.
        assert!(report.snr < 0.2, "snr {}", report.snr);
    }

    #[test]
    fn comparable_spread_and_noise_sit_near_unit_snr() {
        let mut snrs = Vec::new();
        let mut noise_estimates = Vec::new();
        for seed in 0..40 {
            let group = generate_group(&spec(0.05, seed)).unwrap();
            let report = estimate_snr(&group, &judge(0.05), 100).unwrap();
            snrs.push(report.snr);
            noise_estimates.push(report.sigma_noise);
        }
        let mean_snr = mean(&snrs);
        let mean_noise = mean(&noise_estimates);
        assert!(
            (mean_noise - 0.05).abs() < 0.01,
            "noise estimate {mean_noise}"
        );
        assert!(
            mean_snr > 0.7 && mean_snr < 1.4,
            "mean snr {mean_snr} outside the comparable regime"
        );
    }

    #[test]
    fn reordering_the_group_does_not_move_the_estimate() {
        let group = generate_group(&spec(0.08, 9)).unwrap();
        let mut reordered = group.clone();
        reordered.trajectories.reverse();
        let a = estimate_snr(&group, &judge(0.05), 32).unwrap();
        let b = estimate_snr(&reordered, &judge(0.05), 32).unwrap();
        // Scores are keyed by trajectory id, so only float summation order
        // can differ between the two runs.
        approx::assert_abs_diff_eq!(a.sigma_group, b.sigma_group, epsilon = 1e-12);
        approx::assert_abs_diff_eq!(a.sigma_noise, b.sigma_noise, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_repetitions_are_rejected() {
        let group = generate_group(&spec(0.1, 5)).unwrap();
        assert!(estimate_snr(&group, &judge(0.05), 1).is_err());
    }
}
