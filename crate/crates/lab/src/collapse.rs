//! Discriminative-collapse experiment: sweep the intra-group utility spread
//! toward zero under fixed judge noise and watch pointwise advantage signals
//! decay into noise while tournament-derived advantages stay informative.
//!
//! Each trial generates one synthetic group and pushes it through two
//! channels: a single round of pointwise scores normalized GRPO-style, and a
//! seeded single-elimination tournament converted to quantile advantages.
//! Both channels are correlated against the standardized latent utilities.

use arena_core::advantage::{grpo_pointwise_advantages, ranks_to_advantages, standardize};
use arena_core::judge::{Judge, NoiseModel, PointwiseSimulatedJudge, SimulatedJudge};
use arena_core::rng::derive_seed;
use arena_core::{run_topology, Error, Result, Topology, DEFAULT_EPSILON};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::generate::{generate_group, GroupSpec};
use crate::snr::{estimate_snr, DEFAULT_REPETITIONS};
use crate::stats::{mean, pearson};

/// Aggregated metrics at one utility spread level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollapseRow {
    pub utility_spread: f64,
    pub mean_snr: f64,
    pub pointwise_corr: f64,
    pub arena_corr: f64,
}

/// Outcome of [`run_collapse_experiment`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollapseReport {
    pub trials: usize,
    pub noise: NoiseModel,
    pub rows: Vec<CollapseRow>,
}

struct TrialRow {
    snr: f64,
    pointwise_corr: f64,
    arena_corr: f64,
}

/// Sweep `spreads` with `trials` Monte Carlo repetitions each. The spread in
/// `base` is ignored; everything else (group size, mean, anchor policy,
/// master seed) carries over. Deterministic in (`base.seed`, `spreads`,
/// `trials`), whatever rayon does with the trial loop.
pub fn run_collapse_experiment(
    base: &GroupSpec,
    spreads: &[f64],
    noise: &NoiseModel,
    trials: usize,
) -> Result<CollapseReport> {
    if trials == 0 {
        return Err(Error::Contract(
            "collapse experiment needs at least 1 trial".to_string(),
        ));
    }
    if spreads.is_empty() {
        return Err(Error::Contract(
            "collapse experiment needs at least one spread level".to_string(),
        ));
    }
    noise.validate()?;
    let mut rows = Vec::with_capacity(spreads.len());
    for (level, &spread) in spreads.iter().enumerate() {
        let spec = GroupSpec {
            utility_spread: spread,
            ..base.clone()
        };
        spec.validate()?;

        let outcomes: Vec<Result<TrialRow>> = (0..trials)
            .into_par_iter()
            .map(|trial| run_trial(&spec, noise, level, trial))
            .collect();
        // Sequential unpacking in trial order keeps aggregation deterministic.
        let mut collected = Vec::with_capacity(trials);
        for outcome in outcomes {
            collected.push(outcome?);
        }

        rows.push(CollapseRow {
            utility_spread: spread,
            mean_snr: mean(&collected.iter().map(|r| r.snr).collect::<Vec<_>>()),
            pointwise_corr: mean(
                &collected
                    .iter()
                    .map(|r| r.pointwise_corr)
                    .collect::<Vec<_>>(),
            ),
            arena_corr: mean(&collected.iter().map(|r| r.arena_corr).collect::<Vec<_>>()),
        });
    }
    Ok(CollapseReport {
        trials,
        noise: noise.clone(),
        rows,
    })
}

fn run_trial(spec: &GroupSpec, noise: &NoiseModel, level: usize, trial: usize) -> Result<TrialRow> {
    let trial_seed = derive_seed(
        spec.seed,
        &["collapse", &level.to_string(), &trial.to_string()],
    );
    let group = generate_group(&GroupSpec {
        seed: trial_seed,
        ..spec.clone()
    })?;
    let latents: Vec<f64> = group
        .trajectories
        .iter()
        .map(|t| t.latent_utility.expect("generated latents"))
        .collect();
    let truth = standardize(&latents, DEFAULT_EPSILON)?.advantages;

    let pointwise_judge =
        PointwiseSimulatedJudge::new(derive_seed(trial_seed, &["pointwise"]), noise.clone());
    let mut scores = Vec::with_capacity(group.trajectories.len());
    for trajectory in &group.trajectories {
        let call_key = format!("collapse/{}", trajectory.id);
        scores.push(pointwise_judge.pointwise_score(
            &group.query,
            trajectory,
            &group.rubric,
            &call_key,
        )?);
    }
    let pointwise = grpo_pointwise_advantages(&scores)?;

    let pair_judge = SimulatedJudge::new(derive_seed(trial_seed, &["judge"]), noise.clone());
    let result = run_topology(
        &group,
        &pair_judge,
        Topology::SeededSingleElim,
        derive_seed(trial_seed, &["topology"]),
        None,
    )?;
    let arena = ranks_to_advantages(&result, DEFAULT_EPSILON)?.advantages;

    let snr_judge = PointwiseSimulatedJudge::new(derive_seed(trial_seed, &["snr"]), noise.clone());
    let report = estimate_snr(&group, &snr_judge, DEFAULT_REPETITIONS)?;

    Ok(TrialRow {
        snr: report.snr,
        pointwise_corr: pearson(&pointwise, &truth)?,
        arena_corr: pearson(&arena, &truth)?,
    })
}
