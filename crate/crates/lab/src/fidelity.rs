//! Topology fidelity experiment: how close each budget-saving schedule gets
//! to the full round-robin ranking, and to the latent ground truth, as a
//! function of judge noise. Every trial generates a fresh group, runs all
//! requested topologies on it with trial-derived seeds, and scores the
//! resulting orders; round-robin always runs as the reference channel.

use arena_core::judge::{NoiseModel, SimulatedJudge};
use arena_core::rng::derive_seed;
use arena_core::{comparison_budget, run_topology, Error, Result, Topology};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::generate::{generate_group, GroupSpec};
use crate::stats::{kendall_tau, mean, population_std};

/// Aggregated metrics for one topology.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologySummary {
    pub topology: Topology,
    pub mean_tau_truth: f64,
    pub std_tau_truth: f64,
    pub mean_tau_round_robin: f64,
    pub top1_accuracy: f64,
    pub mean_comparisons: f64,
}

/// Outcome of [`run_fidelity_experiment`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub trials: usize,
    pub noise: NoiseModel,
    pub topologies: Vec<TopologySummary>,
}

struct TrialRow {
    tau_truth: f64,
    tau_round_robin: f64,
    top1: bool,
    comparisons: usize,
}

/// Monte Carlo comparison of ranking topologies. An empty `topologies`
/// list runs all five. Deterministic in (`spec.seed`, `trials`), whatever
/// rayon does with the trial loop.
pub fn run_fidelity_experiment(
    spec: &GroupSpec,
    noise: &NoiseModel,
    trials: usize,
    topologies: &[Topology],
) -> Result<FidelityReport> {
    if trials == 0 {
        return Err(Error::Contract(
            "fidelity experiment needs at least 1 trial".to_string(),
        ));
    }
    spec.validate()?;
    noise.validate()?;
    let requested: Vec<Topology> = if topologies.is_empty() {
        Topology::ALL.to_vec()
    } else {
        topologies.to_vec()
    };
    for topology in &requested {
        comparison_budget(*topology, spec.n)?;
    }

    let trial_outcomes: Vec<Result<Vec<TrialRow>>> = (0..trials)
        .into_par_iter()
        .map(|trial| run_trial(spec, noise, trial, &requested))
        .collect();

    let mut per_topology: Vec<Vec<TrialRow>> = requested
        .iter()
        .map(|_| Vec::with_capacity(trials))
        .collect();
    // Sequential unpacking in trial order keeps aggregation deterministic.
    for outcome in trial_outcomes {
        for (bucket, row) in per_topology.iter_mut().zip(outcome?) {
            bucket.push(row);
        }
    }

    let topologies = requested
        .iter()
        .zip(&per_topology)
        .map(|(&topology, rows)| {
            let taus: Vec<f64> = rows.iter().map(|r| r.tau_truth).collect();
            let rr_taus: Vec<f64> = rows.iter().map(|r| r.tau_round_robin).collect();
            let hits = rows.iter().filter(|r| r.top1).count();
            let counts: Vec<f64> = rows.iter().map(|r| r.comparisons as f64).collect();
            TopologySummary {
                topology,
                mean_tau_truth: mean(&taus),
                std_tau_truth: population_std(&taus),
                mean_tau_round_robin: mean(&rr_taus),
                top1_accuracy: hits as f64 / rows.len() as f64,
                mean_comparisons: mean(&counts),
            }
        })
        .collect();
    Ok(FidelityReport {
        trials,
        noise: noise.clone(),
        topologies,
    })
}

fn run_trial(
    spec: &GroupSpec,
    noise: &NoiseModel,
    trial: usize,
    requested: &[Topology],
) -> Result<Vec<TrialRow>> {
    let trial_seed = derive_seed(spec.seed, &["fidelity", &trial.to_string()]);
    let group = generate_group(&GroupSpec {
        seed: trial_seed,
        ..spec.clone()
    })?;
    let judge = SimulatedJudge::new(derive_seed(trial_seed, &["judge"]), noise.clone());

    // Ground truth: descending latent utility, input index on exact ties.
    let mut truth: Vec<usize> = (0..group.trajectories.len()).collect();
    truth.sort_by(|&x, &y| {
        let ux = group.trajectories[x]
            .latent_utility
            .expect("generated latents");
        let uy = group.trajectories[y]
            .latent_utility
            .expect("generated latents");
        uy.total_cmp(&ux).then(x.cmp(&y))
    });
    let truth_order: Vec<&str> = truth
        .iter()
        .map(|&i| group.trajectories[i].id.as_str())
        .collect();

    let reference = run_topology(
        &group,
        &judge,
        Topology::RoundRobin,
        derive_seed(trial_seed, &["topology", Topology::RoundRobin.name()]),
        None,
    )?;
    let reference_order: Vec<String> = reference.order().iter().map(|id| id.to_string()).collect();

    let mut rows = Vec::with_capacity(requested.len());
    for &topology in requested {
        let result = if topology == Topology::RoundRobin {
            reference.clone()
        } else {
            run_topology(
                &group,
                &judge,
                topology,
                derive_seed(trial_seed, &["topology", topology.name()]),
                None,
            )?
        };
        let order: Vec<&str> = result.order();
        let rr_refs: Vec<&str> = reference_order.iter().map(String::as_str).collect();
        rows.push(TrialRow {
            tau_truth: kendall_tau(&order, &truth_order)?,
            tau_round_robin: kendall_tau(&order, &rr_refs)?,
            top1: order[0] == truth_order[0],
            comparisons: result.comparison_count,
        });
    }
    Ok(rows)
}
