//! Acceptance sweep for the whole stack. Each check prints exactly one
//! PASS or FAIL line so a green run is as legible as a red one, and the
//! process exits nonzero if any check fails. Checks cover comparison
//! budgets, perfect-comparator recovery, bracket structure, the two
//! desk-scale statistical claims, the advantage calculators, position-bias
//! cancellation, determinism with replay, and the HTTP service contract.
//!
//! Runs as a plain binary (no libtest harness): bare command-line arguments
//! select checks by substring, flags are ignored.

mod common;

use std::io::Write as _;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use arena_core::advantage::{
    arena_loss, grpo_pointwise_advantages, quantile_rewards, standardize, LossInputs,
    DEFAULT_EPSILON,
};
use arena_core::judge::{Judge as _, NoiseModel, ReplayJudge, SimulatedJudge};
use arena_core::rng::{derive_rng, derive_seed};
use arena_core::tournament::bracket_positions;
use arena_core::{comparison_budget, run_topology, Phase, Topology};
use arena_lab::{run_collapse_experiment, run_fidelity_experiment, AnchorPolicy, GroupSpec};
use rand::RngExt;

fn main() {
    let filters: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let checks: &[(&str, fn())] = &[
        (
            "comparison budgets are exact and refusals agree",
            budgets_are_exact,
        ),
        (
            "noiseless judges recover the latent order",
            noiseless_recovery,
        ),
        (
            "the eight-entrant bracket follows the hand trace",
            bracket_hand_trace,
        ),
        (
            "single elimination tracks round-robin fidelity at half the cost",
            fidelity_claim,
        ),
        (
            "tournament advantages survive discriminative collapse",
            collapse_claim,
        ),
        (
            "advantage calculators match brute-force oracles",
            calculator_oracles,
        ),
        (
            "bidirectional scoring cancels position bias",
            bias_cancellation,
        ),
        (
            "seeded runs repeat and replay byte for byte",
            determinism_and_replay,
        ),
        ("the reward service round-trips a group", service_round_trip),
    ];

    let mut failed = Vec::new();
    let mut ran = 0usize;
    for (name, body) in checks {
        if !filters.is_empty() && !filters.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        ran += 1;
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(body));
        let elapsed = started.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("acceptance: {name} ... PASS ({elapsed:.2}s)"),
            Err(_) => {
                println!("acceptance: {name} ... FAIL ({elapsed:.2}s)");
                failed.push(*name);
            }
        }
        std::io::stdout().flush().expect("stdout");
    }
    println!("acceptance: {} of {ran} checks passed", ran - failed.len());
    if !failed.is_empty() {
        std::process::exit(1);
    }
}

fn noiseless() -> SimulatedJudge {
    SimulatedJudge::new(0, NoiseModel::noiseless())
}

/// Latent utilities of a generated group, in input order.
fn latents_of(group: &arena_core::TrajectoryGroup) -> Vec<f64> {
    group
        .trajectories
        .iter()
        .map(|t| t.latent_utility.expect("generated latents"))
        .collect()
}

/// Ranks implied by latent utility, 0 best, input order.
fn latent_ranks(latents: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..latents.len()).collect();
    order.sort_by(|&x, &y| latents[y].total_cmp(&latents[x]).then(x.cmp(&y)));
    let mut ranks = vec![0usize; latents.len()];
    for (rank, &index) in order.iter().enumerate() {
        ranks[index] = rank;
    }
    ranks
}

fn budgets_are_exact() {
    // Hand-computed budget tables per group size.
    let per_size: &[(usize, &[(Topology, Option<usize>)])] = &[
        (
            2,
            &[
                (Topology::RoundRobin, Some(1)),
                (Topology::Anchor, Some(1)),
                (Topology::SeededSingleElim, Some(2)),
                (Topology::DoubleElim, None),
                (Topology::Swiss, Some(1)),
            ],
        ),
        (
            4,
            &[
                (Topology::RoundRobin, Some(6)),
                (Topology::Anchor, Some(3)),
                (Topology::SeededSingleElim, Some(6)),
                (Topology::DoubleElim, Some(6)),
                (Topology::Swiss, Some(4)),
            ],
        ),
        (
            8,
            &[
                (Topology::RoundRobin, Some(28)),
                (Topology::Anchor, Some(7)),
                (Topology::SeededSingleElim, Some(14)),
                (Topology::DoubleElim, Some(14)),
                (Topology::Swiss, Some(12)),
            ],
        ),
        (
            16,
            &[
                (Topology::RoundRobin, Some(120)),
                (Topology::Anchor, Some(15)),
                (Topology::SeededSingleElim, Some(30)),
                (Topology::DoubleElim, Some(30)),
                (Topology::Swiss, Some(32)),
            ],
        ),
    ];
    let judge = noiseless();
    for &(n, table) in per_size {
        let utilities: Vec<f64> = (0..n).map(|i| 0.9 - 0.8 * i as f64 / n as f64).collect();
        let group = common::group_with_utilities("budget", &utilities, Some(0));
        for &(topology, expected) in table {
            let budget = comparison_budget(topology, n);
            let run = run_topology(&group, &judge, topology, 0, None);
            match expected {
                Some(count) => {
                    assert_eq!(budget.unwrap(), count, "{topology} budget at n={n}");
                    let result = run.unwrap();
                    assert_eq!(result.comparison_count, count, "{topology} count at n={n}");
                    assert_eq!(result.matches.len(), count, "{topology} matches at n={n}");
                }
                None => {
                    // Budget refusal and run refusal must agree.
                    assert!(budget.is_err(), "{topology} budget should refuse n={n}");
                    assert!(run.is_err(), "{topology} run should refuse n={n}");
                }
            }
        }
    }
    // Odd fields: the Swiss refusal is also two-sided.
    let odd = common::group_with_utilities("odd", &[0.8, 0.5, 0.2, 0.6, 0.4], Some(0));
    assert!(comparison_budget(Topology::Swiss, 5).is_err());
    assert!(run_topology(&odd, &judge, Topology::Swiss, 0, None).is_err());
}

fn noiseless_recovery() {
    let judge = noiseless();
    // Tally violations per (topology, field size) instead of stopping on
    // the first, so the failure message shows the complete picture.
    let mut violations: Vec<String> = Vec::new();
    for n in [4usize, 8, 16] {
        let mut misses: std::collections::BTreeMap<String, u32> = std::collections::BTreeMap::new();
        for trial in 0..500u32 {
            let spec = GroupSpec {
                n,
                utility_mean: 0.5,
                utility_spread: 0.05,
                anchor_policy: AnchorPolicy::MeanUtility,
                seed: derive_seed(40_000, &["recovery", &n.to_string(), &trial.to_string()]),
            };
            let group = arena_lab::generate_group(&spec).unwrap();
            let latents = latents_of(&group);
            for pair in 0..latents.len() {
                for other in pair + 1..latents.len() {
                    assert_ne!(
                        latents[pair], latents[other],
                        "degenerate draw at n={n} trial={trial}"
                    );
                }
            }
            let truth = latent_ranks(&latents);
            let best = truth.iter().position(|&r| r == 0).unwrap();

            // Exhaustive and seeded-bracket schedules recover the whole
            // permutation; the elimination schedules must still find the top.
            for topology in [Topology::RoundRobin, Topology::SeededSingleElim] {
                let result = run_topology(&group, &judge, topology, 0, None).unwrap();
                if result.ranks_in_input_order() != truth {
                    *misses.entry(topology.to_string()).or_default() += 1;
                }
            }
            for topology in [Topology::DoubleElim, Topology::Swiss] {
                let result = run_topology(&group, &judge, topology, 0, None).unwrap();
                let found = result
                    .ranks_in_input_order()
                    .iter()
                    .position(|&r| r == 0)
                    .unwrap();
                if found != best {
                    *misses.entry(topology.to_string()).or_default() += 1;
                }
            }
        }
        for (topology, count) in misses {
            violations.push(format!("{topology} missed {count} of 500 trials at n={n}"));
        }
    }
    assert!(
        violations.is_empty(),
        "noiseless recovery violations: {}",
        violations.join("; ")
    );
}

fn bracket_hand_trace() {
    // Slot layout for eight seeds, 1-based.
    let slots: Vec<usize> = bracket_positions(8).into_iter().flatten().collect();
    assert_eq!(slots, vec![1, 8, 3, 6, 4, 5, 2, 7]);

    // Seeds 1 and 2 sit in opposite halves and first share a subtree at the
    // root, which is the final.
    let position = |seed: usize| slots.iter().position(|&s| s == seed).unwrap();
    let (mut a, mut b) = (position(1), position(2));
    assert_ne!(a < 4, b < 4, "top seeds must start in opposite halves");
    let mut meet_round = 0;
    while a != b {
        a /= 2;
        b /= 2;
        meet_round += 1;
    }
    assert_eq!(meet_round, 3, "top seeds meet at the third (last) round");

    // A live noiseless run over descending utilities plays that layout.
    let utilities = [0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2];
    let group = common::group_with_utilities("trace", &utilities, Some(0));
    let result = run_topology(&group, &noiseless(), Topology::SeededSingleElim, 0, None).unwrap();
    let bracket: Vec<_> = result
        .matches
        .iter()
        .filter(|m| m.phase == Phase::WinnersBracket)
        .collect();
    assert_eq!(bracket.len(), 7);
    let pairs: Vec<(&str, &str)> = bracket
        .iter()
        .filter(|m| m.round == 0)
        .map(|m| (m.participant_a.as_str(), m.participant_b.as_str()))
        .collect();
    assert_eq!(
        pairs,
        vec![("t0", "t7"), ("t2", "t5"), ("t3", "t4"), ("t1", "t6")]
    );
    let final_match = bracket.last().unwrap();
    assert_eq!(final_match.round, 2);
    let finalists = [
        final_match.participant_a.as_str(),
        final_match.participant_b.as_str(),
    ];
    assert!(finalists.contains(&"t0") && finalists.contains(&"t1"));
    for m in &bracket[..bracket.len() - 1] {
        let both = [m.participant_a.as_str(), m.participant_b.as_str()];
        assert!(
            !(both.contains(&"t0") && both.contains(&"t1")),
            "top seeds met before the final in {}",
            m.match_key
        );
    }
}

fn fidelity_claim() {
    let spec = GroupSpec {
        n: 8,
        utility_mean: 0.5,
        utility_spread: 0.05,
        anchor_policy: AnchorPolicy::MeanUtility,
        seed: 3003,
    };
    let noise = NoiseModel {
        gaussian_sigma: 0.05,
        ..NoiseModel::noiseless()
    };
    let report = run_fidelity_experiment(
        &spec,
        &noise,
        1000,
        &[Topology::SeededSingleElim, Topology::RoundRobin],
    )
    .unwrap();
    let row = |t: Topology| report.topologies.iter().find(|r| r.topology == t).unwrap();
    let bracket = row(Topology::SeededSingleElim);
    let exhaustive = row(Topology::RoundRobin);
    let gap = (bracket.mean_tau_truth - exhaustive.mean_tau_truth).abs();
    assert!(
        gap <= 0.05,
        "tau gap {gap:.4} (bracket {:.4} vs round-robin {:.4})",
        bracket.mean_tau_truth,
        exhaustive.mean_tau_truth
    );
    assert_eq!(bracket.mean_comparisons, 14.0);
    assert_eq!(exhaustive.mean_comparisons, 28.0);
}

fn collapse_claim() {
    let base = GroupSpec {
        n: 8,
        utility_mean: 0.5,
        utility_spread: 0.0,
        anchor_policy: AnchorPolicy::MeanUtility,
        seed: 2002,
    };
    let noise = NoiseModel {
        gaussian_sigma: 0.05,
        ..NoiseModel::noiseless()
    };
    let report = run_collapse_experiment(&base, &[0.2, 0.1, 0.05, 0.02], &noise, 2000).unwrap();
    // Where the group's spread has fallen to the judge's noise floor or
    // below, tournament advantages must beat pointwise advantages clearly.
    let mut qualifying = 0;
    for row in &report.rows {
        if row.utility_spread <= noise.gaussian_sigma {
            qualifying += 1;
            let margin = row.arena_corr - row.pointwise_corr;
            assert!(
                margin >= 0.1,
                "margin {margin:.4} at spread {} (arena {:.4}, pointwise {:.4})",
                row.utility_spread,
                row.arena_corr,
                row.pointwise_corr
            );
        }
    }
    assert_eq!(
        qualifying, 2,
        "expected two spread levels at or below sigma"
    );
}

fn calculator_oracles() {
    // Quantile rewards against integer arithmetic, across 20 sizes.
    let mut rng = derive_rng(71, &["oracle", "quantile"]);
    for n in 2usize..=21 {
        let ranks = random_permutation(&mut rng, n);
        let rewards = quantile_rewards(&ranks, n).unwrap();
        for (i, &rank) in ranks.iter().enumerate() {
            let oracle = (n - 1 - rank) as f64 / (n - 1) as f64;
            assert!(
                (rewards[i] - oracle).abs() <= 1e-9,
                "quantile n={n} i={i}: {} vs {oracle}",
                rewards[i]
            );
        }
    }

    // Standardization against a two-pass oracle with the epsilon floor.
    let mut rng = derive_rng(72, &["oracle", "standardize"]);
    for case in 0..20usize {
        let len = 3 + case;
        let rewards: Vec<f64> = (0..len).map(|_| rng.random::<f64>()).collect();
        let vector = standardize(&rewards, DEFAULT_EPSILON).unwrap();
        let mean: f64 = rewards.iter().sum::<f64>() / len as f64;
        let variance: f64 = rewards.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / len as f64;
        let sigma = variance.sqrt();
        for (i, &r) in rewards.iter().enumerate() {
            let oracle = (r - mean) / (sigma + DEFAULT_EPSILON);
            assert!(
                (vector.advantages[i] - oracle).abs() <= 1e-6,
                "standardize case={case} i={i}"
            );
        }
    }
    // A constant group is exactly zero, not merely small.
    let flat = standardize(&[0.4, 0.4, 0.4], DEFAULT_EPSILON).unwrap();
    assert_eq!(flat.advantages, vec![0.0, 0.0, 0.0]);

    // Pointwise z-scores against the same oracle without the floor.
    let mut rng = derive_rng(73, &["oracle", "pointwise"]);
    for case in 0..20usize {
        let len = 2 + case;
        let scores: Vec<f64> = (0..len).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let advantages = grpo_pointwise_advantages(&scores).unwrap();
        let mean: f64 = scores.iter().sum::<f64>() / len as f64;
        let variance: f64 = scores.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / len as f64;
        let sigma = variance.sqrt();
        for (i, &s) in scores.iter().enumerate() {
            let oracle = (s - mean) / sigma;
            assert!(
                (advantages[i] - oracle).abs() <= 1e-9,
                "pointwise case={case} i={i}"
            );
        }
    }

    // The surrogate objective against an element-by-element loop.
    let mut rng = derive_rng(74, &["oracle", "loss"]);
    for case in 0..20usize {
        let len = 1 + case;
        let ratios: Vec<f64> = (0..len)
            .map(|_| (rng.random::<f64>() - 0.5).exp())
            .collect();
        let advantages: Vec<f64> = (0..len).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect();
        let kls: Vec<f64> = (0..len).map(|_| rng.random::<f64>() * 0.1).collect();
        let beta = if case % 2 == 0 { 0.0 } else { 0.05 };
        let inputs = LossInputs {
            ratios: ratios.clone(),
            advantages: advantages.clone(),
            kl_estimates: kls.clone(),
            clip_epsilon: 0.2,
            beta,
        };
        let loss = arena_loss(&inputs).unwrap();
        let mut total = 0.0;
        for i in 0..len {
            let clipped = ratios[i].clamp(0.8, 1.2) * advantages[i];
            let raw = ratios[i] * advantages[i];
            total += raw.min(clipped) - beta * kls[i];
        }
        let oracle = total / len as f64;
        assert!(
            (loss - oracle).abs() <= 1e-9,
            "loss case={case}: {loss} vs {oracle}"
        );
    }
}

fn random_permutation<R: RngExt>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut permutation: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        permutation.swap(i, j);
    }
    permutation
}

fn bias_cancellation() {
    let noise = NoiseModel {
        position_bias: 0.4,
        ..NoiseModel::noiseless()
    };
    let judge = SimulatedJudge::new(17, noise);
    let mut rng = derive_rng(90_210, &["bias"]);
    for case in 0..1000u32 {
        let ua = rng.random::<f64>();
        let ub = rng.random::<f64>();
        if ua == ub {
            continue;
        }
        let group = common::group_with_utilities("bias", &[ua, ub], None);
        let pair = judge
            .evaluate_pair(
                &group.query,
                &group.trajectories[0],
                &group.trajectories[1],
                &group.rubric,
                &format!("bias/{case}"),
            )
            .unwrap();
        assert_eq!(
            pair.score_a > pair.score_b,
            ua > ub,
            "case {case}: bias flipped the ordering ({ua} vs {ub})"
        );
        // The bias term lands on both combined scores equally.
        let gap = pair.score_a - pair.score_b - 2.0 * (ua - ub);
        assert!(gap.abs() < 1e-12, "case {case}: residual bias {gap}");
    }
}

fn determinism_and_replay() {
    let spec = GroupSpec {
        n: 8,
        utility_mean: 0.5,
        utility_spread: 0.1,
        anchor_policy: AnchorPolicy::MeanUtility,
        seed: 606,
    };
    let group = arena_lab::generate_group(&spec).unwrap();
    let noise = NoiseModel {
        gaussian_sigma: 0.1,
        position_bias: 0.2,
        ..NoiseModel::noiseless()
    };
    let judge = SimulatedJudge::new(33, noise);
    let dir = tempfile::tempdir().unwrap();
    for topology in Topology::ALL {
        let first = run_topology(&group, &judge, topology, 33, None).unwrap();
        let second = run_topology(&group, &judge, topology, 33, None).unwrap();
        assert_eq!(
            serde_json::to_vec(&first).unwrap(),
            serde_json::to_vec(&second).unwrap(),
            "{topology} reruns diverge"
        );

        let log = dir.path().join(format!("{topology}.jsonl"));
        let mut file = std::fs::File::create(&log).unwrap();
        for record in &first.matches {
            serde_json::to_writer(&mut file, record).unwrap();
            file.write_all(b"\n").unwrap();
        }
        drop(file);
        let replay = ReplayJudge::from_jsonl(&log).unwrap();
        let replayed = run_topology(&group, &replay, topology, 33, None).unwrap();
        assert_eq!(replayed, first, "{topology} replay diverges");
    }

    // The served response is byte-stable too.
    let (base, _runtime) = common::spawn_service(&arena_rank::config::AppConfig::default());
    let client = reqwest::blocking::Client::builder()
        .timeout(std::time::Duration::from_secs(10))
        .build()
        .unwrap();
    let wire = common::wire_group_with_utilities("det", &latents_of(&group), Some(0));
    let body = serde_json::json!({
        "group": wire,
        "topology": "swiss",
        "judge": {"kind": "simulated", "seed": 9, "noise": {"gaussian_sigma": 0.2}},
    });
    let post = || {
        client
            .post(format!("{base}/v1/rank"))
            .json(&body)
            .send()
            .unwrap()
    };
    let first = post();
    assert_eq!(first.status(), 200);
    let first = first.bytes().unwrap();
    let second = post().bytes().unwrap();
    assert_eq!(first, second, "identical requests returned different bytes");
}

fn service_round_trip() {
    let (base, _runtime) = common::spawn_service(&arena_rank::config::AppConfig::default());
    let client = reqwest::blocking::Client::builder()
        .timeout(std::time::Duration::from_secs(10))
        .build()
        .unwrap();
    let wire = common::wire_group_with_utilities("round-trip", &[0.7, 0.9, 0.3, 0.5], Some(0));
    let body = serde_json::json!({
        "group": wire,
        "topology": "seeded-single-elim",
    });
    let response = client
        .post(format!("{base}/v1/rank"))
        .json(&body)
        .send()
        .unwrap();
    assert_eq!(response.status(), 200);
    let ranking: serde_json::Value = response.json().unwrap();
    assert_eq!(ranking["comparison_count"], 6);

    let ranks: Vec<u64> = ranking["ranks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    assert_eq!(ranks, vec![1, 0, 3, 2], "noiseless default judge ranks");

    let rewards: Vec<f64> = ranking["rewards"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    let reward_oracle = [2.0 / 3.0, 1.0, 0.0, 1.0 / 3.0];
    for (i, &r) in rewards.iter().enumerate() {
        assert!(
            (r - reward_oracle[i]).abs() <= 1e-9,
            "reward {i}: {r} vs {}",
            reward_oracle[i]
        );
    }

    let advantages: Vec<f64> = ranking["advantages"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    // Hand oracle: mean 1/2, population sigma sqrt(5)/6, floor 1e-6.
    let sigma = 5.0f64.sqrt() / 6.0;
    for (i, &a) in advantages.iter().enumerate() {
        let oracle = (reward_oracle[i] - 0.5) / (sigma + 1e-6);
        assert!((a - oracle).abs() <= 1e-6, "advantage {i}: {a} vs {oracle}");
    }
    let sum: f64 = advantages.iter().sum();
    assert!(sum.abs() <= 1e-6, "advantages sum to {sum}");
}
