//! Subcommand bodies: rank one group, run a configured experiment, or
//! start the reward service. Everything here is deterministic given the
//! effective config, so identical invocations write identical files.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context as _};
use arena_core::advantage::ranks_to_advantages;
use arena_core::judge::{build_judge, JudgeKind, JudgeSpec, NoiseModel};
use arena_core::{comparison_budget, run_topology, validate_group, Topology};
use arena_lab::{run_collapse_experiment, run_fidelity_experiment, CollapseReport, FidelityReport};

use crate::config::{AppConfig, ExperimentKind};
use crate::io::{read_group_file, rubric_from_text, write_match_log};
use crate::service::{RankResponse, SeedsUsed};

/// Flags of the `rank` subcommand, already parsed.
#[derive(Debug, Clone, Default)]
pub struct RankOptions {
    pub input: Option<PathBuf>,
    pub topology: Option<Topology>,
    pub judge: Option<String>,
    pub budget_only: bool,
    pub size: Option<usize>,
    pub out: Option<PathBuf>,
    pub match_log: Option<PathBuf>,
    pub epsilon: Option<f64>,
    pub swiss_rounds: Option<u32>,
}

fn effective_judge(config: &AppConfig, flag: Option<&str>) -> anyhow::Result<JudgeSpec> {
    let fallback = || JudgeSpec::simulated(config.topology.seed, NoiseModel::noiseless());
    match flag {
        None => Ok(config.judge.clone().unwrap_or_else(fallback)),
        Some("sim") => {
            let mut spec = config.judge.clone().unwrap_or_else(fallback);
            spec.kind = JudgeKind::Simulated;
            Ok(spec)
        }
        Some(other) => bail!("unknown judge '{other}', expected 'sim'"),
    }
}

pub fn run_rank(config: &AppConfig, options: &RankOptions) -> anyhow::Result<()> {
    let topology = options.topology.unwrap_or(config.topology.name);
    let swiss_rounds = options.swiss_rounds.or(config.topology.swiss_rounds);

    if options.budget_only {
        let n = match (options.size, &options.input) {
            (Some(n), _) => n,
            (None, Some(path)) => {
                let rubric = rubric_from_text(config.topology.rubric_text.as_deref());
                read_group_file(path, rubric)?.trajectories.len()
            }
            (None, None) => bail!("--budget-only needs -n or --in to know the group size"),
        };
        let budget = comparison_budget(topology, n)?;
        println!("{budget}");
        return Ok(());
    }

    let Some(input) = &options.input else {
        bail!("rank needs --in pointing at a group file");
    };
    let rubric = rubric_from_text(config.topology.rubric_text.as_deref());
    let group = read_group_file(input, rubric)?;
    let violations = validate_group(&group);
    if !violations.is_empty() {
        let listed: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        bail!("invalid group {}: {}", group.group_id, listed.join("; "));
    }

    let judge_spec = effective_judge(config, options.judge.as_deref())?;
    let judge = build_judge(&judge_spec)?;
    let topology_seed = config.topology.seed;
    let result = run_topology(
        &group,
        judge.as_ref(),
        topology,
        topology_seed,
        swiss_rounds,
    )?;
    let epsilon = options.epsilon.unwrap_or(config.topology.epsilon);
    let vector = ranks_to_advantages(&result, epsilon)?;

    if let Some(path) = &options.match_log {
        write_match_log(path, &result.matches)
            .with_context(|| format!("writing match log {}", path.display()))?;
    }

    let judge_seed = match judge_spec.kind {
        JudgeKind::Simulated | JudgeKind::PointwiseSimulated => Some(judge_spec.seed),
        JudgeKind::Replay | JudgeKind::Remote => None,
    };
    let response = RankResponse {
        ranks: result.ranks_in_input_order(),
        rewards: vector.rewards,
        advantages: vector.advantages,
        comparison_count: result.comparison_count,
        topology: result.topology,
        match_log: None,
        engine_version: env!("CARGO_PKG_VERSION").to_string(),
        seeds: SeedsUsed {
            judge_seed,
            topology_seed,
        },
    };
    let rendered = serde_json::to_string_pretty(&response)?;
    match &options.out {
        Some(path) => {
            std::fs::write(path, format!("{rendered}\n"))
                .with_context(|| format!("writing {}", path.display()))?;
        }
        None => println!("{rendered}"),
    }
    eprintln!(
        "ranked {} trajectories with {} in {} comparisons",
        group.trajectories.len(),
        topology,
        result.comparison_count
    );
    Ok(())
}

fn write_jsonl<T: serde::Serialize>(path: &Path, rows: &[T]) -> anyhow::Result<()> {
    let mut out =
        std::fs::File::create(path).with_context(|| format!("writing {}", path.display()))?;
    for row in rows {
        serde_json::to_writer(&mut out, row)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

fn print_fidelity_table(report: &FidelityReport) {
    println!(
        "{:<20} {:>9} {:>8} {:>8} {:>6} {:>12}",
        "topology", "tau", "std", "tau_rr", "top1", "comparisons"
    );
    for row in &report.topologies {
        println!(
            "{:<20} {:>9.4} {:>8.4} {:>8.4} {:>6.3} {:>12.1}",
            row.topology.name(),
            row.mean_tau_truth,
            row.std_tau_truth,
            row.mean_tau_round_robin,
            row.top1_accuracy,
            row.mean_comparisons
        );
    }
    println!("trials: {}", report.trials);
}

fn print_collapse_table(report: &CollapseReport) {
    println!(
        "{:<8} {:>9} {:>10} {:>10} {:>8}",
        "spread", "snr", "pointwise", "arena", "margin"
    );
    for row in &report.rows {
        println!(
            "{:<8.3} {:>9.3} {:>10.4} {:>10.4} {:>8.4}",
            row.utility_spread,
            row.mean_snr,
            row.pointwise_corr,
            row.arena_corr,
            row.arena_corr - row.pointwise_corr
        );
    }
    println!("trials per spread: {}", report.trials);
}

pub fn run_experiment(config: &AppConfig, out: Option<&Path>) -> anyhow::Result<()> {
    let Some(section) = &config.experiment else {
        bail!("config has no [experiment] section");
    };
    match section.kind {
        ExperimentKind::Fidelity => {
            let report = run_fidelity_experiment(
                &section.group,
                &section.noise,
                section.trials,
                &section.topologies,
            )?;
            let path = out.unwrap_or_else(|| Path::new("fidelity-report.jsonl"));
            write_jsonl(path, &report.topologies)?;
            print_fidelity_table(&report);
            eprintln!("wrote {}", path.display());
        }
        ExperimentKind::Collapse => {
            let report = run_collapse_experiment(
                &section.group,
                &section.spreads,
                &section.noise,
                section.trials,
            )?;
            let path = out.unwrap_or_else(|| Path::new("collapse-report.jsonl"));
            write_jsonl(path, &report.rows)?;
            print_collapse_table(&report);
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(())
}

pub fn run_serve(config: &AppConfig) -> anyhow::Result<()> {
    let runtime = tokio::runtime::Runtime::new().context("starting async runtime")?;
    runtime.block_on(crate::service::run(config))
}
