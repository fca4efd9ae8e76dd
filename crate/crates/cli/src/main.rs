//! `arena-rank`: rank trajectory groups with pairwise tournaments, run the
//! simulation laboratory, or serve rankings over HTTP.
//!
//! Exit codes: 0 on success, 2 for unparseable inputs (group files and
//! config files), 1 for everything else.

use std::path::PathBuf;

use arena_core::Topology;
use arena_rank::commands::{self, RankOptions};
use arena_rank::config::{self, ConfigError};
use arena_rank::io::ParseError;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "arena-rank",
    version,
    about = "Tournament-based relative ranking for agent trajectory groups"
)]
struct Cli {
    /// TOML config file; the ARENA_RANK_CONFIG environment variable is
    /// consulted when this flag is absent.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override every configured seed with one value.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank one trajectory group from a line-delimited group file.
    Rank(RankArgs),
    /// Run the experiment described by the config file.
    Experiment(ExperimentArgs),
    /// Start the HTTP reward service.
    Serve(ServeArgs),
}

#[derive(Args)]
struct RankArgs {
    /// Group file, one trajectory JSON record per line.
    #[arg(long = "in", value_name = "PATH")]
    input: Option<PathBuf>,
    /// Tournament schedule to run.
    #[arg(long)]
    topology: Option<Topology>,
    /// Judge backend override; 'sim' selects the simulated judge.
    #[arg(long)]
    judge: Option<String>,
    /// Print the comparison budget for the group size and exit.
    #[arg(long)]
    budget_only: bool,
    /// Group size for --budget-only when no input file is given.
    #[arg(short = 'n', long = "size")]
    size: Option<usize>,
    /// Write the ranking report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Write the match log here, one JSON record per line.
    #[arg(long = "match-log", value_name = "PATH")]
    match_log: Option<PathBuf>,
    /// Standardization epsilon for advantages.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Swiss round count; the default is ceil(log2 N).
    #[arg(long = "swiss-rounds")]
    swiss_rounds: Option<u32>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Machine-readable report path (line-delimited JSON).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ServeArgs {
    /// Override the configured port.
    #[arg(long)]
    port: Option<u16>,
    /// Override the configured host.
    #[arg(long)]
    host: Option<String>,
}

fn main() {
    let cli = Cli::parse();
    if let Err(error) = run(cli) {
        eprintln!("error: {error:#}");
        std::process::exit(exit_code(&error));
    }
}

fn exit_code(error: &anyhow::Error) -> i32 {
    let parse_class = error.downcast_ref::<ParseError>().is_some()
        || error.downcast_ref::<ConfigError>().is_some();
    if parse_class {
        2
    } else {
        1
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let mut config = config::load(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        config::apply_seed_override(&mut config, seed);
    }
    match cli.command {
        Command::Rank(args) => {
            let options = RankOptions {
                input: args.input,
                topology: args.topology,
                judge: args.judge,
                budget_only: args.budget_only,
                size: args.size,
                out: args.out,
                match_log: args.match_log,
                epsilon: args.epsilon,
                swiss_rounds: args.swiss_rounds,
            };
            commands::run_rank(&config, &options)
        }
        Command::Experiment(args) => commands::run_experiment(&config, args.out.as_deref()),
        Command::Serve(args) => {
            if let Some(port) = args.port {
                config.service.port = port;
            }
            if let Some(host) = args.host {
                config.service.host = host;
            }
            commands::run_serve(&config)
        }
    }
}
