//! Layered configuration: defaults, an optional TOML file, then flag
//! overrides. The file path comes from `--config` or, failing that, the
//! `ARENA_RANK_CONFIG` environment variable; with neither set, built-in
//! defaults apply. A `--seed` flag overrides every configured seed at once
//! so one flag pins the whole run.

use std::path::{Path, PathBuf};

use arena_core::judge::{JudgeSpec, NoiseModel};
use arena_core::{Topology, DEFAULT_EPSILON};
use arena_lab::GroupSpec;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Environment variable naming the config file when `--config` is absent.
pub const CONFIG_ENV: &str = "ARENA_RANK_CONFIG";

/// The config file was unreadable or did not match the schema.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config {path}: {detail}")]
    Read { path: String, detail: String },
    #[error("config {path}: {detail}")]
    Parse { path: String, detail: String },
}

/// Complete configuration for every subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct AppConfig {
    /// Judge backend; `None` means a noiseless simulated judge with seed 0.
    pub judge: Option<JudgeSpec>,
    pub topology: TopologySection,
    pub service: ServiceSection,
    pub experiment: Option<ExperimentSection>,
}

/// How to rank: which schedule, with what seed and advantage epsilon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TopologySection {
    pub name: Topology,
    pub seed: u64,
    pub epsilon: f64,
    pub swiss_rounds: Option<u32>,
    /// Rubric text shown to judges for file-loaded groups; a built-in
    /// rubric applies when unset.
    pub rubric_text: Option<String>,
}

impl Default for TopologySection {
    fn default() -> Self {
        TopologySection {
            name: Topology::RoundRobin,
            seed: 0,
            epsilon: DEFAULT_EPSILON,
            swiss_rounds: None,
            rubric_text: None,
        }
    }
}

/// Reward service limits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ServiceSection {
    pub host: String,
    pub port: u16,
    pub max_concurrent_requests: usize,
    pub request_timeout_secs: f64,
}

impl Default for ServiceSection {
    fn default() -> Self {
        ServiceSection {
            host: "127.0.0.1".to_string(),
            port: 8080,
            max_concurrent_requests: 4,
            request_timeout_secs: 30.0,
        }
    }
}

/// Which laboratory experiment to run and with what inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub kind: ExperimentKind,
    pub trials: usize,
    pub group: GroupSpec,
    #[serde(default)]
    pub noise: NoiseModel,
    /// Fidelity only; empty means all five topologies.
    #[serde(default)]
    pub topologies: Vec<Topology>,
    /// Collapse only; utility spread levels to sweep.
    #[serde(default)]
    pub spreads: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Fidelity,
    Collapse,
}

/// Load configuration from `path`, the environment, or defaults.
pub fn load(path: Option<&Path>) -> Result<AppConfig, ConfigError> {
    let env_path = std::env::var_os(CONFIG_ENV).map(PathBuf::from);
    load_with(path, env_path)
}

fn load_with(path: Option<&Path>, env_path: Option<PathBuf>) -> Result<AppConfig, ConfigError> {
    let chosen: Option<PathBuf> = path.map(Path::to_path_buf).or(env_path);
    let Some(file) = chosen else {
        return Ok(AppConfig::default());
    };
    let shown = file.display().to_string();
    let text = std::fs::read_to_string(&file).map_err(|e| ConfigError::Read {
        path: shown.clone(),
        detail: e.to_string(),
    })?;
    toml::from_str(&text).map_err(|e| ConfigError::Parse {
        path: shown,
        detail: e.to_string(),
    })
}

/// Force one seed everywhere randomness enters.
pub fn apply_seed_override(config: &mut AppConfig, seed: u64) {
    match &mut config.judge {
        Some(judge) => judge.seed = seed,
        None => config.judge = Some(JudgeSpec::simulated(seed, NoiseModel::noiseless())),
    }
    config.topology.seed = seed;
    if let Some(experiment) = &mut config.experiment {
        experiment.group.seed = seed;
    }
}
