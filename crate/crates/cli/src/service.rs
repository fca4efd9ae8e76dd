//! HTTP reward service: `POST /v1/rank` turns a trajectory group into
//! ranks, rewards, and advantages; `GET /v1/healthz` and
//! `GET /v1/topologies` serve liveness and capability probes.
//!
//! The service is stateless: every request carries or inherits its judge,
//! runs to completion inside its own deadline, and mutates nothing. With a
//! deterministic judge, identical requests produce byte-identical bodies.
//! Requests are admitted up to a configured concurrency limit; tournament
//! work runs on the blocking pool so judge backends may block freely.

use std::sync::Arc;
use std::time::Duration;

use anyhow::Context as _;
use arena_core::advantage::ranks_to_advantages;
use arena_core::judge::{build_judge, JudgeKind, JudgeSpec, NoiseModel};
use arena_core::{
    run_topology, validate_group, Error as EngineError, MatchRecord, RankingResult, Rubric,
    Topology, Violation,
};
use axum::extract::rejection::JsonRejection;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tokio::sync::Semaphore;

use crate::config::AppConfig;
use crate::io::{assemble_group, rubric_from_text, WireTrajectory, DEFAULT_GROUP_ID};

/// A group as it travels in a request body: the same per-trajectory records
/// as group files, plus optional group id and rubric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WireGroup {
    #[serde(default = "default_group_id")]
    pub group_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rubric: Option<Rubric>,
    pub trajectories: Vec<WireTrajectory>,
}

fn default_group_id() -> String {
    DEFAULT_GROUP_ID.to_string()
}

/// Body of `POST /v1/rank`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RankRequest {
    pub group: WireGroup,
    pub topology: Topology,
    /// Inline judge; omitted means the server's configured default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub judge: Option<JudgeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub include_match_log: bool,
}

/// Seeds that fed the run, echoed for reproducibility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedsUsed {
    /// Seed of the judge backend; absent for replay and remote judges,
    /// which carry no randomness of their own.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub judge_seed: Option<u64>,
    pub topology_seed: u64,
}

/// Body of a successful `POST /v1/rank`. Arrays align with the input
/// trajectory order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankResponse {
    pub ranks: Vec<usize>,
    pub rewards: Vec<f64>,
    pub advantages: Vec<f64>,
    pub comparison_count: usize,
    pub topology: Topology,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub match_log: Option<Vec<MatchRecord>>,
    pub engine_version: String,
    pub seeds: SeedsUsed,
}

/// Error body shared by every non-200 outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<Violation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub match_key: Option<String>,
}

/// Capability row served by `GET /v1/topologies`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologyInfo {
    pub name: String,
    pub min_size: usize,
    pub even_size_only: bool,
}

pub struct AppState {
    default_judge: JudgeSpec,
    topology_seed: u64,
    default_epsilon: f64,
    swiss_rounds: Option<u32>,
    rubric: Rubric,
    semaphore: Semaphore,
    deadline: Duration,
}

impl AppState {
    pub fn from_config(config: &AppConfig) -> anyhow::Result<Self> {
        let service = &config.service;
        anyhow::ensure!(
            service.max_concurrent_requests >= 1,
            "service.max_concurrent_requests must be at least 1"
        );
        anyhow::ensure!(
            service.request_timeout_secs > 0.0,
            "service.request_timeout_secs must be positive"
        );
        let default_judge = config
            .judge
            .clone()
            .unwrap_or_else(|| JudgeSpec::simulated(0, NoiseModel::noiseless()));
        // Surface a bad default judge at startup, not per request. Validation
        // only: construction can own a blocking HTTP client, which must not be
        // created on an async runtime thread.
        default_judge.validate().context("default judge")?;
        Ok(AppState {
            default_judge,
            topology_seed: config.topology.seed,
            default_epsilon: config.topology.epsilon,
            swiss_rounds: config.topology.swiss_rounds,
            rubric: rubric_from_text(config.topology.rubric_text.as_deref()),
            semaphore: Semaphore::new(service.max_concurrent_requests),
            deadline: Duration::from_secs_f64(service.request_timeout_secs),
        })
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/v1/rank", post(rank))
        .route("/v1/healthz", get(healthz))
        .route("/v1/topologies", get(topologies))
        .with_state(state)
}

/// Bind and serve until the process is stopped. Prints the bound address
/// to stdout so callers on ephemeral ports can find it.
pub async fn run(config: &AppConfig) -> anyhow::Result<()> {
    let state = Arc::new(AppState::from_config(config)?);
    let address = format!("{}:{}", config.service.host, config.service.port);
    let listener = tokio::net::TcpListener::bind(&address)
        .await
        .with_context(|| format!("cannot bind {address}"))?;
    let local = listener.local_addr()?;
    println!("listening on http://{local}");
    use std::io::Write as _;
    std::io::stdout().flush().ok();
    axum::serve(listener, router(state)).await?;
    Ok(())
}

async fn healthz() -> Json<serde_json::Value> {
    Json(serde_json::json!({ "status": "ok" }))
}

async fn topologies() -> Json<serde_json::Value> {
    let rows: Vec<TopologyInfo> = Topology::ALL
        .iter()
        .map(|t| TopologyInfo {
            name: t.name().to_string(),
            min_size: match t {
                Topology::DoubleElim => 4,
                _ => 2,
            },
            even_size_only: matches!(t, Topology::Swiss),
        })
        .collect();
    Json(serde_json::json!({ "topologies": rows }))
}

fn bad_request(error: impl Into<String>, violations: Vec<Violation>) -> Response {
    let body = ErrorBody {
        error: error.into(),
        violations,
        match_key: None,
    };
    (StatusCode::BAD_REQUEST, Json(body)).into_response()
}

fn engine_failure(error: EngineError) -> Response {
    match &error {
        EngineError::Transport { match_key, .. } | EngineError::ReplayMiss { match_key, .. } => {
            let body = ErrorBody {
                error: error.to_string(),
                violations: Vec::new(),
                match_key: Some(match_key.clone()),
            };
            (StatusCode::BAD_GATEWAY, Json(body)).into_response()
        }
        EngineError::Io(_) => {
            let body = ErrorBody {
                error: error.to_string(),
                violations: Vec::new(),
                match_key: None,
            };
            (StatusCode::INTERNAL_SERVER_ERROR, Json(body)).into_response()
        }
        _ => bad_request(error.to_string(), Vec::new()),
    }
}

async fn rank(
    State(state): State<Arc<AppState>>,
    payload: Result<Json<RankRequest>, JsonRejection>,
) -> Response {
    let Json(request) = match payload {
        Ok(json) => json,
        Err(rejection) => return bad_request(rejection.body_text(), Vec::new()),
    };
    let _permit = state
        .semaphore
        .acquire()
        .await
        .expect("semaphore is never closed");

    let rubric = request
        .group
        .rubric
        .clone()
        .unwrap_or_else(|| state.rubric.clone());
    let group = match assemble_group(
        request.group.trajectories,
        &request.group.group_id,
        rubric,
        |index| format!("trajectories[{index}]"),
    ) {
        Ok(group) => group,
        Err(parse) => return bad_request(parse.to_string(), Vec::new()),
    };
    let violations = validate_group(&group);
    if !violations.is_empty() {
        return bad_request("invalid group", violations);
    }

    let judge_spec = request.judge.unwrap_or_else(|| state.default_judge.clone());
    let judge_seed = match judge_spec.kind {
        JudgeKind::Simulated | JudgeKind::PointwiseSimulated => Some(judge_spec.seed),
        JudgeKind::Replay | JudgeKind::Remote => None,
    };

    let topology = request.topology;
    let topology_seed = state.topology_seed;
    let swiss_rounds = state.swiss_rounds;
    let epsilon = request.epsilon.unwrap_or(state.default_epsilon);
    // Judge construction may block (file reads, HTTP client setup), so it
    // belongs on the blocking pool with the tournament itself.
    let work = move || -> arena_core::Result<(RankingResult, Vec<f64>, Vec<f64>)> {
        let judge = build_judge(&judge_spec)?;
        let result = run_topology(
            &group,
            judge.as_ref(),
            topology,
            topology_seed,
            swiss_rounds,
        )?;
        let vector = ranks_to_advantages(&result, epsilon)?;
        Ok((result, vector.rewards, vector.advantages))
    };
    let outcome = tokio::time::timeout(state.deadline, tokio::task::spawn_blocking(work)).await;
    let (result, rewards, advantages) = match outcome {
        Err(_) => {
            let body = ErrorBody {
                error: format!("deadline of {:.3}s exceeded", state.deadline.as_secs_f64()),
                violations: Vec::new(),
                match_key: None,
            };
            return (StatusCode::GATEWAY_TIMEOUT, Json(body)).into_response();
        }
        Ok(Err(join_error)) => {
            let body = ErrorBody {
                error: format!("ranking task failed: {join_error}"),
                violations: Vec::new(),
                match_key: None,
            };
            return (StatusCode::INTERNAL_SERVER_ERROR, Json(body)).into_response();
        }
        Ok(Ok(Err(engine_error))) => return engine_failure(engine_error),
        Ok(Ok(Ok(parts))) => parts,
    };

    let response = RankResponse {
        ranks: result.ranks_in_input_order(),
        rewards,
        advantages,
        comparison_count: result.comparison_count,
        topology: result.topology,
        match_log: request.include_match_log.then_some(result.matches),
        engine_version: env!("CARGO_PKG_VERSION").to_string(),
        seeds: SeedsUsed {
            judge_seed,
            topology_seed,
        },
    };
    (StatusCode::OK, Json(response)).into_response()
}
