//! Helpers shared by the CLI integration suites. Each test binary compiles
//! this module separately and uses a different subset of it.
#![allow(dead_code)]

use std::sync::Arc;

use arena_core::{Rubric, Step, Trajectory, TrajectoryGroup};
use arena_rank::config::AppConfig;
use arena_rank::io::WireTrajectory;
use arena_rank::service::{router, AppState, WireGroup};

/// Build a group whose trajectories carry the given latent utilities.
pub fn group_with_utilities(
    group_id: &str,
    utilities: &[f64],
    anchor_index: Option<usize>,
) -> TrajectoryGroup {
    let trajectories = utilities
        .iter()
        .enumerate()
        .map(|(i, &u)| Trajectory {
            id: format!("t{i}"),
            query: "q".to_string(),
            steps: vec![Step {
                thought: format!("attempt {i}"),
                tool_call: None,
                tool_response: None,
            }],
            answer: format!("answer {i}"),
            latent_utility: Some(u),
            likelihood_ratio: None,
            kl_estimate: None,
        })
        .collect();
    TrajectoryGroup {
        group_id: group_id.to_string(),
        query: "q".to_string(),
        trajectories,
        anchor_index,
        rubric: Rubric {
            id: "default".to_string(),
            text: "prefer correct and concise work".to_string(),
        },
    }
}

/// The same group in request-body form.
pub fn wire_group_with_utilities(
    group_id: &str,
    utilities: &[f64],
    anchor_index: Option<usize>,
) -> WireGroup {
    let group = group_with_utilities(group_id, utilities, anchor_index);
    WireGroup {
        group_id: group.group_id.clone(),
        rubric: Some(group.rubric.clone()),
        trajectories: group
            .trajectories
            .iter()
            .enumerate()
            .map(|(i, t)| WireTrajectory::from_trajectory(t, anchor_index == Some(i)))
            .collect(),
    }
}

/// Start the service on an ephemeral port. The runtime must outlive every
/// request made against the returned base URL.
pub fn spawn_service(config: &AppConfig) -> (String, tokio::runtime::Runtime) {
    let runtime = tokio::runtime::Runtime::new().expect("runtime");
    let state = Arc::new(AppState::from_config(config).expect("state"));
    let address = runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind("127.0.0.1:0")
            .await
            .expect("bind");
        let address = listener.local_addr().expect("local addr");
        tokio::spawn(async move {
            axum::serve(listener, router(state)).await.expect("serve");
        });
        address
    });
    (format!("http://{address}"), runtime)
}
