//! Builders shared by the unit tests.

use crate::trajectory::{Rubric, Step, Trajectory, TrajectoryGroup};

/// Group with ids t0..tn and the given latent utilities.
pub(crate) fn group_with_utilities(
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
