//! Core data model: trajectories, groups, rubrics, and structural validation.
//!
//! A [`TrajectoryGroup`] is the unit of work for ranking: several candidate
//! trajectories answering the same query, optionally with one of them
//! designated as the anchor that seeding comparisons are made against.
//! All types here are plain immutable data and safe to share across threads.

use serde::{Deserialize, Serialize};

/// One step of an agent trajectory: a thought, optionally with a tool call
/// and the response that call produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Step {
    pub thought: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tool_call: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tool_response: Option<String>,
}

/// A complete candidate solution to a query.
///
/// `latent_utility` is ground truth used only by simulated judges and the
/// laboratory; production trajectories normally leave it unset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Trajectory {
    pub id: String,
    pub query: String,
    pub steps: Vec<Step>,
    pub answer: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub latent_utility: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub likelihood_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kl_estimate: Option<f64>,
}

/// Evaluation instructions shown to judges alongside each pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rubric {
    pub id: String,
    pub text: String,
}

/// A group of candidate trajectories for one query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryGroup {
    pub group_id: String,
    pub query: String,
    pub trajectories: Vec<Trajectory>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor_index: Option<usize>,
    pub rubric: Rubric,
}

impl TrajectoryGroup {
    pub fn len(&self) -> usize {
        self.trajectories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectories.is_empty()
    }

    /// Id of the anchor trajectory, when one is designated and in range.
    pub fn anchor_id(&self) -> Option<&str> {
        self.anchor_index
            .and_then(|i| self.trajectories.get(i))
            .map(|t| t.id.as_str())
    }
}

/// One defect found by [`validate_group`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.code.label(), self.message)
    }
}

/// Machine-readable classification of a group defect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ViolationCode {
    #[serde(rename = "group too small")]
    GroupTooSmall,
    #[serde(rename = "duplicate id")]
    DuplicateId,
    #[serde(rename = "empty id")]
    EmptyId,
    #[serde(rename = "query mismatch")]
    QueryMismatch,
    #[serde(rename = "latent utility out of range")]
    UtilityOutOfRange,
    #[serde(rename = "likelihood ratio not positive")]
    LikelihoodRatioNotPositive,
    #[serde(rename = "kl estimate negative")]
    KlEstimateNegative,
    #[serde(rename = "anchor index out of range")]
    AnchorIndexOutOfRange,
    #[serde(rename = "tool response without tool call")]
    ToolResponseWithoutCall,
    #[serde(rename = "empty rubric")]
    EmptyRubric,
}

impl ViolationCode {
    pub fn label(&self) -> &'static str {
        match self {
            ViolationCode::GroupTooSmall => "group too small",
            ViolationCode::DuplicateId => "duplicate id",
            ViolationCode::EmptyId => "empty id",
            ViolationCode::QueryMismatch => "query mismatch",
            ViolationCode::UtilityOutOfRange => "latent utility out of range",
            ViolationCode::LikelihoodRatioNotPositive => "likelihood ratio not positive",
            ViolationCode::KlEstimateNegative => "kl estimate negative",
            ViolationCode::AnchorIndexOutOfRange => "anchor index out of range",
            ViolationCode::ToolResponseWithoutCall => "tool response without tool call",
            ViolationCode::EmptyRubric => "empty rubric",
        }
    }
}

fn violation(code: ViolationCode, message: impl Into<String>) -> Violation {
    Violation {
        code,
        message: message.into(),
    }
}

/// Check every structural invariant of a group and report all defects found.
///
/// An empty report means the group is acceptable to any topology whose own
/// structural preconditions (anchor presence, size, parity) it satisfies.
/// This function never fails; it only describes. Identical groups produce
/// identical reports, and a group with an empty report keeps an empty report
/// on re-validation.
pub fn validate_group(group: &TrajectoryGroup) -> Vec<Violation> {
    let mut report = Vec::new();
    let n = group.trajectories.len();

    if n < 2 {
        report.push(violation(
            ViolationCode::GroupTooSmall,
            format!(
                "group '{}' has {} trajectories, need at least 2",
                group.group_id, n
            ),
        ));
    }

    if group.rubric.text.trim().is_empty() {
        report.push(violation(
            ViolationCode::EmptyRubric,
            format!("rubric '{}' has empty text", group.rubric.id),
        ));
    }

    if let Some(idx) = group.anchor_index {
        if idx >= n {
            report.push(violation(
                ViolationCode::AnchorIndexOutOfRange,
                format!("anchor_index {idx} out of range for {n} trajectories"),
            ));
        }
    }

    let mut seen = std::collections::HashSet::new();
    for (i, t) in group.trajectories.iter().enumerate() {
        if t.id.is_empty() {
            report.push(violation(
                ViolationCode::EmptyId,
                format!("trajectory at index {i} has an empty id"),
            ));
        } else if !seen.insert(t.id.as_str()) {
            report.push(violation(
                ViolationCode::DuplicateId,
                format!("trajectory id '{}' appears more than once", t.id),
            ));
        }

        if t.query != group.query {
            report.push(violation(
                ViolationCode::QueryMismatch,
                format!("trajectory '{}' query differs from the group query", t.id),
            ));
        }

        if let Some(u) = t.latent_utility {
            if !(0.0..=1.0).contains(&u) {
                report.push(violation(
                    ViolationCode::UtilityOutOfRange,
                    format!("trajectory '{}' latent_utility {u} outside [0, 1]", t.id),
                ));
            }
        }

        if let Some(r) = t.likelihood_ratio {
            if !(r > 0.0) {
                report.push(violation(
                    ViolationCode::LikelihoodRatioNotPositive,
                    format!(
                        "trajectory '{}' likelihood_ratio {r} must be positive",
                        t.id
                    ),
                ));
            }
        }

        if let Some(k) = t.kl_estimate {
            if !(k >= 0.0) {
                report.push(violation(
                    ViolationCode::KlEstimateNegative,
                    format!("trajectory '{}' kl_estimate {k} must be nonnegative", t.id),
                ));
            }
        }

        for (s, step) in t.steps.iter().enumerate() {
            if step.tool_response.is_some() && step.tool_call.is_none() {
                report.push(violation(
                    ViolationCode::ToolResponseWithoutCall,
                    format!(
                        "trajectory '{}' step {s} has a tool_response without a tool_call",
                        t.id
                    ),
                ));
            }
        }
    }

    report
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn step(thought: &str) -> Step {
        Step {
            thought: thought.to_string(),
            tool_call: None,
            tool_response: None,
        }
    }

    fn trajectory(id: &str, query: &str, utility: Option<f64>) -> Trajectory {
        Trajectory {
            id: id.to_string(),
            query: query.to_string(),
            steps: vec![step("consider the question")],
            answer: format!("answer from {id}"),
            latent_utility: utility,
            likelihood_ratio: None,
            kl_estimate: None,
        }
    }

    fn group(ids: &[&str]) -> TrajectoryGroup {
        TrajectoryGroup {
            group_id: "g0".to_string(),
            query: "q".to_string(),
            trajectories: ids
                .iter()
                .map(|id| trajectory(id, "q", Some(0.5)))
                .collect(),
            anchor_index: None,
            rubric: Rubric {
                id: "r0".to_string(),
                text: "prefer correct and concise work".to_string(),
            },
        }
    }

    #[test]
    fn minimal_two_trajectory_group_is_clean() {
        let g = group(&["a", "b"]);
        assert!(validate_group(&g).is_empty());
    }

    #[test]
    fn duplicate_ids_are_reported() {
        let g = group(&["a", "a"]);
        let report = validate_group(&g);
        assert!(report.iter().any(|v| v.code == ViolationCode::DuplicateId));
        assert!(report
            .iter()
            .any(|v| v.to_string().contains("duplicate id")));
    }

    #[test]
    fn singleton_group_is_too_small() {
        let g = group(&["only"]);
        let report = validate_group(&g);
        assert!(report
            .iter()
            .any(|v| v.code == ViolationCode::GroupTooSmall));
        assert!(report
            .iter()
            .any(|v| v.to_string().contains("group too small")));
    }

    #[test]
    fn validation_is_idempotent_and_pure() {
        let mut g = group(&["a", "b", "c"]);
        g.trajectories[1].latent_utility = Some(1.7);
        g.trajectories[2].likelihood_ratio = Some(-0.1);
        let first = validate_group(&g);
        let second = validate_group(&g);
        assert_eq!(first, second);
        assert_eq!(first.len(), 2);
    }

    #[test]
    fn out_of_range_fields_are_each_reported() {
        let mut g = group(&["a", "b", "c", "d"]);
        g.anchor_index = Some(9);
        g.trajectories[0].latent_utility = Some(f64::NAN);
        g.trajectories[1].kl_estimate = Some(-1.0);
        g.trajectories[2].steps.push(Step {
            thought: "use a tool".to_string(),
            tool_call: None,
            tool_response: Some("orphan response".to_string()),
        });
        g.trajectories[3].query = "different".to_string();
        let report = validate_group(&g);
        let codes: Vec<ViolationCode> = report.iter().map(|v| v.code).collect();
        assert!(codes.contains(&ViolationCode::AnchorIndexOutOfRange));
        assert!(codes.contains(&ViolationCode::UtilityOutOfRange));
        assert!(codes.contains(&ViolationCode::KlEstimateNegative));
        assert!(codes.contains(&ViolationCode::ToolResponseWithoutCall));
        assert!(codes.contains(&ViolationCode::QueryMismatch));
    }

    #[test]
    fn clean_group_stays_clean_after_revalidation() {
        let g = group(&["a", "b", "c"]);
        assert!(validate_group(&g).is_empty());
        assert!(validate_group(&g).is_empty());
    }

    #[test]
    fn wire_form_round_trips() {
        let mut g = group(&["a", "b"]);
        g.anchor_index = Some(0);
        g.trajectories[0].steps[0].tool_call = Some("search(q)".to_string());
        g.trajectories[0].steps[0].tool_response = Some("hits".to_string());
        let json = serde_json::to_string(&g).unwrap();
        let back: TrajectoryGroup = serde_json::from_str(&json).unwrap();
        assert_eq!(g, back);
    }
}
