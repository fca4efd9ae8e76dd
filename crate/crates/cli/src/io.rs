//! Wire formats: line-delimited group files and match logs.
//!
//! A group file carries one trajectory per line. Every line repeats the
//! shared query, and at most one line may set `"anchor": true` to designate
//! the reference trajectory that seeded topologies compare against. The
//! same per-trajectory record embeds in the service's request body, so both
//! entry points share one parser and one set of structural rules.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use arena_core::{MatchRecord, Rubric, Step, Trajectory, TrajectoryGroup};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Rubric applied when neither the config nor the request names one.
pub const DEFAULT_RUBRIC_TEXT: &str =
    "Prefer the trajectory that answers the query correctly, grounds its \
     claims in the tool evidence it gathered, and stays concise.";

/// Group id applied when the input does not name one.
pub const DEFAULT_GROUP_ID: &str = "group";

/// A file or request body could not be decoded into a group.
#[derive(Debug, Error)]
#[error("{origin}: {detail}")]
pub struct ParseError {
    /// Where the bad content sits: `path:line` for files, a short label
    /// for request bodies.
    pub origin: String,
    pub detail: String,
}

impl ParseError {
    fn new(origin: impl Into<String>, detail: impl Into<String>) -> Self {
        ParseError {
            origin: origin.into(),
            detail: detail.into(),
        }
    }
}

/// One trajectory as it appears on the wire, with the anchor flag inline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WireTrajectory {
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
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub anchor: bool,
}

impl WireTrajectory {
    pub fn from_trajectory(trajectory: &Trajectory, anchor: bool) -> Self {
        WireTrajectory {
            id: trajectory.id.clone(),
            query: trajectory.query.clone(),
            steps: trajectory.steps.clone(),
            answer: trajectory.answer.clone(),
            latent_utility: trajectory.latent_utility,
            likelihood_ratio: trajectory.likelihood_ratio,
            kl_estimate: trajectory.kl_estimate,
            anchor,
        }
    }

    fn into_trajectory(self) -> (Trajectory, bool) {
        let anchor = self.anchor;
        let trajectory = Trajectory {
            id: self.id,
            query: self.query,
            steps: self.steps,
            answer: self.answer,
            latent_utility: self.latent_utility,
            likelihood_ratio: self.likelihood_ratio,
            kl_estimate: self.kl_estimate,
        };
        (trajectory, anchor)
    }
}

/// Assemble wire records into a group. The group query is the first
/// record's query; divergent queries are left in place for
/// `validate_group` to report. A second anchor flag is rejected here
/// because the assembled form cannot represent it.
pub fn assemble_group(
    records: Vec<WireTrajectory>,
    group_id: &str,
    rubric: Rubric,
    origin_of: impl Fn(usize) -> String,
) -> Result<TrajectoryGroup, ParseError> {
    if records.is_empty() {
        return Err(ParseError::new(origin_of(0), "no trajectory records found"));
    }
    let mut trajectories = Vec::with_capacity(records.len());
    let mut anchor_index = None;
    for (index, record) in records.into_iter().enumerate() {
        let (trajectory, anchor) = record.into_trajectory();
        if anchor {
            if let Some(prev) = anchor_index {
                let prev_id: &Trajectory = &trajectories[prev];
                return Err(ParseError::new(
                    origin_of(index),
                    format!(
                        "second anchor flag on '{}'; '{}' already anchors the group",
                        trajectory.id, prev_id.id
                    ),
                ));
            }
            anchor_index = Some(index);
        }
        trajectories.push(trajectory);
    }
    Ok(TrajectoryGroup {
        group_id: group_id.to_string(),
        query: trajectories[0].query.clone(),
        trajectories,
        anchor_index,
        rubric,
    })
}

/// Parse a line-delimited group file. Blank lines are skipped; any
/// malformed line is reported with its 1-based line number.
pub fn read_group_file(path: &Path, rubric: Rubric) -> Result<TrajectoryGroup, ParseError> {
    let shown = path.display().to_string();
    let text = fs::read_to_string(path)
        .map_err(|e| ParseError::new(&shown, format!("cannot read file: {e}")))?;
    let mut records = Vec::new();
    let mut line_numbers = Vec::new();
    for (number, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: WireTrajectory = serde_json::from_str(line)
            .map_err(|e| ParseError::new(format!("{}:{}", shown, number + 1), e.to_string()))?;
        records.push(record);
        line_numbers.push(number + 1);
    }
    let group_id = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or(DEFAULT_GROUP_ID)
        .to_string();
    assemble_group(records, &group_id, rubric, |index| {
        let line = line_numbers.get(index).copied().unwrap_or(1);
        format!("{shown}:{line}")
    })
}

/// Serialize a group back to wire records, preserving the anchor flag.
pub fn group_to_wire(group: &TrajectoryGroup) -> Vec<WireTrajectory> {
    group
        .trajectories
        .iter()
        .enumerate()
        .map(|(i, t)| WireTrajectory::from_trajectory(t, group.anchor_index == Some(i)))
        .collect()
}

/// Write a group file, one record per line.
pub fn write_group_file(path: &Path, group: &TrajectoryGroup) -> anyhow::Result<()> {
    let mut out = fs::File::create(path)?;
    for record in group_to_wire(group) {
        serde_json::to_writer(&mut out, &record)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Append-friendly match log: one record per line, stable field names.
pub fn write_match_log(path: &Path, records: &[MatchRecord]) -> anyhow::Result<()> {
    let mut out = fs::File::create(path)?;
    for record in records {
        serde_json::to_writer(&mut out, record)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// The rubric used for file-loaded groups, overridable from config.
pub fn rubric_from_text(text: Option<&str>) -> Rubric {
    Rubric {
        id: "default".to_string(),
        text: text.unwrap_or(DEFAULT_RUBRIC_TEXT).to_string(),
    }
}
