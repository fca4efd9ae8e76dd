//! Replay judge: answers comparisons from a previously recorded match log
//! instead of computing anything. Rerunning a tournament against the log of
//! an earlier run reproduces that run exactly.

use std::collections::HashMap;
use std::io::BufRead;
use std::path::Path;

use crate::error::{Error, Result};
use crate::tournament::MatchRecord;
use crate::trajectory::{Rubric, Trajectory};

use super::{Judge, ScorePair};

/// Judge backed by recorded match outcomes, keyed by match key.
pub struct ReplayJudge {
    records: HashMap<String, MatchRecord>,
}

impl ReplayJudge {
    /// Index a set of records. If a key appears more than once the last
    /// occurrence wins, matching append-only log semantics.
    pub fn from_records<I>(records: I) -> Self
    where
        I: IntoIterator<Item = MatchRecord>,
    {
        let records = records
            .into_iter()
            .map(|r| (r.match_key.clone(), r))
            .collect();
        ReplayJudge { records }
    }

    /// Load a line-delimited JSON match log from disk.
    pub fn from_jsonl(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)
            .map_err(|e| Error::Io(format!("open {}: {e}", path.display())))?;
        let reader = std::io::BufReader::new(file);
        let mut records = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::Io(format!("read {}: {e}", path.display())))?;
            if line.trim().is_empty() {
                continue;
            }
            let record: MatchRecord = serde_json::from_str(&line)
                .map_err(|e| Error::Io(format!("parse {} line {}: {e}", path.display(), i + 1)))?;
            records.push(record);
        }
        Ok(ReplayJudge::from_records(records))
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

impl Judge for ReplayJudge {
    fn evaluate_pair(
        &self,
        _query: &str,
        a: &Trajectory,
        b: &Trajectory,
        _rubric: &Rubric,
        match_key: &str,
    ) -> Result<ScorePair> {
        let record = self
            .records
            .get(match_key)
            .ok_or_else(|| Error::ReplayMiss {
                match_key: match_key.to_string(),
                detail: "no recorded entry for this key".to_string(),
            })?;
        if record.participant_a == a.id && record.participant_b == b.id {
            Ok(record.scores)
        } else if record.participant_a == b.id && record.participant_b == a.id {
            Ok(record.scores.swapped())
        } else {
            Err(Error::ReplayMiss {
                match_key: match_key.to_string(),
                detail: format!(
                    "recorded participants ('{}', '{}') do not match requested ('{}', '{}')",
                    record.participant_a, record.participant_b, a.id, b.id
                ),
            })
        }
    }

    fn pointwise_score(
        &self,
        _query: &str,
        _trajectory: &Trajectory,
        _rubric: &Rubric,
        _call_key: &str,
    ) -> Result<f64> {
        Err(Error::Config(
            "replay judge holds pairwise match records only".to_string(),
        ))
    }
}
