//! Scripted judge: a programmable backend for tests and debugging. Outcomes
//! are declared per unordered pair of trajectory ids; pairs without a script
//! fall back to comparing latent utilities when both are present, and to
//! lexicographic id order otherwise. Fully deterministic.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::trajectory::{Rubric, Trajectory};

use super::{Judge, ScorePair};

/// Judge whose verdicts are written down in advance.
#[derive(Debug, Clone, Default)]
pub struct ScriptedJudge {
    outcomes: HashMap<(String, String), (f64, f64)>,
}

impl ScriptedJudge {
    pub fn new() -> Self {
        ScriptedJudge::default()
    }

    /// Declare the combined scores for a pair, in either presentation order.
    pub fn with_outcome(mut self, a: &str, b: &str, score_a: f64, score_b: f64) -> Self {
        self.outcomes
            .insert((a.to_string(), b.to_string()), (score_a, score_b));
        self.outcomes
            .insert((b.to_string(), a.to_string()), (score_b, score_a));
        self
    }

    fn fallback(a: &Trajectory, b: &Trajectory) -> (f64, f64) {
        match (a.latent_utility, b.latent_utility) {
            (Some(ua), Some(ub)) => (2.0 * ua, 2.0 * ub),
            _ => {
                if a.id <= b.id {
                    (2.0, 0.0)
                } else {
                    (0.0, 2.0)
                }
            }
        }
    }
}

impl Judge for ScriptedJudge {
    fn evaluate_pair(
        &self,
        _query: &str,
        a: &Trajectory,
        b: &Trajectory,
        _rubric: &Rubric,
        _match_key: &str,
    ) -> Result<ScorePair> {
        let (score_a, score_b) = self
            .outcomes
            .get(&(a.id.clone(), b.id.clone()))
            .copied()
            .unwrap_or_else(|| Self::fallback(a, b));
        // Present the combined verdict as two symmetric directional halves.
        Ok(ScorePair::from_directions(
            (score_a / 2.0, score_b / 2.0),
            (score_b / 2.0, score_a / 2.0),
        ))
    }

    fn pointwise_score(
        &self,
        _query: &str,
        _trajectory: &Trajectory,
        _rubric: &Rubric,
        _call_key: &str,
    ) -> Result<f64> {
        Err(Error::Config(
            "scripted judge serves pairwise comparisons only".to_string(),
        ))
    }
}
