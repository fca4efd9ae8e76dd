//! Anchor-based ranking: each exploratory trajectory is compared once
//! against the designated anchor. Exploratory trajectories are scored by
//! their combined score from that single match; the anchor is scored by the
//! mean of its own per-match combined scores. This doubles as the seeding
//! stage of the seeded single elimination bracket, so its matches are keyed
//! under the `anchor` topology in both uses and the two agree comparison for
//! comparison.

use crate::error::{Error, Result};
use crate::judge::Judge;
use crate::trajectory::TrajectoryGroup;

use super::{
    build_result, order_desc, play, require_size, MatchRecord, Phase, Planned, RankingResult,
    Topology,
};

/// Index-space outcome of the anchor stage, shared with the seeded bracket.
pub(crate) struct AnchorOutcome {
    /// Trajectory indices ordered best to worst.
    pub order: Vec<usize>,
    /// Per-trajectory seeding score, by original index.
    pub scores: Vec<f64>,
    pub matches: Vec<MatchRecord>,
    pub ties: Vec<(usize, usize)>,
}

pub(crate) fn anchor_core(group: &TrajectoryGroup, judge: &dyn Judge) -> Result<AnchorOutcome> {
    let n = group.trajectories.len();
    require_size(Topology::Anchor, n, 2)?;
    let anchor = group.anchor_index.ok_or_else(|| {
        Error::precondition(Topology::Anchor.name(), "group designates no anchor_index")
    })?;
    if anchor >= n {
        return Err(Error::precondition(
            Topology::Anchor.name(),
            format!("anchor_index {anchor} out of range for {n} trajectories"),
        ));
    }

    let mut planned = Vec::with_capacity(n - 1);
    let mut slot = 0;
    for i in 0..n {
        if i == anchor {
            continue;
        }
        planned.push(Planned {
            a: i,
            b: anchor,
            phase: Phase::Seeding,
            round: 0,
            slot,
        });
        slot += 1;
    }
    let records = play(group, judge, Topology::Anchor, &planned)?;

    let mut scores = vec![0.0f64; n];
    let mut anchor_total = 0.0;
    for (p, rec) in planned.iter().zip(&records) {
        scores[p.a] = rec.scores.score_a;
        anchor_total += rec.scores.score_b;
    }
    scores[anchor] = anchor_total / (n - 1) as f64;

    let scored: Vec<(usize, f64)> = scores.iter().copied().enumerate().collect();
    let (order, ties) = order_desc(&scored);
    Ok(AnchorOutcome {
        order,
        scores,
        matches: records,
        ties,
    })
}

/// Rank a group by comparing everything against its anchor.
pub fn anchor_rank(group: &TrajectoryGroup, judge: &dyn Judge) -> Result<RankingResult> {
    run(group, judge, 0)
}

pub(crate) fn run(group: &TrajectoryGroup, judge: &dyn Judge, seed: u64) -> Result<RankingResult> {
    let outcome = anchor_core(group, judge)?;
    Ok(build_result(
        group,
        Topology::Anchor,
        seed,
        &outcome.order,
        &[],
        &outcome.scores,
        outcome.matches,
        &outcome.ties,
    ))
}
