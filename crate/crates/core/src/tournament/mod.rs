//! Tournament topologies that turn pairwise judgments into a full ranking.
//!
//! Five schedules are supported, trading comparison budget against ranking
//! fidelity: full round-robin, anchor-based seeding alone, a seeded single
//! elimination bracket, double elimination, and a Swiss system. Every
//! topology produces a [`RankingResult`] whose `ranks` is a bijection onto
//! `0..n`, along with the complete match log.
//!
//! Matches inside one round are independent and are evaluated in parallel,
//! but their results are applied in bracket order, so the outcome is
//! identical however the work is scheduled. With any deterministic judge,
//! the group, the judge seed, and the topology seed fully determine the
//! result. Score ties are broken toward the lower original index and
//! flagged, both on the match record and, for ranking-order ties, in
//! `tied_pairs`.

mod anchor;
mod double_elim;
mod round_robin;
mod single_elim;
mod swiss;

pub use anchor::anchor_rank;
pub use double_elim::double_elim;
pub use round_robin::round_robin;
pub use single_elim::{bracket_positions, seeded_single_elim};
pub use swiss::{swiss, swiss_with_standings, SwissStanding};

use indexmap::IndexMap;
use rayon::prelude::*;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::judge::{Judge, ScorePair};
use crate::trajectory::TrajectoryGroup;

/// The five supported tournament schedules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Topology {
    RoundRobin,
    Anchor,
    SeededSingleElim,
    DoubleElim,
    Swiss,
}

impl Topology {
    pub const ALL: [Topology; 5] = [
        Topology::RoundRobin,
        Topology::Anchor,
        Topology::SeededSingleElim,
        Topology::DoubleElim,
        Topology::Swiss,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Topology::RoundRobin => "round-robin",
            Topology::Anchor => "anchor",
            Topology::SeededSingleElim => "seeded-single-elim",
            Topology::DoubleElim => "double-elim",
            Topology::Swiss => "swiss",
        }
    }
}

impl std::fmt::Display for Topology {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "round-robin" => Ok(Topology::RoundRobin),
            "anchor" => Ok(Topology::Anchor),
            "seeded-single-elim" => Ok(Topology::SeededSingleElim),
            "double-elim" => Ok(Topology::DoubleElim),
            "swiss" => Ok(Topology::Swiss),
            other => Err(Error::Contract(format!(
                "unknown topology '{other}', expected one of: round-robin, anchor, seeded-single-elim, double-elim, swiss"
            ))),
        }
    }
}

impl Serialize for Topology {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Topology {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse()
            .map_err(|e: Error| D::Error::custom(e.to_string()))
    }
}

/// Which stage of a tournament a match belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Seeding,
    RoundRobin,
    WinnersBracket,
    LosersBracket,
    GrandFinal,
    SwissRound(u32),
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Phase::Seeding => f.write_str("seeding"),
            Phase::RoundRobin => f.write_str("round-robin"),
            Phase::WinnersBracket => f.write_str("winners-bracket"),
            Phase::LosersBracket => f.write_str("losers-bracket"),
            Phase::GrandFinal => f.write_str("grand-final"),
            Phase::SwissRound(k) => write!(f, "swiss-round-{k}"),
        }
    }
}

impl std::str::FromStr for Phase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "seeding" => Ok(Phase::Seeding),
            "round-robin" => Ok(Phase::RoundRobin),
            "winners-bracket" => Ok(Phase::WinnersBracket),
            "losers-bracket" => Ok(Phase::LosersBracket),
            "grand-final" => Ok(Phase::GrandFinal),
            other => {
                if let Some(k) = other.strip_prefix("swiss-round-") {
                    let k = k
                        .parse()
                        .map_err(|_| Error::Contract(format!("bad phase '{other}'")))?;
                    Ok(Phase::SwissRound(k))
                } else {
                    Err(Error::Contract(format!("bad phase '{other}'")))
                }
            }
        }
    }
}

impl Serialize for Phase {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Phase {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse()
            .map_err(|e: Error| D::Error::custom(e.to_string()))
    }
}

/// One played match: who met whom, scores both ways, and who advanced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchRecord {
    pub match_key: String,
    pub participant_a: String,
    pub participant_b: String,
    pub scores: ScorePair,
    pub winner: String,
    pub phase: Phase,
    pub round: u32,
    /// True when the combined scores were exactly equal and the winner was
    /// chosen by the lower-original-index rule.
    pub tie_broken: bool,
}

/// Complete outcome of one tournament over one group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingResult {
    pub topology: Topology,
    pub seed: u64,
    /// Trajectory id to rank, 0 is best; iteration order is the group's
    /// input order.
    pub ranks: IndexMap<String, usize>,
    /// Elimination topologies only: groups of ids eliminated together,
    /// best tier first. Empty for the other topologies.
    pub tiers: Vec<Vec<String>>,
    /// Per-trajectory running score total, in the group's input order.
    pub accumulated_scores: IndexMap<String, f64>,
    pub matches: Vec<MatchRecord>,
    pub comparison_count: usize,
    /// Pairs whose ranking sort keys were exactly equal, resolved toward the
    /// lower original index; earlier-ranked id first.
    pub tied_pairs: Vec<(String, String)>,
}

impl RankingResult {
    /// Ranks as a vector aligned with the group's input trajectory order.
    pub fn ranks_in_input_order(&self) -> Vec<usize> {
        self.ranks.values().copied().collect()
    }

    /// Trajectory ids ordered best to worst.
    pub fn order(&self) -> Vec<&str> {
        let mut ids: Vec<&str> = self.ranks.keys().map(String::as_str).collect();
        ids.sort_by_key(|id| self.ranks[*id]);
        ids
    }
}

// === Shared machinery ===

/// A match that has been scheduled but not yet evaluated. Indices are
/// positions in the group's trajectory list.
#[derive(Debug, Clone)]
pub(crate) struct Planned {
    pub a: usize,
    pub b: usize,
    pub phase: Phase,
    pub round: u32,
    pub slot: u32,
}

pub(crate) fn format_match_key(
    group_id: &str,
    topology: Topology,
    phase: Phase,
    round: u32,
    slot: u32,
) -> String {
    format!("{group_id}/{topology}/{phase}/{round}/{slot}")
}

/// Evaluate a batch of scheduled matches. Evaluations run in parallel;
/// records come back in schedule order, and if several matches fail the
/// error reported is the scheduled-first one, so failures are deterministic
/// too.
pub(crate) fn play(
    group: &TrajectoryGroup,
    judge: &dyn Judge,
    key_topology: Topology,
    planned: &[Planned],
) -> Result<Vec<MatchRecord>> {
    let outcomes: Vec<Result<ScorePair>> = planned
        .par_iter()
        .map(|p| {
            let key = format_match_key(&group.group_id, key_topology, p.phase, p.round, p.slot);
            judge.evaluate_pair(
                &group.query,
                &group.trajectories[p.a],
                &group.trajectories[p.b],
                &group.rubric,
                &key,
            )
        })
        .collect();

    let mut records = Vec::with_capacity(planned.len());
    for (p, outcome) in planned.iter().zip(outcomes) {
        let scores = outcome?;
        let (winner, tie_broken) = decide(p.a, p.b, &scores);
        records.push(MatchRecord {
            match_key: format_match_key(&group.group_id, key_topology, p.phase, p.round, p.slot),
            participant_a: group.trajectories[p.a].id.clone(),
            participant_b: group.trajectories[p.b].id.clone(),
            scores,
            winner: group.trajectories[winner].id.clone(),
            phase: p.phase,
            round: p.round,
            tie_broken,
        });
    }
    Ok(records)
}

/// Winner of a match: strictly higher combined score, or the lower original
/// index on an exact tie (flagged).
pub(crate) fn decide(a: usize, b: usize, scores: &ScorePair) -> (usize, bool) {
    if scores.score_a > scores.score_b {
        (a, false)
    } else if scores.score_b > scores.score_a {
        (b, false)
    } else {
        (a.min(b), true)
    }
}

/// Sort candidates by score descending with the lower-index tiebreak.
/// Returns the order (best first) and the adjacent pairs whose scores were
/// exactly equal.
pub(crate) fn order_desc(scored: &[(usize, f64)]) -> (Vec<usize>, Vec<(usize, usize)>) {
    let mut sorted = scored.to_vec();
    sorted.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
    let mut ties = Vec::new();
    for window in sorted.windows(2) {
        if window[0].1 == window[1].1 {
            ties.push((window[0].0, window[1].0));
        }
    }
    (sorted.iter().map(|(i, _)| *i).collect(), ties)
}

/// Assemble a [`RankingResult`] from index-space pieces.
pub(crate) fn build_result(
    group: &TrajectoryGroup,
    topology: Topology,
    seed: u64,
    order: &[usize],
    tiers: &[Vec<usize>],
    accumulated: &[f64],
    matches: Vec<MatchRecord>,
    tied: &[(usize, usize)],
) -> RankingResult {
    let n = group.trajectories.len();
    debug_assert_eq!(order.len(), n);
    let mut rank_of = vec![0usize; n];
    for (rank, &idx) in order.iter().enumerate() {
        rank_of[idx] = rank;
    }
    let mut ranks = IndexMap::with_capacity(n);
    let mut accumulated_scores = IndexMap::with_capacity(n);
    for (i, t) in group.trajectories.iter().enumerate() {
        ranks.insert(t.id.clone(), rank_of[i]);
        accumulated_scores.insert(t.id.clone(), accumulated[i]);
    }
    let comparison_count = matches.len();
    RankingResult {
        topology,
        seed,
        ranks,
        tiers: tiers
            .iter()
            .map(|tier| {
                tier.iter()
                    .map(|&i| group.trajectories[i].id.clone())
                    .collect()
            })
            .collect(),
        accumulated_scores,
        matches,
        comparison_count,
        tied_pairs: tied
            .iter()
            .map(|&(i, j)| {
                (
                    group.trajectories[i].id.clone(),
                    group.trajectories[j].id.clone(),
                )
            })
            .collect(),
    }
}

/// Flatten elimination tiers (champion's tier first) into a full ranking:
/// within a tier, higher accumulated score ranks first, equal scores fall
/// back to the lower original index and are flagged. Returns the order, the
/// tiers with members now in rank order, and the flagged ties.
pub(crate) fn rank_by_tiers(
    tiers_champion_first: &[Vec<usize>],
    accumulated: &[f64],
) -> (Vec<usize>, Vec<Vec<usize>>, Vec<(usize, usize)>) {
    let mut order = Vec::new();
    let mut sorted_tiers = Vec::new();
    let mut ties = Vec::new();
    for tier in tiers_champion_first {
        let scored: Vec<(usize, f64)> = tier.iter().map(|&i| (i, accumulated[i])).collect();
        let (tier_order, tier_ties) = order_desc(&scored);
        ties.extend(tier_ties);
        order.extend(tier_order.iter().copied());
        sorted_tiers.push(tier_order);
    }
    (order, sorted_tiers, ties)
}

pub(crate) fn require_size(topology: Topology, n: usize, minimum: usize) -> Result<()> {
    if n < minimum {
        return Err(Error::precondition(
            topology.name(),
            format!("needs at least {minimum} trajectories, group has {n}"),
        ));
    }
    Ok(())
}

// === Budgets ===

/// Number of rounds the Swiss system plays by default: ceil(log2 n).
pub fn default_swiss_rounds(n: usize) -> u32 {
    debug_assert!(n >= 2);
    usize::ilog2(n - 1) + 1
}

/// Exact number of comparisons a topology performs on a group of size `n`.
///
/// This mirrors what an actual run records: round-robin plays every
/// unordered pair, anchor ranking plays one match per exploratory
/// trajectory, both elimination schedules play `2n - 2` matches in total
/// (seeding plus bracket, or winners plus losers plus one grand final), and
/// Swiss plays `n / 2` matches per round for `ceil(log2 n)` rounds.
pub fn comparison_budget(topology: Topology, n: usize) -> Result<usize> {
    if n < 2 {
        return Err(Error::precondition(
            topology.name(),
            format!("needs at least 2 trajectories, got {n}"),
        ));
    }
    match topology {
        Topology::RoundRobin => Ok(n * (n - 1) / 2),
        Topology::Anchor => Ok(n - 1),
        Topology::SeededSingleElim => Ok(2 * n - 2),
        Topology::DoubleElim => {
            require_size(topology, n, 4)?;
            Ok(2 * n - 2)
        }
        Topology::Swiss => {
            if !n.is_multiple_of(2) {
                return Err(Error::precondition(
                    topology.name(),
                    format!("needs an even number of trajectories, got {n}"),
                ));
            }
            Ok(default_swiss_rounds(n) as usize * n / 2)
        }
    }
}

/// Run the named topology. `seed` drives shuffle-based schedules
/// (double elimination, Swiss) and is recorded on every result;
/// `swiss_rounds` overrides the Swiss round count.
pub fn run_topology(
    group: &TrajectoryGroup,
    judge: &dyn Judge,
    topology: Topology,
    seed: u64,
    swiss_rounds: Option<u32>,
) -> Result<RankingResult> {
    match topology {
        Topology::RoundRobin => round_robin::run(group, judge, seed),
        Topology::Anchor => anchor::run(group, judge, seed),
        Topology::SeededSingleElim => single_elim::run(group, judge, seed),
        Topology::DoubleElim => double_elim(group, judge, seed),
        Topology::Swiss => swiss(group, judge, swiss_rounds, seed),
    }
}
