//! Seeded single elimination in three phases. First the anchor stage ranks
//! everyone with n - 1 comparisons and initializes each trajectory's
//! accumulated score to its seeding score. Second, seeds are laid into a
//! bracket that alternates strong-versus-weak pairs between the two ends of
//! the array, which keeps the top two seeds in opposite halves so they can
//! meet only in the final; elimination rounds then add both combined match
//! scores to the accumulated totals, and each round's losers form one tier.
//! Third, tiers are read back champion first, ordered internally by
//! accumulated score, to yield the final ranking.
//!
//! When the group size is not a power of two the top seeds receive
//! first-round byes; a bye is not a match and adds nothing to any total.

use crate::error::Result;
use crate::judge::Judge;
use crate::trajectory::TrajectoryGroup;

use super::anchor::anchor_core;
use super::{
    build_result, play, rank_by_tiers, require_size, Phase, Planned, RankingResult, Topology,
};

/// Lay seeds (best first) into bracket slots. Slots beyond the field are
/// byes. Pair k of the strength pairing is (seed k, seed m + 1 - k); odd
/// pairs fill from the head of the array, even pairs from the tail.
pub(crate) fn bracket_fill(seed_order: &[usize]) -> Vec<Option<usize>> {
    let m = seed_order.len().next_power_of_two();
    let mut bracket: Vec<Option<usize>> = vec![None; m];
    let mut head = 0usize;
    let mut tail = m.saturating_sub(2);
    for k in 1..=(m / 2) {
        let high = seed_order.get(k - 1).copied();
        let low = seed_order.get(m - k).copied();
        if k % 2 == 1 {
            bracket[head] = high;
            bracket[head + 1] = low;
            head += 2;
        } else {
            bracket[tail] = high;
            bracket[tail + 1] = low;
            tail = tail.saturating_sub(2);
        }
    }
    bracket
}

/// Bracket slot occupancy for a field of `n` seeds, as 1-based seed numbers
/// with `None` marking first-round byes. Exposed for conformance checks.
pub fn bracket_positions(n: usize) -> Vec<Option<usize>> {
    let identity: Vec<usize> = (0..n).collect();
    bracket_fill(&identity)
        .into_iter()
        .map(|slot| slot.map(|s| s + 1))
        .collect()
}

/// Rank a group with anchor seeding plus a single elimination bracket.
pub fn seeded_single_elim(group: &TrajectoryGroup, judge: &dyn Judge) -> Result<RankingResult> {
    run(group, judge, 0)
}

pub(crate) fn run(group: &TrajectoryGroup, judge: &dyn Judge, seed: u64) -> Result<RankingResult> {
    let n = group.trajectories.len();
    require_size(Topology::SeededSingleElim, n, 2)?;

    // Phase 1: anchor seeding. Reusing the anchor stage verbatim (including
    // its match keys) keeps the seed order bit-identical to a standalone
    // anchor ranking of the same group under the same judge.
    let seeding = anchor_core(group, judge)?;
    let mut accumulated = seeding.scores.clone();
    let mut matches = seeding.matches;
    let mut flagged = seeding.ties.clone();

    // Phase 2: elimination rounds over the seeded bracket.
    let mut current = bracket_fill(&seeding.order);
    let mut round = 0u32;
    let mut tiers_chrono: Vec<Vec<usize>> = Vec::new();
    while current.len() > 1 {
        let mut planned = Vec::new();
        for (k, pair) in current.chunks(2).enumerate() {
            if let (Some(a), Some(b)) = (pair[0], pair[1]) {
                planned.push(Planned {
                    a,
                    b,
                    phase: Phase::WinnersBracket,
                    round,
                    slot: k as u32,
                });
            }
        }
        let records = play(group, judge, Topology::SeededSingleElim, &planned)?;
        let mut record_iter = records.iter();
        let mut next = Vec::with_capacity(current.len() / 2);
        let mut losers = Vec::new();
        for pair in current.chunks(2) {
            match (pair[0], pair[1]) {
                (Some(a), Some(b)) => {
                    let rec = record_iter.next().expect("one record per planned pair");
                    accumulated[a] += rec.scores.score_a;
                    accumulated[b] += rec.scores.score_b;
                    let winner = if rec.winner == group.trajectories[a].id {
                        a
                    } else {
                        b
                    };
                    losers.push(if winner == a { b } else { a });
                    next.push(Some(winner));
                }
                (one, None) | (None, one) => next.push(one),
            }
        }
        matches.extend(records);
        if !losers.is_empty() {
            tiers_chrono.push(losers);
        }
        current = next;
        round += 1;
    }
    let champion = current[0].expect("the bracket reduces to a champion");
    tiers_chrono.push(vec![champion]);

    // Phase 3: champion's tier first, then earlier eliminations.
    tiers_chrono.reverse();
    let (order, tiers, tier_ties) = rank_by_tiers(&tiers_chrono, &accumulated);
    flagged.extend(tier_ties);
    Ok(build_result(
        group,
        Topology::SeededSingleElim,
        seed,
        &order,
        &tiers,
        &accumulated,
        matches,
        &flagged,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::judge::{NoiseModel, SimulatedJudge};
    use crate::test_support::group_with_utilities;

    fn noiseless() -> SimulatedJudge {
        SimulatedJudge::new(0, NoiseModel::noiseless())
    }

    #[test]
    fn eight_seed_bracket_lays_out_as_hand_traced() {
        let slots: Vec<usize> = bracket_positions(8).into_iter().flatten().collect();
        assert_eq!(slots, vec![1, 8, 3, 6, 4, 5, 2, 7]);
    }

    #[test]
    fn top_two_seeds_can_meet_only_in_the_final() {
        for n in [2usize, 4, 8, 16, 32] {
            let slots = bracket_positions(n);
            let m = slots.len();
            let pos = |seed: usize| slots.iter().position(|s| *s == Some(seed)).unwrap();
            let (p1, p2) = (pos(1), pos(2));
            // Two slots first share a bracket subtree at the round where
            // their slot indices agree after that many halvings.
            let mut meet_round = 0;
            let (mut a, mut b) = (p1, p2);
            while a != b {
                a /= 2;
                b /= 2;
                meet_round += 1;
            }
            assert_eq!(meet_round, m.ilog2(), "n={n}");
        }
    }

    #[test]
    fn noiseless_bracket_recovers_the_seed_order_exactly() {
        // Descending utilities with the anchor strongest: seeding keeps the
        // input order, and a perfect comparator never upsets a favorite.
        let utilities = [0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2];
        let group = group_with_utilities("g", &utilities, Some(0));
        let result = seeded_single_elim(&group, &noiseless()).unwrap();
        assert_eq!(result.comparison_count, 14);
        assert_eq!(result.ranks_in_input_order(), vec![0, 1, 2, 3, 4, 5, 6, 7]);

        let tier_sizes: Vec<usize> = result.tiers.iter().map(Vec::len).collect();
        assert_eq!(tier_sizes, vec![1, 1, 2, 4]);
        assert_eq!(result.tiers[0], vec!["t0".to_string()]);
        assert_eq!(result.tiers[1], vec!["t1".to_string()]);
        assert_eq!(result.tiers[2], vec!["t2".to_string(), "t3".to_string()]);

        // Round 1 pairings follow the 1-8 / 3-6 / 4-5 / 2-7 layout.
        let round1: Vec<(&str, &str)> = result
            .matches
            .iter()
            .filter(|m| m.phase == Phase::WinnersBracket && m.round == 0)
            .map(|m| (m.participant_a.as_str(), m.participant_b.as_str()))
            .collect();
        assert_eq!(
            round1,
            vec![("t0", "t7"), ("t2", "t5"), ("t3", "t4"), ("t1", "t6")]
        );
    }

    #[test]
    fn noiseless_sixteen_entrants_rank_by_survival_depth_not_utility() {
        // At sixteen entrants the alternating fill puts seeds 1 and 3 in the
        // same quarter and seeds 2 and 4 in the other, so a perfect judge
        // still eliminates seeds 3 and 4 in the quarterfinals while seeds 5
        // and 6 reach the semifinals. Survival depth outranks utility from
        // this field size up; this pins the exact hand-traced outcome.
        let utilities: Vec<f64> = (0..16).map(|i| 0.95 - 0.05 * i as f64).collect();
        let group = group_with_utilities("g", &utilities, Some(0));
        let result = seeded_single_elim(&group, &noiseless()).unwrap();
        assert_eq!(result.comparison_count, 30);

        let quarterfinals: Vec<(&str, &str)> = result
            .matches
            .iter()
            .filter(|m| m.phase == Phase::WinnersBracket && m.round == 1)
            .map(|m| (m.participant_a.as_str(), m.participant_b.as_str()))
            .collect();
        assert_eq!(
            quarterfinals,
            vec![("t0", "t2"), ("t4", "t6"), ("t7", "t5"), ("t3", "t1")]
        );

        let tier_sizes: Vec<usize> = result.tiers.iter().map(Vec::len).collect();
        assert_eq!(tier_sizes, vec![1, 1, 2, 4, 8]);
        assert_eq!(result.tiers[2], vec!["t4".to_string(), "t5".to_string()]);
        assert_eq!(
            result.ranks_in_input_order(),
            vec![0, 1, 4, 5, 2, 3, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15]
        );
    }

    #[test]
    fn accumulated_scores_stack_seeding_and_bracket_matches() {
        let utilities = [0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2];
        let group = group_with_utilities("g", &utilities, Some(0));
        let result = seeded_single_elim(&group, &noiseless()).unwrap();
        // Quarterfinal losers play seeding plus one bracket match, so their
        // total is 2 * (2 * utility).
        for (id, utility) in [("t4", 0.5), ("t5", 0.4), ("t6", 0.3), ("t7", 0.2)] {
            let v = result.accumulated_scores[id];
            assert!((v - 4.0 * utility).abs() < 1e-12, "{id}: {v}");
        }
        // Semifinal losers add one more match.
        for (id, utility) in [("t2", 0.7), ("t3", 0.6)] {
            let v = result.accumulated_scores[id];
            assert!((v - 6.0 * utility).abs() < 1e-12, "{id}: {v}");
        }
    }

    #[test]
    fn two_trajectories_play_seeding_plus_final() {
        let group = group_with_utilities("g", &[0.3, 0.8], Some(0));
        let result = seeded_single_elim(&group, &noiseless()).unwrap();
        assert_eq!(result.comparison_count, 2);
        assert_eq!(result.ranks["t1"], 0);
        assert_eq!(
            result.tiers,
            vec![vec!["t1".to_string()], vec!["t0".to_string()]]
        );
    }

    #[test]
    fn non_power_of_two_fields_get_top_seed_byes() {
        let utilities = [0.9, 0.8, 0.7, 0.6, 0.5, 0.4];
        let group = group_with_utilities("g", &utilities, Some(0));
        let result = seeded_single_elim(&group, &noiseless()).unwrap();
        // 5 seeding matches plus 5 bracket matches; byes add no match.
        assert_eq!(result.comparison_count, 10);
        assert_eq!(result.ranks_in_input_order(), vec![0, 1, 2, 3, 4, 5]);
        // Seeds 1 and 2 sat out round 1.
        let round1_participants: Vec<&str> = result
            .matches
            .iter()
            .filter(|m| m.phase == Phase::WinnersBracket && m.round == 0)
            .flat_map(|m| [m.participant_a.as_str(), m.participant_b.as_str()])
            .collect();
        assert!(!round1_participants.contains(&"t0"));
        assert!(!round1_participants.contains(&"t1"));
    }

    #[test]
    fn seed_order_agrees_with_standalone_anchor_ranking_under_noise() {
        let utilities = [0.62, 0.55, 0.48, 0.71, 0.44, 0.58, 0.52, 0.66];
        let group = group_with_utilities("g", &utilities, Some(2));
        let noise = NoiseModel {
            gaussian_sigma: 0.08,
            position_bias: 0.3,
            ..NoiseModel::noiseless()
        };
        let judge = SimulatedJudge::new(21, noise);
        let anchor = crate::tournament::anchor_rank(&group, &judge).unwrap();
        let elim = seeded_single_elim(&group, &judge).unwrap();
        let seeding_matches: Vec<_> = elim
            .matches
            .iter()
            .filter(|m| m.phase == Phase::Seeding)
            .cloned()
            .collect();
        assert_eq!(seeding_matches, anchor.matches);
        // The bracket's round 1 draws the anchor stage's order.
        let order = anchor.order();
        let first_pair = elim
            .matches
            .iter()
            .find(|m| m.phase == Phase::WinnersBracket)
            .unwrap();
        assert_eq!(first_pair.participant_a, order[0]);
        assert_eq!(first_pair.participant_b, order[7]);
    }
}
