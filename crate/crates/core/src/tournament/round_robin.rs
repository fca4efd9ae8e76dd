//! Full round-robin: every unordered pair meets exactly once, and each
//! trajectory is scored by its normalized win rate, wins divided by the
//! n - 1 matches it played, with exact score ties in a match crediting half
//! a win to each side.

use crate::error::Result;
use crate::judge::Judge;
use crate::trajectory::TrajectoryGroup;

use super::{
    build_result, order_desc, play, require_size, Phase, Planned, RankingResult, Topology,
};

/// Rank a group by playing all pairs.
pub fn round_robin(group: &TrajectoryGroup, judge: &dyn Judge) -> Result<RankingResult> {
    run(group, judge, 0)
}

pub(crate) fn run(group: &TrajectoryGroup, judge: &dyn Judge, seed: u64) -> Result<RankingResult> {
    let n = group.trajectories.len();
    require_size(Topology::RoundRobin, n, 2)?;

    let mut planned = Vec::with_capacity(n * (n - 1) / 2);
    let mut slot = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            planned.push(Planned {
                a: i,
                b: j,
                phase: Phase::RoundRobin,
                round: 0,
                slot,
            });
            slot += 1;
        }
    }
    let records = play(group, judge, Topology::RoundRobin, &planned)?;

    let mut wins = vec![0.0f64; n];
    for (p, rec) in planned.iter().zip(&records) {
        if rec.tie_broken {
            wins[p.a] += 0.5;
            wins[p.b] += 0.5;
        } else if rec.scores.score_a > rec.scores.score_b {
            wins[p.a] += 1.0;
        } else {
            wins[p.b] += 1.0;
        }
    }
    let scores: Vec<(usize, f64)> = wins
        .iter()
        .enumerate()
        .map(|(i, w)| (i, w / (n - 1) as f64))
        .collect();
    let (order, ties) = order_desc(&scores);
    let accumulated: Vec<f64> = scores.iter().map(|(_, s)| *s).collect();
    Ok(build_result(
        group,
        Topology::RoundRobin,
        seed,
        &order,
        &[],
        &accumulated,
        records,
        &ties,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::judge::{NoiseModel, ScriptedJudge, SimulatedJudge};
    use crate::test_support::group_with_utilities;

    #[test]
    fn two_trajectories_play_one_match() {
        let group = group_with_utilities("g", &[0.3, 0.8], None);
        let judge = SimulatedJudge::new(0, NoiseModel::noiseless());
        let result = round_robin(&group, &judge).unwrap();
        assert_eq!(result.comparison_count, 1);
        assert_eq!(result.ranks["t1"], 0);
        assert_eq!(result.ranks["t0"], 1);
        assert!(result.tiers.is_empty());
    }

    #[test]
    fn noiseless_win_rates_are_exact_fractions() {
        let group = group_with_utilities("g", &[0.9, 0.7, 0.5, 0.3], None);
        let judge = SimulatedJudge::new(0, NoiseModel::noiseless());
        let result = round_robin(&group, &judge).unwrap();
        assert_eq!(result.comparison_count, 6);
        assert_eq!(result.accumulated_scores["t0"], 1.0);
        assert_eq!(result.accumulated_scores["t1"], 2.0 / 3.0);
        assert_eq!(result.accumulated_scores["t2"], 1.0 / 3.0);
        assert_eq!(result.accumulated_scores["t3"], 0.0);
        assert_eq!(result.ranks_in_input_order(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn three_cycle_splits_evenly_and_falls_back_to_index_order() {
        // a beats b, b beats c, c beats a: everyone wins once.
        let group = group_with_utilities("g", &[0.5, 0.5, 0.5], None);
        let judge = ScriptedJudge::new()
            .with_outcome("t0", "t1", 1.0, 0.0)
            .with_outcome("t1", "t2", 1.0, 0.0)
            .with_outcome("t2", "t0", 1.0, 0.0);
        let result = round_robin(&group, &judge).unwrap();
        for id in ["t0", "t1", "t2"] {
            assert_eq!(result.accumulated_scores[id], 0.5);
        }
        assert_eq!(result.ranks_in_input_order(), vec![0, 1, 2]);
        assert_eq!(result.tied_pairs.len(), 2);
    }

    #[test]
    fn match_keys_enumerate_every_pair_once() {
        let group = group_with_utilities("g", &[0.9, 0.7, 0.5, 0.3], None);
        let judge = SimulatedJudge::new(0, NoiseModel::noiseless());
        let result = round_robin(&group, &judge).unwrap();
        let keys: Vec<&str> = result
            .matches
            .iter()
            .map(|m| m.match_key.as_str())
            .collect();
        assert_eq!(
            keys,
            vec![
                "g/round-robin/round-robin/0/0",
                "g/round-robin/round-robin/0/1",
                "g/round-robin/round-robin/0/2",
                "g/round-robin/round-robin/0/3",
                "g/round-robin/round-robin/0/4",
                "g/round-robin/round-robin/0/5",
            ]
        );
    }
}
