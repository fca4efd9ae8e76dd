//! Swiss system: a fixed number of rounds in which trajectories with equal
//! win counts meet. Round one pairs adjacent entries of the seed-shuffled
//! order; later rounds sort by wins (shuffle order within a score group) and
//! pair greedily top-down, skipping opponents already played where possible
//! and spilling into the adjacent score group otherwise. The final order is
//! lexicographic on wins, then Buchholz (the sum of each opponent's final
//! win count), then accumulated score, then input index.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::judge::Judge;
use crate::rng::derive_rng;
use crate::trajectory::TrajectoryGroup;

use super::{
    build_result, default_swiss_rounds, play, require_size, Error, Phase, Planned, RankingResult,
    Topology,
};

/// One trajectory's line in the final Swiss table.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SwissStanding {
    pub id: String,
    pub wins: u32,
    pub buchholz: u32,
    pub accumulated_score: f64,
    pub opponents: Vec<String>,
}

/// Rank a group with a Swiss tournament; `rounds` defaults to ceil(log2 n).
pub fn swiss(
    group: &TrajectoryGroup,
    judge: &dyn Judge,
    rounds: Option<u32>,
    seed: u64,
) -> Result<RankingResult> {
    swiss_with_standings(group, judge, rounds, seed).map(|(result, _)| result)
}

/// As [`swiss`], also returning the final standings table in rank order.
pub fn swiss_with_standings(
    group: &TrajectoryGroup,
    judge: &dyn Judge,
    rounds: Option<u32>,
    seed: u64,
) -> Result<(RankingResult, Vec<SwissStanding>)> {
    let n = group.trajectories.len();
    require_size(Topology::Swiss, n, 2)?;
    if !n.is_multiple_of(2) {
        return Err(Error::precondition(
            Topology::Swiss.name(),
            format!("needs an even number of trajectories, got {n}"),
        ));
    }
    let rounds = rounds.unwrap_or_else(|| default_swiss_rounds(n));

    let mut shuffled: Vec<usize> = (0..n).collect();
    shuffled.shuffle(&mut derive_rng(seed, &["swiss", "shuffle"]));
    let mut shuffle_pos = vec![0usize; n];
    for (pos, &idx) in shuffled.iter().enumerate() {
        shuffle_pos[idx] = pos;
    }

    let mut wins = vec![0u32; n];
    let mut accumulated = vec![0.0f64; n];
    let mut opponents: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut matches = Vec::new();

    for round in 0..rounds {
        let mut standing_order: Vec<usize> = (0..n).collect();
        standing_order.sort_by(|&x, &y| {
            wins[y]
                .cmp(&wins[x])
                .then(shuffle_pos[x].cmp(&shuffle_pos[y]))
        });

        let mut paired = vec![false; n];
        let mut planned = Vec::with_capacity(n / 2);
        let mut slot = 0u32;
        for i in 0..n {
            let a = standing_order[i];
            if paired[a] {
                continue;
            }
            paired[a] = true;
            let fresh = standing_order[i + 1..]
                .iter()
                .copied()
                .find(|&b| !paired[b] && !opponents[a].contains(&b));
            // A field this small can run out of new opponents before the
            // rounds do; fall back to the nearest rematch rather than stall.
            let b = match fresh {
                Some(b) => b,
                None => standing_order[i + 1..]
                    .iter()
                    .copied()
                    .find(|&b| !paired[b])
                    .expect("even field always leaves a partner"),
            };
            paired[b] = true;
            planned.push(Planned {
                a,
                b,
                phase: Phase::SwissRound(round + 1),
                round,
                slot,
            });
            slot += 1;
        }

        let records = play(group, judge, Topology::Swiss, &planned)?;
        for (p, rec) in planned.iter().zip(&records) {
            accumulated[p.a] += rec.scores.score_a;
            accumulated[p.b] += rec.scores.score_b;
            let winner = if rec.winner == group.trajectories[p.a].id {
                p.a
            } else {
                p.b
            };
            wins[winner] += 1;
            opponents[p.a].push(p.b);
            opponents[p.b].push(p.a);
        }
        matches.extend(records);
    }

    let buchholz: Vec<u32> = (0..n)
        .map(|i| opponents[i].iter().map(|&j| wins[j]).sum())
        .collect();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| {
        wins[y]
            .cmp(&wins[x])
            .then(buchholz[y].cmp(&buchholz[x]))
            .then(accumulated[y].total_cmp(&accumulated[x]))
            .then(x.cmp(&y))
    });
    let mut ties = Vec::new();
    for window in order.windows(2) {
        let (x, y) = (window[0], window[1]);
        if wins[x] == wins[y] && buchholz[x] == buchholz[y] && accumulated[x] == accumulated[y] {
            ties.push((x, y));
        }
    }

    let result = build_result(
        group,
        Topology::Swiss,
        seed,
        &order,
        &[],
        &accumulated,
        matches,
        &ties,
    );
    let standings = order
        .iter()
        .map(|&i| SwissStanding {
            id: group.trajectories[i].id.clone(),
            wins: wins[i],
            buchholz: buchholz[i],
            accumulated_score: accumulated[i],
            opponents: opponents[i]
                .iter()
                .map(|&j| group.trajectories[j].id.clone())
                .collect(),
        })
        .collect();
    Ok((result, standings))
}
