//! Double elimination with random seeding. Participants are shuffled by the
//! topology seed and laid into a winners bracket; a first loss drops a
//! trajectory into the losers bracket and a second loss eliminates it. The
//! losers bracket alternates internal rounds with rounds that absorb the
//! next wave of winners-bracket losers (reversed, the standard routing that
//! delays rematches). One grand final between the two bracket champions
//! settles first place, with no bracket reset, for 2n - 2 matches in total.
//! Accumulated scores start at zero and grow by both combined scores of
//! every played match; tiers follow elimination order.
//!
//! For field sizes that are not a power of two, the top shuffled positions
//! receive first-round byes; byes are not matches and propagate through the
//! losers bracket as phantom slots.

use rand::seq::SliceRandom;

use crate::error::Result;
use crate::judge::Judge;
use crate::rng::derive_rng;
use crate::trajectory::TrajectoryGroup;

use super::single_elim::bracket_fill;
use super::{
    build_result, play, rank_by_tiers, require_size, MatchRecord, Phase, Planned, RankingResult,
    Topology,
};

/// Outcome of one losers-bracket round over phantom-aware pairs.
struct LbRound {
    winners: Vec<Option<usize>>,
    eliminated: Vec<usize>,
    records: Vec<MatchRecord>,
}

fn play_lb_round(
    group: &TrajectoryGroup,
    judge: &dyn Judge,
    pairs: &[(Option<usize>, Option<usize>)],
    round: u32,
    accumulated: &mut [f64],
) -> Result<LbRound> {
    let mut planned = Vec::new();
    for (k, &(x, y)) in pairs.iter().enumerate() {
        if let (Some(a), Some(b)) = (x, y) {
            planned.push(Planned {
                a,
                b,
                phase: Phase::LosersBracket,
                round,
                slot: k as u32,
            });
        }
    }
    let records = play(group, judge, Topology::DoubleElim, &planned)?;
    let mut record_iter = records.iter();
    let mut winners = Vec::with_capacity(pairs.len());
    let mut eliminated = Vec::new();
    for &(x, y) in pairs {
        match (x, y) {
            (Some(a), Some(b)) => {
                let rec = record_iter.next().expect("one record per planned pair");
                accumulated[a] += rec.scores.score_a;
                accumulated[b] += rec.scores.score_b;
                let winner = if rec.winner == group.trajectories[a].id {
                    a
                } else {
                    b
                };
                eliminated.push(if winner == a { b } else { a });
                winners.push(Some(winner));
            }
            (one, None) | (None, one) => winners.push(one),
        }
    }
    Ok(LbRound {
        winners,
        eliminated,
        records,
    })
}

fn adjacent_pairs(slots: &[Option<usize>]) -> Vec<(Option<usize>, Option<usize>)> {
    slots.chunks(2).map(|c| (c[0], c[1])).collect()
}

/// Rank a group with a randomly seeded double elimination bracket.
pub fn double_elim(group: &TrajectoryGroup, judge: &dyn Judge, seed: u64) -> Result<RankingResult> {
    let n = group.trajectories.len();
    require_size(Topology::DoubleElim, n, 4)?;

    let mut shuffled: Vec<usize> = (0..n).collect();
    shuffled.shuffle(&mut derive_rng(seed, &["double-elim", "shuffle"]));

    let mut accumulated = vec![0.0f64; n];
    let mut matches = Vec::new();

    // Winners bracket, recording each round's drop-down slots (phantom when
    // the pair contained a bye).
    let mut wb = bracket_fill(&shuffled);
    let mut droppers: Vec<Vec<Option<usize>>> = Vec::new();
    let mut wb_round = 0u32;
    while wb.len() > 1 {
        let mut planned = Vec::new();
        for (k, pair) in wb.chunks(2).enumerate() {
            if let (Some(a), Some(b)) = (pair[0], pair[1]) {
                planned.push(Planned {
                    a,
                    b,
                    phase: Phase::WinnersBracket,
                    round: wb_round,
                    slot: k as u32,
                });
            }
        }
        let records = play(group, judge, Topology::DoubleElim, &planned)?;
        let mut record_iter = records.iter();
        let mut next = Vec::with_capacity(wb.len() / 2);
        let mut round_droppers = Vec::with_capacity(wb.len() / 2);
        for pair in wb.chunks(2) {
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
                    round_droppers.push(Some(if winner == a { b } else { a }));
                    next.push(Some(winner));
                }
                (one, None) | (None, one) => {
                    next.push(one);
                    round_droppers.push(None);
                }
            }
        }
        matches.extend(records);
        droppers.push(round_droppers);
        wb = next;
        wb_round += 1;
    }
    let wb_champion = wb[0].expect("winners bracket reduces to a champion");

    // Losers bracket: open with the first dropper wave paired internally,
    // then alternate absorbing the next wave (reversed) with internal rounds.
    let mut eliminated_chrono: Vec<Vec<usize>> = Vec::new();
    let mut lb_round = 0u32;
    let opening = play_lb_round(
        group,
        judge,
        &adjacent_pairs(&droppers[0]),
        lb_round,
        &mut accumulated,
    )?;
    matches.extend(opening.records);
    eliminated_chrono.push(opening.eliminated);
    let mut survivors = opening.winners;
    lb_round += 1;

    for wave in &droppers[1..] {
        let pairs: Vec<(Option<usize>, Option<usize>)> = survivors
            .iter()
            .copied()
            .zip(wave.iter().rev().copied())
            .collect();
        let major = play_lb_round(group, judge, &pairs, lb_round, &mut accumulated)?;
        matches.extend(major.records);
        eliminated_chrono.push(major.eliminated);
        survivors = major.winners;
        lb_round += 1;

        if survivors.len() > 1 {
            let minor = play_lb_round(
                group,
                judge,
                &adjacent_pairs(&survivors),
                lb_round,
                &mut accumulated,
            )?;
            matches.extend(minor.records);
            eliminated_chrono.push(minor.eliminated);
            survivors = minor.winners;
            lb_round += 1;
        }
    }
    debug_assert_eq!(survivors.len(), 1);
    let lb_champion = survivors[0].expect("a real trajectory survives the losers bracket");

    // Grand final, played once.
    let final_records = play(
        group,
        judge,
        Topology::DoubleElim,
        &[Planned {
            a: wb_champion,
            b: lb_champion,
            phase: Phase::GrandFinal,
            round: 0,
            slot: 0,
        }],
    )?;
    let rec = &final_records[0];
    accumulated[wb_champion] += rec.scores.score_a;
    accumulated[lb_champion] += rec.scores.score_b;
    let champion = if rec.winner == group.trajectories[wb_champion].id {
        wb_champion
    } else {
        lb_champion
    };
    let runner_up = if champion == wb_champion {
        lb_champion
    } else {
        wb_champion
    };
    matches.extend(final_records);

    let mut tiers_chrono: Vec<Vec<usize>> = eliminated_chrono
        .into_iter()
        .filter(|tier| !tier.is_empty())
        .collect();
    tiers_chrono.push(vec![runner_up]);
    tiers_chrono.push(vec![champion]);
    tiers_chrono.reverse();
    let (order, tiers, ties) = rank_by_tiers(&tiers_chrono, &accumulated);
    Ok(build_result(
        group,
        Topology::DoubleElim,
        seed,
        &order,
        &tiers,
        &accumulated,
        matches,
        &ties,
    ))
}
