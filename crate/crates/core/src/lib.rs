//! Tournament-based relative ranking for agent trajectories.
//!
//! A group of candidate trajectories for one query is ranked by playing
//! pairwise matches under a judge backend and a tournament topology, and the
//! resulting ranks are converted to standardized advantages suitable for
//! policy-gradient training. Five topologies trade comparison budget against
//! ranking fidelity, from full round-robin down to a single anchor pass.
//!
//! Everything is deterministic given the group, the judge seed, and the
//! topology seed: simulated noise is keyed to stable match keys, rounds are
//! evaluated concurrently but applied in bracket order, and replay logs
//! reproduce past runs exactly.

pub mod advantage;
pub mod error;
pub mod judge;
pub mod rng;
pub mod tournament;
pub mod trajectory;

#[cfg(test)]
pub(crate) mod test_support;

pub use advantage::{
    arena_loss, grpo_pointwise_advantages, quantile_rewards, ranks_to_advantages, standardize,
    AdvantageVector, LossInputs, DEFAULT_BETA, DEFAULT_CLIP_EPSILON, DEFAULT_EPSILON,
};
pub use error::{Error, Result};
pub use judge::{build_judge, Judge, JudgeKind, JudgeSpec, NoiseModel, ScorePair};
pub use tournament::{
    anchor_rank, comparison_budget, default_swiss_rounds, double_elim, round_robin, run_topology,
    seeded_single_elim, swiss, swiss_with_standings, MatchRecord, Phase, RankingResult,
    SwissStanding, Topology,
};
pub use trajectory::{validate_group, Rubric, Step, Trajectory, TrajectoryGroup, Violation};
