//! Simulation laboratory for the tournament ranking engine.
//!
//! Provides synthetic trajectory groups with known latent utilities, a
//! signal-to-noise estimator for pointwise judges, small statistics helpers,
//! and two reproducible Monte Carlo experiments: topology fidelity versus
//! comparison budget, and discriminative collapse of pointwise scoring under
//! shrinking intra-group quality spread.
//!
//! Every experiment derives all randomness from a single master seed, so
//! reports are bit-for-bit reproducible regardless of worker concurrency.

pub mod collapse;
pub mod fidelity;
pub mod generate;
pub mod snr;
pub mod stats;

pub use collapse::{run_collapse_experiment, CollapseReport, CollapseRow};
pub use fidelity::{run_fidelity_experiment, FidelityReport, TopologySummary};
pub use generate::{generate_group, AnchorPolicy, GroupSpec};
pub use snr::{estimate_snr, SnrReport, DEFAULT_REPETITIONS};
pub use stats::{kendall_tau, mean, pearson, population_std};
