//! Monte Carlo verification: exact increment samplers (NIG, VG, Brownian),
//! an inversion sampler for Meixner, and estimators for the duality identity
//! and both martingale properties.
//!
//! Paths are grouped in blocks of [`BLOCK_PATHS`]; block `k` uses random
//! stream `k` of the configured seed, blocks run in parallel and are merged
//! in index order, so results are reproducible bit for bit.

mod engine;
mod meixner;
mod payoff;
mod sampler;
mod stats;

pub use engine::{
    check_duality_moments, duality_test, martingale_test, mc_expectation, mgf_estimates, simulate_path,
    terminal_moments, DualityOutcome, McConfig, McRow, BLOCK_PATHS,
};
pub(crate) use engine::run_blocks_dyn;
pub use meixner::{MeixnerTable, TABLE_POINTS};
pub use payoff::PayoffDescriptor;
pub use sampler::{sample_increment, IncrementSampler};
pub use stats::Estimate;
pub(crate) use stats::{z_score, Stats};
