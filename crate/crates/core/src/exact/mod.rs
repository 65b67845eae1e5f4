//! Exact computations for integer-valued walks.
//!
//! Finite-horizon quantities come from forward convolution of the killed
//! measure ([`walk`], [`table`]). Open-horizon quantities (overshoot laws,
//! ladder heights, Green's function, renewal function) come from the roots of
//! the characteristic polynomial ([`fluctuation`]); the truncated DP versions
//! are kept as a fallback and as an independent cross-check.

pub mod fluctuation;
pub mod ladder;
mod poly;
pub mod renewal;
pub mod table;
pub mod walk;

pub use fluctuation::Fluctuation;
pub use ladder::{ladder_stats, ladder_stats_dp, overshoot_scan, LadderStats, OvershootScan};
pub use renewal::{renewal_tables, renewal_tables_truncated, RenewalTable};
pub use table::{
    expected_min_tau, stopping_profile, survival_evolve, survival_prob, tail_prob,
    StoppingProfile, SurvivalTable, MEMORY_BUDGET_CELLS,
};
pub use walk::{pairwise_sum, FreeWalk, KilledWalk};
