//! First-passage functionals of mean-zero random walks killed on `{<= 0}`.
//!
//! * [`increments`]: step distributions, moments, span, peakedness `V`.
//! * [`exact`]: dynamic programming on the integer lattice plus a
//!   Wiener-Hopf solver for ladder heights, overshoots and renewal functions.
//! * [`approx`]: the reflection formula, the overshoot correction and the
//!   constant-free bound envelopes.
//! * [`montecarlo`]: seeded, worker-count independent simulation.
//! * [`verify`]: grid checks of the explicit inequalities, constant estimates
//!   and rate fits.

pub mod approx;
pub mod error;
pub mod exact;
pub mod increments;
pub mod montecarlo;
pub mod output;
pub mod verify;

pub use error::{Error, Result};
pub use increments::{
    ContinuousIncrement, Family, IncrementModel, LatticeIncrement, MomentSummary, Peakedness,
};

/// Library version, recorded in every CSV header.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
