//! Mean absolute deviation about the mean: estimators, the exact
//! finite-sample expansion of `sample_mad − oracle_mad`, asymptotic limit
//! models (Gaussian, Gaussian-functional with an atom at the mean, and
//! α-stable with 1 < α < 2), long-run covariance estimation for strongly
//! mixing series, and a reproducible Monte Carlo harness.
//!
//! The crate is `no_std` (with `alloc`); all IO, file formats and the CLI
//! live in the companion `mad-cli` crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod expansion;
pub mod gof;
pub mod limit;
pub mod longrun;
pub mod mad;
pub mod rng;
pub mod series;
pub mod simulate;
pub mod special;
mod sum;

pub use error::{Error, Result};
pub use series::{EcdfSummary, Series};
