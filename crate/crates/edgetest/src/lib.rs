//! Hypothesis tests for edge presence in undirected graphical models.
//!
//! An edge between variates `i` and `j` corresponds to a non-zero entry
//! `Θ[i][j]` of the precision matrix `Θ = Σ⁻¹`. This crate estimates `Σ`
//! with an unbiased U-statistic, bounds the joint fluctuation of the
//! estimate through the covariance of its entries, propagates that bound
//! to the precision matrix with Weyl's eigenvalue inequality, and rejects
//! `Θ[i][j] = 0` only when `|Θ̂[i][j]|` clears a conservative threshold.
//! The whole pipeline is linear in the number of samples.
//!
//! The crate also ships the classical partial-correlation baseline
//! ([`fisher`]) and a deterministic simulation harness ([`simulate`])
//! producing calibration, power and convergence reports.

pub mod covcov;
pub mod error;
pub mod fisher;
pub mod moments;
pub mod sample;
pub mod simulate;
pub mod threshold;
pub mod ustat;

pub use error::{Error, Result};
pub use sample::SampleMatrix;
