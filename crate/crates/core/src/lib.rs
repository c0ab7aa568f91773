//! Exact Frobenius numbers for small generator sets, the continued-fraction
//! statistics that govern their large-`N` behaviour, and the analytic limit
//! laws (the four-parameter law `G`, the dilogarithm CDF and the density of
//! `F(a)/sqrt(a1 a2 a3)`) together with the counting machinery used to check
//! them.
//!
//! Module map:
//!
//! * [`cf`]: rationals, continued fractions, convergents, modular helpers.
//! * [`frobenius`]: Apéry/shortest-path, circle-rotation and sieve algorithms.
//! * [`ensemble`]: seeded samplers, per-sample statistics, KS distances.
//! * [`analytic`]: dilogarithm, `G`, limit CDF, density `p(t)` and quadrature.
//! * [`counting`]: unimodular matrices, counting sums, Kloosterman sums.
//! * [`verify`]: named verification suites producing machine-readable reports.

pub mod analytic;
pub mod cf;
pub mod counting;
pub mod ensemble;
mod error;
pub mod frobenius;
pub mod verify;

pub use cf::{ContinuedFraction, ConvergentTable, Rational};
pub use error::{Error, Result};
pub use frobenius::IntTuple;

/// Version tag written into every CSV header and JSON report.
pub const SCHEMA_TAG: &str = "frobenius-limit v1";
