//! Exact truncated-series engine for interpolated q-multiple zeta values.
//!
//! * [`series`]: rationals and sparse truncated multivariate series.
//! * [`qkit`]: q-integers, q-shifted factorials, q-Stirling numbers, binomials.
//! * [`mzv`]: indices, brute-force values and generating functions.
//! * [`hypergeom`]: closed forms built from basic hypergeometric series.

pub mod error;
pub mod hypergeom;
pub mod mzv;
pub mod qkit;
pub mod series;

pub use error::{Error, Result};
pub use series::{Layout, Mono, Rational, TMode, TruncSeries, TruncSpec, Var};
