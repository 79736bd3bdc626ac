//! Dyadic cascade measures with prescribed partition-function behavior,
//! Rényi partition functions, Gaussian-filtered Lq norms, and dimension
//! estimators.
//!
//! The crate builds Borel probability measures on \[0,1\] by multiplicative
//! cascades whose per-level splitting weights are solved from a weight
//! sequence `a_n`, evaluates the partition function `S^q(eps)` (sum of
//! q-th powers of cell masses over a width-eps grid) both in closed form
//! on dyadic scales and by direct enumeration / bucketing, smooths
//! measures with scaled Gaussians and compares `eps^{q-1} ||g_eps * mu||_q^q`
//! against `S^q(eps)` with explicitly computed envelope constants, and
//! estimates dimensions from log-log tables by long secants, subsequence
//! limits, least-squares best-fit slopes (four equivalent discrete
//! formulas plus the continuous-window form), and Matuszewska-index
//! window sweeps.
//!
//! Entry points by task:
//!
//! - build a measure: [`measure::WeightProfile`], [`measure::build_cascade`]
//! - partition tables: [`partition::build_table`], [`partition::partition_enumerate`]
//! - Gaussian filtering: [`gaussfilter::lq_norm_q`], [`gaussfilter::check_ratio_bound`]
//! - estimators: [`slopes::secant_estimate`], [`slopes::lsq_discrete`],
//!   [`slopes::matuszewska_sweep`], [`slopes::dimension_report`]
//! - named profiles and exact checkpoint arithmetic: [`profiles`]
//!
//! Everything is deterministic: no clocks, no RNG, and CSV output uses
//! 17-significant-digit formatting so repeated runs are byte-identical.

// negated comparisons like `!(q > 0.0)` are NaN guards; do not "simplify"
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod csvio;
pub mod error;
pub mod gaussfilter;
pub mod measure;
pub mod partition;
pub mod profiles;
pub mod slopes;

pub use error::{Error, Result};
