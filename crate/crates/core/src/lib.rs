//! Asymptotic relative efficiencies between Pearson's R, Spearman's S and
//! Kendall's T for bivariate normal samples.
//!
//! - [`quadrature`]: adaptive Gauss–Kronrod integration.
//! - [`corrmath`]: asymptotic means and variances of R, S, T.
//! - [`are_bounds`]: the pairwise efficiencies, their endpoint expansions,
//!   the second-difference functions `q_a` and the quadratic/quartic bounds.
//! - [`reduction`]: the derivative chain for the R/T pair and numeric
//!   sign and monotonicity classification.
//! - [`stats_mc`]: finite-sample estimators and Monte Carlo validation.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod are_bounds;
pub mod corrmath;
pub mod error;
pub mod jet;
#[allow(clippy::excessive_precision)]
pub mod quadrature;
pub mod reduction;
pub mod roots;
pub mod stats_mc;

pub use error::{Error, Result};
