//! Logarithmic (geodesic) geometry of the strictly positive cone `(0, ∞)ⁿ` and
//! the statistics built on it.
//!
//! Distances between positive vectors are measured by
//! `d(x, y)² = Σ (ln x(i) − ln y(i))²`. Under this metric the best constant
//! predictor of a positive random variable is its geometric mean
//! `exp(E[ln X])`, conditional expectations become `exp(E[ln Y | G])`, and the
//! Markowitz problem is posed on log-returns.
//!
//! Modules:
//! - [`cone`]: points, tangent vectors, geodesics, exponential map, group action.
//! - [`lmoments`]: l-means, l-covariances, centering and power-law predictors.
//! - [`discrete`]: finite probability spaces, l-conditional expectation, l-martingales.
//! - [`limit`]: seeded Monte Carlo checks of the log-scale LLN and CLT.
//! - [`portfolio`]: log-metric mean-variance optimization.

// `!(x > 0.0)` is used on purpose so NaN lands in the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cone;
pub mod discrete;
mod error;
pub mod limit;
mod linalg;
pub mod lmoments;
pub mod portfolio;

pub use error::{Error, Result};

/// Library version, echoed in machine-readable reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
