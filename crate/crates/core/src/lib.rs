//! Tests for distributional symmetry of a univariate sample.
//!
//! The toolkit is built around a departure measure `Δ` that equals zero
//! exactly when the underlying distribution is symmetric about some center:
//! two weighted entropy integrals (a cumulative residual form and a
//! cumulative past form) coincide under symmetry, and their difference
//! reduces to `Δ = ½·E[max(X₁,X₂,X₃) + min(X₁,X₂,X₃) − 2X₁]`.
//!
//! Modules:
//! - [`distributions`]: sampling/evaluation of the null and skew-alternative
//!   families, special functions, and reproducible random streams.
//! - [`characterization`]: population values of the entropy integrals and of
//!   `Δ` by adaptive quadrature on the quantile scale.
//! - [`estimator`]: the degree-3 U-statistic `Δ̂ₙ` (kernel, naive oracle, and
//!   an O(n) order-statistics closed form).
//! - [`jel`]: jackknife pseudo-values, the empirical-likelihood multiplier
//!   solve, and the JEL/AJEL ratio tests with χ²₁ calibration.
//! - [`scr_bootstrap`]: bootstrap and null-simulated critical regions.
//! - [`competitors`]: the SGN, CM and MGG comparison statistics.
//! - [`simulation`]: a reproducible Monte Carlo size/power harness.

pub mod characterization;
pub mod competitors;
pub mod distributions;
mod error;
pub mod estimator;
pub mod jel;
pub(crate) mod quad;
pub mod scr_bootstrap;
pub mod simulation;

pub use error::{Error, Result};
