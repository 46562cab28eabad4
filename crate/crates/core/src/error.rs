use crate::distributions::ParseError;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A distribution parameter violates its domain (scale ≤ 0, weight
    /// outside the unit interval, ...).
    #[error("invalid parameter for {family}: {reason}")]
    InvalidParameter {
        family: &'static str,
        reason: String,
    },

    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The sample is too small for the requested statistic.
    #[error("sample size {got} too small: need at least {need} observations")]
    SampleSize { need: usize, got: usize },

    /// Zero is not strictly inside the convex hull of the pseudo-values, so
    /// the empirical-likelihood multiplier does not exist.
    #[error("convex hull violation: values lie in [{min}, {max}], which does not straddle zero")]
    HullViolation { min: f64, max: f64 },

    /// An iterative numeric procedure failed to converge.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// A statistic is undefined on this sample (e.g. zero spread).
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    /// A family-specification string could not be parsed.
    #[error("{0}")]
    Parse(#[from] ParseError),
}

pub type Result<T> = std::result::Result<T, Error>;
