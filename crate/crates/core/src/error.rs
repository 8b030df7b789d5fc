//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Operator constructors need at least a two-dimensional space.
    #[error("invalid dimension: cutoff {0} is too small to hold the operator")]
    InvalidDimension(usize),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid parameter {name} = {value}: requires {requirement}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    #[error(
        "truncation overflow: evolution leaked {leakage:.3e} of the norm past the cutoff \
         (threshold {threshold:.3e}); increase the cutoff"
    )]
    TruncationOverflow { leakage: f64, threshold: f64 },

    #[error("generator is not anti-Hermitian (max deviation {deviation:.3e})")]
    NotAntiHermitian { deviation: f64 },

    #[error("grid coverage: {0}")]
    GridCoverage(String),

    #[error("grid spacing {h:.3e} too coarse for squeezing r = {r}: need h <= {required:.3e}")]
    GridResolution { h: f64, r: f64, required: f64 },

    #[error("outcome m = {0} has zero probability")]
    InvalidOutcome(i64),

    #[error("lossy number downshift by {shift}: {lost:.3e} of the population sits below the shift")]
    LossyDownshift { shift: i64, lost: f64 },

    #[error("state has zero norm")]
    ZeroNorm,
}
