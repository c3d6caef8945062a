use thiserror::Error;

use crate::linalg::StatisticsKind;

/// Errors raised anywhere in the counting pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FcsError {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("matrix of size {size} exceeds the limit of {limit} for {what}")]
    Size {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("statistics kind {0:?} has no S± functional")]
    UnsupportedKind(StatisticsKind),

    #[error("matrix is not Hermitian: max |M - M†| = {deviation:e} exceeds tolerance {tol:e}")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("value out of range: {0}")]
    Range(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("quadrature did not converge: node doubling {from}→{to} changed an entry by {change:e} (limit {limit:e})")]
    Convergence {
        from: usize,
        to: usize,
        change: f64,
        limit: f64,
    },

    #[error("consistency check failed: {identity} (residual {residual:e}, tolerance {tol:e})")]
    Consistency {
        identity: String,
        residual: f64,
        tol: f64,
    },

    #[error("degenerate input: S±[I] = {value:e} vanishes for {kind:?} (linearly dependent modes)")]
    DegenerateInput { kind: StatisticsKind, value: f64 },

    #[error("inequality violated in the uncorrelated regime: {0}")]
    InequalityViolation(String),
}

pub type Result<T> = std::result::Result<T, FcsError>;
