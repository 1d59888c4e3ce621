//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by constructors, metric evaluation, and the benchmark
/// harness.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// Input vectors are empty where at least one sample is required.
    #[error("input is empty")]
    EmptyInput,

    /// Paired input vectors differ in length.
    #[error("length mismatch: {left} vs {right} ({context})")]
    LengthMismatch {
        left: usize,
        right: usize,
        context: &'static str,
    },

    /// A value that must be finite is NaN or infinite.
    #[error("non-finite value in {field} at index {index}")]
    NonFinite { field: &'static str, index: usize },

    /// A predicted standard deviation is zero or negative.
    #[error("sigma must be strictly positive, got {value} at index {index}")]
    NonPositiveSigma { value: f64, index: usize },

    /// An interval has its lower bound above its upper bound.
    #[error("lower bound exceeds upper bound at index {index}")]
    IntervalOrder { index: usize },

    /// A probability parameter lies outside the open interval (0, 1).
    #[error("{name} must lie in (0, 1), got {value}")]
    ProbabilityOutOfRange { name: &'static str, value: f64 },

    /// A configuration value is invalid (bin counts, eta, target range, ...).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two reports that must share a configuration do not.
    #[error("configuration mismatch: {0}")]
    ConfigMismatch(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
