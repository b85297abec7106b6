//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A requested variate index is outside `[0, p)`.
    #[error("variate index {index} out of range for p = {p}")]
    IndexOutOfRange { index: usize, p: usize },

    /// The input has no rows at all.
    #[error("empty input: sample matrix has no rows")]
    EmptyInput,

    /// Fewer observations than the operation requires.
    #[error("insufficient data: n = {n}, need at least {required}")]
    InsufficientData { n: usize, required: usize },

    /// A moment was requested that was never accumulated.
    #[error("moment E[{0}] was not requested at build time")]
    MissingMoment(String),

    /// The sample matrix contains a non-finite value.
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    /// The covariance estimate is numerically singular.
    #[error("covariance estimate is singular (smallest eigenvalue {alpha_min:e})")]
    SingularCovariance { alpha_min: f64 },

    /// A diagonal entry of the precision estimate is not positive.
    #[error("degenerate precision matrix: diagonal entry {index} is {value}")]
    DegeneratePrecision { index: usize, value: f64 },

    /// The stated bounded support is empty or inverted.
    #[error("invalid support: require b > a, got a = {a}, b = {b}")]
    InvalidSupport { a: f64, b: f64 },

    /// A supplied matrix is not symmetric positive definite.
    #[error("matrix is not symmetric positive definite: {0}")]
    NotPositiveDefinite(String),

    /// Random correlation generation kept hitting ill-conditioned draws.
    #[error("failed to generate a well-conditioned correlation matrix in {attempts} attempts")]
    GenerationFailure { attempts: usize },

    /// A configuration value is outside its legal range.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Writing a report to disk failed.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
