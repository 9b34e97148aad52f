use thiserror::Error;

/// Errors raised by kernel evaluation, filtering and the experiment harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("vector must have at least one entry")]
    EmptyVector,

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("real kernel received a vector with nonzero imaginary part at index {index}")]
    ComplexArgument { index: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("kernel {kernel} cannot be used with {context}")]
    KernelMismatch { kernel: &'static str, context: String },

    #[error("matrix is not Hermitian: deviation {deviation:e} exceeds {tol:e}")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
