use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid insertion code: {0}")]
    InvalidCode(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("value {value} out of range: {reason}")]
    OutOfRange { value: f64, reason: String },

    #[error("size {n} exceeds the enumeration limit {limit}")]
    SizeLimit { n: usize, limit: usize },

    #[error("degenerate instance: {0}")]
    DegenerateInstance(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("wave depth error: {0}")]
    Depth(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("unsupported instance format: {0}")]
    UnsupportedFormat(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("search failure: {0}")]
    SearchFailure(String),

    #[error("usage error: {0}")]
    Usage(String),
}

impl Error {
    pub(crate) fn out_of_range(value: impl Into<f64>, reason: impl Into<String>) -> Self {
        Error::OutOfRange {
            value: value.into(),
            reason: reason.into(),
        }
    }
}
