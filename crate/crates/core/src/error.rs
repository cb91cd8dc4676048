use thiserror::Error;

/// Errors produced across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("dimension {n} out of range for {what} (allowed {min}..={max})")]
    DimensionOutOfRange {
        what: &'static str,
        n: usize,
        min: usize,
        max: usize,
    },

    #[error("matrix is not invertible over F2")]
    NotInvertible,

    #[error("spectrum does not come from a +/-1 valued function")]
    NotBoolean,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("linear program solver did not converge: {0}")]
    Solver(String),

    #[error("sampling distribution is degenerate (zero spectral norm)")]
    DegenerateDistribution,

    #[error("no sign representation within distance {delta} after {attempts} attempts")]
    SamplerExhausted { delta: f64, attempts: u32 },

    #[error("malformed payload at bit {pos}: {msg}")]
    Decode { pos: usize, msg: String },

    #[error("parse error at line {line}, column {column}: {msg}")]
    Parse {
        line: usize,
        column: usize,
        msg: String,
    },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("refused: {0}")]
    Refused(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
