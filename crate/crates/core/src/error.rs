use thiserror::Error;

/// Errors produced by the coding, decoding, optimization and simulation layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("value {value} is outside the symbol range [{min}, {max}]")]
    Range { value: i64, min: i64, max: i64 },

    #[error("shape mismatch: expected {expected}, found {found}")]
    Shape { expected: usize, found: usize },

    #[error("codeword {0} is not in the codebook")]
    NotFound(String),

    #[error("symbols {first} and {second} share the same codeword")]
    DuplicateCodeword { first: usize, second: usize },

    #[error("invalid symbol space: {0}")]
    InvalidSpace(String),

    #[error("invalid loss: {0}")]
    InvalidLoss(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unsupported loss kind for this operation: {0}")]
    UnsupportedLoss(&'static str),

    #[error("empty sample set")]
    EmptySample,

    #[error("search failed: {0}")]
    SearchFailed(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
