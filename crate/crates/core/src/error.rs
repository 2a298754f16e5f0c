use std::io;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    Length { expected: usize, found: usize },

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("invalid alignment: {0}")]
    InvalidAlignment(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("capacity exceeded ({limit}): {context}")]
    Capacity { limit: u64, context: String },

    #[error("metric mismatch: {0}")]
    MetricMismatch(String),

    #[error("mode mismatch: {0}")]
    ModeMismatch(String),

    #[error("unsupported query length {0}")]
    UnsupportedLength(usize),

    #[error("unknown curve id `{0}`")]
    UnknownCurve(String),

    #[error("duplicate curve id `{0}`")]
    DuplicateCurve(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("corrupt file: {0}")]
    Corrupt(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}
