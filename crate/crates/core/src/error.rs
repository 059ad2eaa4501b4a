use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("point set is empty")]
    EmptySet,
    #[error("points must have dimension at least 1")]
    ZeroDimension,
    #[error("non-finite coordinate at position {0}")]
    NonFinite(usize),
    #[error("epsilon must lie in (0, 1), got {0}")]
    InvalidEpsilon(f64),
    #[error("index {index} out of range for a set of {len} points")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("key `{key}`: {message}")]
    Format { key: String, message: String },
}

impl Error {
    pub(crate) fn format(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Format {
            key: key.into(),
            message: message.into(),
        }
    }
}
