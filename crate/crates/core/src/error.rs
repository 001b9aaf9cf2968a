use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(String, String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("truncation exceeded: {0}")]
    TruncationExceeded(String),
    #[error("not a cycle")]
    NotACycle,
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
