use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum GrnfError {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("dimension limit exceeded: {what} = {value} (max {max})")]
    DimensionLimit {
        what: &'static str,
        value: usize,
        max: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("importance weight undefined: {0}")]
    ImportanceWeight(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("missing file: {0}")]
    MissingFile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, GrnfError>;
