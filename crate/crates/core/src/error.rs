use std::io;

use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum SscError {
    /// A caller-supplied value violates an operation's precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The input is well-formed but carries no structure to work with
    /// (for example an all-zero bi-adjacency matrix).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A dense allocation guard was exceeded.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, SscError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(SscError::InvalidInput(msg.into()))
}
