use std::io;

use thiserror::Error;

/// Errors produced by the library.
///
/// The variants are grouped by how a caller should react: a violated
/// precondition means the request itself is malformed, a resource error means
/// the request is well-formed but beyond the configured caps.
#[derive(Debug, Error)]
pub enum Error {
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    #[error("invalid digit data: {0}")]
    Format(String),

    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("no admissible digit at step {step}: best branch measure {best} does not exceed threshold {threshold}")]
    NoAdmissibleDigit {
        step: u32,
        best: String,
        threshold: String,
    },

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn precondition<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Precondition(msg.into()))
}

pub(crate) fn resource<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::ResourceCap(msg.into()))
}
