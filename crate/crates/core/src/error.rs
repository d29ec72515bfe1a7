use thiserror::Error;

use crate::form::AxiomReport;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("quintuple set is not a pentaform:\n{0}")]
    NotAPentaform(AxiomReport),

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("resource cap exceeded: {what} needs {needed} profiles, cap is {cap}")]
    ResourceCap {
        what: String,
        needed: u128,
        cap: u128,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("missing utility model: {0}")]
    MissingModel(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
