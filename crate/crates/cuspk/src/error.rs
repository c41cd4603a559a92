use thiserror::Error;

/// Errors surfaced by the library.
///
/// `Disagreement` is the interesting one: it means two independently
/// computed answers for the same group differ, which a correct build
/// should never produce.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("set or field mismatch: {0}")]
    Mismatch(String),

    /// An internal exactness check failed (inexact division while solving
    /// ghost equations, a complex whose boundaries do not compose to zero,
    /// an elimination that lost elements, ...). Signals a bug, not bad input.
    #[error("integrity failure: {0}")]
    Integrity(String),

    #[error("cache: {0}")]
    Cache(String),

    #[error("disagreement: {0}")]
    Disagreement(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }

    pub fn integrity(msg: impl Into<String>) -> Self {
        Error::Integrity(msg.into())
    }
}
