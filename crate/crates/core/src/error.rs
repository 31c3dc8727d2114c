use thiserror::Error;

/// Errors produced by the learning engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input violated an operation's precondition.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A requested value lies outside the supported range.
    #[error("out of range: {0}")]
    Range(String),

    /// A recursion produced a non-finite coefficient.
    #[error("iteration diverged at step {iteration}")]
    Divergence { iteration: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn argument(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}
