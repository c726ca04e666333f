use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The input violates an operation's domain (bad edge-id, loop where
    /// none is allowed, malformed path, graph mismatch, ...).
    #[error("invalid input: {0}")]
    InputDomain(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A brute-force or recursion engine refused an input above its size cap.
    #[error("{what}: {actual} edges exceeds the cap of {cap}")]
    ResourceLimit {
        what: &'static str,
        cap: usize,
        actual: usize,
    },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error(
        "click sequence rejected at position {position}: vertex {vertex} is not a clickable source"
    )]
    ClickSequence { position: usize, vertex: usize },

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    /// An internal invariant did not hold. Always a bug.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::InputDomain(msg.into())
    }
}
