use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A numerical or structural precondition failed inside `op`.
    #[error("{op}: {msg}")]
    Domain { op: &'static str, msg: String },
    /// Text input could not be parsed.
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain { op, msg: msg.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
