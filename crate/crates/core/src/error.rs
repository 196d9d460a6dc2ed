use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent inputs (bad indices, dimension mismatches, ranges).
    #[error("invalid input: {0}")]
    Input(String),

    /// The operation is not defined for this configuration.
    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Out-of-order use of the learning recommender's act/reward cycle.
    #[error("protocol violation: {0}")]
    Protocol(String),

    #[error("deviation probe failed: {0}")]
    Probe(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn input(message: impl Into<String>) -> Self {
        Error::Input(message.into())
    }
}
