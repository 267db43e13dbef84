use thiserror::Error;

/// Errors raised by the library.
///
/// `Input` covers malformed arguments (wrong dimension, empty sets, bad
/// grids). `Domain` covers numerically undefined requests: coincident points
/// under a singular kernel, exponents outside `(0, d)`, cut-locus logarithms.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("domain error: {0}")]
    Domain(String),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Process exit code used by the command line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) => 1,
            Error::Domain(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
