use std::io;

use thiserror::Error;

/// Errors produced by the restoration pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid argument or dimension mismatch.
    #[error("argument error: {0}")]
    Argument(String),
    /// A dense materialization would exceed the size guard.
    #[error("capacity error: {0}")]
    Capacity(String),
    /// Numerical failure (non-finite iterate, failed factorization, no convergence).
    #[error("numeric error: {0}")]
    Numeric(String),
    /// Malformed input file.
    #[error("format error at byte {offset}: {msg}")]
    Format { offset: usize, msg: String },
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    pub(crate) fn format(offset: usize, msg: impl Into<String>) -> Self {
        Error::Format {
            offset,
            msg: msg.into(),
        }
    }
}

/// Largest dense matrix side (rows of an `N x N` operator) we agree to materialize.
pub const DENSE_LIMIT: usize = 4096;

pub(crate) fn check_dense(n: usize, what: &str) -> Result<()> {
    if n > DENSE_LIMIT {
        Err(Error::Capacity(format!(
            "{what}: dimension {n} exceeds dense limit {DENSE_LIMIT}"
        )))
    } else {
        Ok(())
    }
}
