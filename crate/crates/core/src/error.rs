//! Crate-wide error type.

use std::path::PathBuf;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by the pipeline stages.
///
/// Invalid caller input (shape mismatches, out-of-range parameters,
/// malformed records) is reported as [`Error::Invalid`] or one of the more
/// specific parse variants; it is never promoted to a panic.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Invalid argument or inconsistent input data.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A file could not be read or written.
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A line-oriented file (JSONL) failed to parse.
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        /// 1-based line number.
        line: usize,
        msg: String,
    },

    /// A configuration file or override failed to parse or validate.
    #[error("config: {0}")]
    Config(String),

    /// A binary artifact (heatmap file, raw frame stream, PNG) is malformed.
    #[error("{path}: {msg}")]
    Corrupt { path: PathBuf, msg: String },
}

impl Error {
    /// Shorthand for [`Error::Invalid`] with a formatted message.
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    /// Attach a path to an I/O error.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Shorthand for [`Error::Corrupt`].
    pub fn corrupt(path: impl Into<PathBuf>, msg: impl Into<String>) -> Self {
        Error::Corrupt {
            path: path.into(),
            msg: msg.into(),
        }
    }
}
