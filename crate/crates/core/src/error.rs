use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    /// A binary or text file violated its format. `record` is 1-based; 0 means
    /// the file header.
    #[error("{what} at record {record} (byte offset {offset})")]
    Format { what: String, record: usize, offset: u64 },

    /// A line-oriented list file (`.rel`, `.pred`, `.cand`) was rejected.
    #[error("line {line}: {what}")]
    List { what: String, line: usize },

    #[error("invalid item id {id:?}: {reason}")]
    InvalidId { id: String, reason: &'static str },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unknown item id {0:?}")]
    UnknownId(String),

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(what: impl Into<String>, record: usize, offset: usize) -> Self {
        Error::Format {
            what: what.into(),
            record,
            offset: offset as u64,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
