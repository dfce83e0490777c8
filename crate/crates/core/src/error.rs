use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A corpus or document violates a structural invariant.
    #[error("invalid document `{doc_id}`: {reason}")]
    Validation { doc_id: String, reason: String },

    /// Malformed input file contents.
    #[error("{path}:{line}: {reason}")]
    Parse {
        path: String,
        line: usize,
        reason: String,
    },

    #[error("failed to access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Inputs are individually valid but do not fit together
    /// (uid sets, class lists, shapes).
    #[error("{0}")]
    Mismatch(String),

    /// A request that cannot be satisfied for the given data or parameters.
    #[error("{0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn validation(doc_id: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            doc_id: doc_id.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn parse(path: impl Into<String>, line: usize, reason: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn mismatch(msg: impl Into<String>) -> Self {
        Error::Mismatch(msg.into())
    }
}
