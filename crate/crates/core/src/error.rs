use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error(transparent)]
    Stream(#[from] io::Error),

    #[error("csv error in {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("unknown node identifier `{0}`")]
    UnknownNode(String),

    #[error("nodes {from} and {to} are not adjacent")]
    NotAdjacent { from: String, to: String },

    #[error("subgraphs were built from different knowledge graphs")]
    GraphMismatch,

    #[error("invalid snapshot: {0}")]
    Snapshot(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("empty seed set")]
    EmptySeedSet,

    /// Malformed or inconsistent input data, with a location hint.
    #[error("{location}: {message}")]
    Data { location: String, message: String },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Error::Csv {
            path: path.into(),
            source,
        }
    }

    pub fn data(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Data {
            location: location.into(),
            message: message.into(),
        }
    }

    /// True when the failure stems from user input (bad files, bad flags)
    /// rather than an internal fault.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Stream(_))
    }
}
