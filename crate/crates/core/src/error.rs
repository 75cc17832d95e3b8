use std::path::PathBuf;

/// Errors raised anywhere in the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A file did not parse under the requested format.
    #[error("malformed {format} data: {reason}")]
    Format { format: &'static str, reason: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// An input is smaller than the operation's documented minimum.
    #[error("{what}: got {got}, need at least {need}")]
    TooSmall {
        what: &'static str,
        got: usize,
        need: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A numerical procedure could not produce a defined result.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(format: &'static str, reason: impl Into<String>) -> Self {
        Error::Format {
            format,
            reason: reason.into(),
        }
    }

    /// True for errors caused by an input violating a metric's size or
    /// shape precondition (as opposed to I/O or parse failures).
    pub fn is_precondition(&self) -> bool {
        matches!(self, Error::TooSmall { .. } | Error::DimensionMismatch(_))
    }
}
