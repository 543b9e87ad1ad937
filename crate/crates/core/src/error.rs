use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("empty input: {0}")]
    Empty(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown node id {0}")]
    UnknownNode(usize),

    #[error("attribute file is missing {} node(s): {}", .0.len(), .0.join(", "))]
    MissingNodes(Vec<String>),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value {value} at row {row}, column {col}")]
    NonFinite { row: usize, col: usize, value: f64 },

    #[error("requested {requested} non-edges but only {available} are available")]
    InsufficientNonEdges { requested: usize, available: usize },

    #[error("clusters {0} and {1} have coincident centroids")]
    CoincidentCentroids(usize, usize),

    #[error("malformed model file: {0}")]
    Format(String),

    #[error("input not found: {}", .0.display())]
    MissingInput(PathBuf),

    #[error("invalid config: {0}")]
    Config(String),

    /// An input file's digest no longer matches the one a manifest recorded.
    #[error("{} changed since it was recorded (sha256 {expected}, now {found})", .path.display())]
    DigestMismatch {
        path: PathBuf,
        expected: String,
        found: String,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Whether the error stems from how the tool was invoked (bad flags,
    /// config, or missing inputs) rather than from a failure while running.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidArgument(_) | Error::MissingInput(_) | Error::Config(_) | Error::DigestMismatch { .. }
        )
    }

    /// A missing file becomes [`Error::MissingInput`] so callers can treat
    /// it as a usage error.
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        if source.kind() == std::io::ErrorKind::NotFound {
            return Error::MissingInput(path.into());
        }
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
