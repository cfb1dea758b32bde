use std::path::PathBuf;

/// Errors returned by this crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid node id '{0}': expected 5 decimal digits")]
    InvalidNodeId(String),
    #[error("unknown node '{0}'")]
    UnknownNode(String),
    #[error("duplicate node '{0}'")]
    DuplicateNode(String),
    #[error("self-loop on node '{0}'")]
    SelfLoop(String),
    #[error("duplicate edge {0} -> {1}")]
    DuplicateEdge(String, String),
    #[error("edge {from} -> {to} has non-positive weight {mu}")]
    NonPositiveWeight { from: String, to: String, mu: f64 },
    #[error("edge {from} -> {to} joins co-located centroids (zero distance)")]
    ZeroDistance { from: String, to: String },
    #[error("node '{0}' has no coordinates")]
    MissingCoordinates(String),
    #[error("coordinate out of range: lat {lat}, lon {lon}")]
    CoordinateOutOfRange { lat: f64, lon: f64 },
    #[error("network has no nodes")]
    EmptyNetwork,
    #[error("unknown state code '{0}'")]
    UnknownState(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("series node order does not match the network the fit was made on")]
    NodeOrderMismatch,
    #[error("{0} is undefined: every term was excluded")]
    UndefinedMetric(&'static str),
    #[error("negative input {value} is outside the domain of {kind}")]
    NegativeInput { kind: &'static str, value: f64 },
    #[error("test period {period}: {source}")]
    Period {
        period: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: missing or malformed header, expected `{expected}`")]
    Header { path: PathBuf, expected: String },
    #[error("{path}:{line}: {reason}")]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
