use thiserror::Error;

/// Errors surfaced by constructors and operations across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unsupported dimension {0}: quantum operators must have dimension 2, 4, 8 or 16")]
    UnsupportedDimension(usize),

    #[error("entry count {found} does not match {rows}x{cols}")]
    EntryCount {
        rows: usize,
        cols: usize,
        found: usize,
    },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid probability {0}: more negative than the round-off clamp allows")]
    InvalidProbability(f64),

    #[error("impossible outcome: branch probability {0} is below threshold")]
    ImpossibleOutcome(f64),

    #[error("singular linear system: {0}")]
    SingularSystem(String),

    #[error("not a SIC POM: {0}")]
    NotSic(String),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("invalid counts: {0}")]
    InvalidCounts(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("internal consistency check failed: {0}")]
    ConsistencyCheck(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
