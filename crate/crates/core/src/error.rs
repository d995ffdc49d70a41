use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Malformed { line: u64, message: String },

    #[error("line {line}: negative {field} value {value}")]
    NegativeValue {
        line: u64,
        field: &'static str,
        value: f64,
    },

    #[error("line {line}: duplicate timestamp {timestamp} for ap `{ap_id}`")]
    DuplicateTimestamp {
        line: u64,
        ap_id: String,
        timestamp: i64,
    },

    #[error("trace `{0}` has no records")]
    EmptyTrace(String),

    #[error("period of {0} s does not evenly divide one hour")]
    InvalidPeriod(u32),

    #[error("invalid timezone `{0}` (expected `UTC` or an offset such as `+02:00`)")]
    InvalidTimezone(String),

    #[error("series too short: {0}")]
    SeriesTooShort(String),

    #[error("no samples fall in the requested hour block")]
    EmptyBlock,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("not enough data: {0}")]
    InsufficientData(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("training diverged at epoch {epoch} (loss = {loss})")]
    Diverged { epoch: usize, loss: f64 },

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("corpus has {available} series but the plan needs {needed}")]
    CorpusTooSmall { available: usize, needed: usize },

    #[error("unknown plot kind `{0}`")]
    UnknownPlotKind(String),

    #[error("bad file format in {path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("cell {cell} (repetition {repetition}): {source}")]
    Cell {
        cell: String,
        repetition: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
