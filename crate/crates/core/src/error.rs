//! Error types shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised while loading, validating, scaling or splitting tables.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DatasetError {
    #[error("dataset file not found: {0}")]
    MissingFile(String),
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("non-numeric cell at data row {row}, column {col} ({value:?})")]
    NonNumericCell { row: usize, col: String, value: String },
    #[error("row {row} has {found} cells, expected {expected}")]
    RaggedRow { row: usize, found: usize, expected: usize },
    #[error("duplicate year {0}")]
    DuplicateYear(i64),
    #[error("years are not increasing: {previous} followed by {next}")]
    NonMonotonicYears { previous: i64, next: i64 },
    #[error("column {0:?} is constant and cannot be standardized")]
    ConstantColumn(String),
    #[error("unknown column {0:?}")]
    UnknownColumn(String),
    #[error("too few rows: {0}")]
    TooFewRows(String),
    #[error("invalid table: {0}")]
    InvalidTable(String),
    #[error("i/o error: {0}")]
    Io(String),
}

/// Errors raised by the statistics routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("series lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("series is constant")]
    ConstantSeries,
    #[error("series too short: need at least {needed}, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("|r| = 1 gives an undefined t statistic")]
    DegenerateR,
    #[error("argument outside domain: {0}")]
    DomainError(String),
    #[error("need at least two items, got {0}")]
    TooFewItems(usize),
    #[error("total score variance is zero")]
    DegenerateVariance,
}

/// Errors raised when fitting or applying models.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("column {column} is not standardized (mean {mean:.3e}, variance {variance:.6})")]
    NotStandardized { column: usize, mean: f64, variance: f64 },
    #[error("empty penalty grid")]
    EmptyGrid,
    #[error("empty training data")]
    EmptyData,
    #[error("too few rows: {0}")]
    TooFewRows(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// Errors raised by the forecast-error metrics.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("series lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("cannot evaluate metrics on empty series")]
    Empty,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("model file does not match dataset: {0}")]
    SchemaMismatch(String),
    #[error("corrupt model file: {0}")]
    CorruptModel(String),
    #[error("invalid run configuration: {0}")]
    Config(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
