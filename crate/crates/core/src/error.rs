use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("design matrix is rank deficient over columns {columns:?}")]
    SingularDesign { columns: Vec<usize> },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("coordinate descent did not converge after {iterations} sweeps (last change {last_change:e})")]
    NonConvergence { iterations: usize, last_change: f64 },

    #[error("dataset carries no truth labels; oracle fit needs simulated data")]
    MissingTruth,

    #[error("forecast window is empty")]
    EmptyWindow,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("every tuning candidate failed")]
    AllCandidatesFailed,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("series of length {len} is too short for a {needed}-period sum")]
    SeriesTooShort { len: usize, needed: usize },

    #[error("missing column `{0}`")]
    MissingColumn(String),

    #[error("dates are not consecutive months at row {row}: {prev} then {next}")]
    NonMonotoneDates { row: usize, prev: String, next: String },

    #[error("non-finite value in column `{column}` at row {row}")]
    NonFiniteValue { column: String, row: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
