use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the workbench can report.
///
/// Variants fall into two families that the CLI maps to different exit
/// codes: data problems (unreadable or malformed input) and numeric
/// failures (a computation whose preconditions do not hold).
#[derive(Debug, Error)]
pub enum Error {
    #[error("design matrix is rank deficient at column {column}")]
    RankDeficient { column: usize },
    #[error("matrix is not symmetric (max asymmetry {max_asymmetry:.3e})")]
    Asymmetric { max_asymmetry: f64 },
    #[error("matrix is empty")]
    EmptyMatrix,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("matrix is singular")]
    Singular,
    #[error("need more rows than regressors (rows {rows}, regressors {cols})")]
    InsufficientRows { rows: usize, cols: usize },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error on line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("line {line} has {found} fields, expected {expected}")]
    RaggedRow { line: u64, expected: usize, found: usize },
    #[error("non-numeric value {value:?} in continuous column {column:?} on line {line}")]
    NonNumeric { column: String, line: u64, value: String },
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("no column named {0:?}")]
    MissingColumn(String),
    #[error("missing-value policy removed every row")]
    AllRowsDropped,
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),

    #[error("column {column:?} has zero variance")]
    ZeroVariance { column: String },
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),
    #[error("need at least {needed} values, got {got}")]
    TooFewValues { needed: usize, got: usize },
    #[error("need at least {needed} rows to split, got {got}")]
    TooFewRows { needed: usize, got: usize },

    #[error("stepwise selection did not terminate within {0} iterations")]
    NonTermination(usize),
    #[error("invalid factor count: {0}")]
    InvalidFactorCount(String),
    #[error("{m} factors are too many for {p} variables: need (p-m)^2 >= p+m")]
    DegreesOfFreedom { p: usize, m: usize },
    #[error("leading eigenvalue {0} is not positive")]
    NonPositiveEigenvalue(f64),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("baseline is degenerate: every response equals the baseline mean")]
    DegenerateBaseline,
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("invalid config: {0}")]
    Config(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// True for failures caused by input data rather than by numerics.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::Io { .. }
                | Error::Parse { .. }
                | Error::RaggedRow { .. }
                | Error::NonNumeric { .. }
                | Error::InvalidDataset(_)
                | Error::MissingColumn(_)
                | Error::AllRowsDropped
                | Error::InvalidSpec(_)
                | Error::SchemaMismatch(_)
                | Error::Config(_)
                | Error::Csv(_)
                | Error::Json(_)
        )
    }
}
