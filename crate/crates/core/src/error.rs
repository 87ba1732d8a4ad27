use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input has no rows or no columns")]
    EmptyInput,
    #[error("non-finite entry at row {row}, column {col}")]
    NonFiniteEntry { row: usize, col: usize },
    #[error("row {row} has {found} columns, expected {expected}")]
    RaggedRow { row: usize, expected: usize, found: usize },
    #[error("non-finite entry at index {0}")]
    NonFiniteVector(usize),
    #[error("matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("rho must lie in [0, 1), got {0}")]
    InvalidRho(f64),
    #[error("matrix is not positive semi-definite (eigenvalue {0})")]
    NotPsd(f64),
    #[error("solver did not converge after {iterations} iterations (residual {grad_norm:e}){}",
        replicate.map(|b| format!(" in bootstrap replicate {b}")).unwrap_or_default())]
    DidNotConverge { iterations: usize, grad_norm: f64, replicate: Option<usize> },
    #[error("solver iterates oscillated after {0} iterations")]
    DegenerateSample(usize),
    #[error("Bahadur remainder undefined: every residual at the estimate is zero")]
    DegenerateRemainder,
    #[error("level must lie in (0, 1), got {0}")]
    InvalidLevel(f64),
    #[error("alpha must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),
    #[error("p-value {value} at index {index} is outside [0, 1]")]
    InvalidPValue { index: usize, value: f64 },
    #[error("at least {needed} bootstrap draws required, got {found}")]
    TooFewDraws { needed: usize, found: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("zero marginal scale at coordinate {0}")]
    ZeroScale(usize),
    #[error("bootstrap variance of the spatial median is zero")]
    ZeroVariance,
    #[error("degrees of freedom must exceed 2, got {0}")]
    InvalidDf(f64),
    #[error("pattern needs {needed} coordinates but p = {p}")]
    PatternTooLarge { needed: usize, p: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("replication {replication}: {source}")]
    Replication {
        replication: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-readable tag for structured error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptyInput => "EmptyInput",
            Error::NonFiniteEntry { .. } => "NonFiniteEntry",
            Error::RaggedRow { .. } => "RaggedRow",
            Error::NonFiniteVector(_) => "NonFiniteVector",
            Error::NotSymmetric(..) => "NotSymmetric",
            Error::InvalidRho(_) => "InvalidRho",
            Error::NotPsd(_) => "NotPSD",
            Error::DidNotConverge { .. } => "DidNotConverge",
            Error::DegenerateSample(_) => "DegenerateSample",
            Error::DegenerateRemainder => "DegenerateRemainder",
            Error::InvalidLevel(_) => "InvalidLevel",
            Error::InvalidAlpha(_) => "InvalidAlpha",
            Error::InvalidPValue { .. } => "InvalidPValue",
            Error::TooFewDraws { .. } => "TooFewDraws",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::ZeroScale(_) => "ZeroScale",
            Error::ZeroVariance => "ZeroVariance",
            Error::InvalidDf(_) => "InvalidDf",
            Error::PatternTooLarge { .. } => "PatternTooLarge",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::Replication { source, .. } => source.kind(),
            Error::Csv(_) => "Csv",
            Error::Json(_) => "Json",
            Error::Io(_) => "Io",
        }
    }
}
