use thiserror::Error;

use crate::alt::FitDiagnostics;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    // dataset
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("row {row}, column `{column}`: cannot parse `{value}` as a number")]
    NonNumericCell {
        row: usize,
        column: String,
        value: String,
    },
    #[error("row {row}: fatigue {value} is outside (0, 1)")]
    FatigueOutOfRange { row: usize, value: f64 },
    #[error("dataset has no rows")]
    EmptyDataset,
    #[error("column `{0}` has zero variance")]
    ZeroVarianceColumn(String),
    #[error("need at least {needed} rows, got {got}")]
    TooFewRows { needed: usize, got: usize },
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    // pca
    #[error("matrix is not symmetric (entry ({row}, {col}) differs by {diff:e})")]
    NotSymmetric { row: usize, col: usize, diff: f64 },
    #[error("eigen solver did not converge after {sweeps} sweeps")]
    EigenNoConvergence { sweeps: usize },
    #[error("eigenvalue spectrum sums to zero")]
    AllZeroSpectrum,

    // fatigue
    #[error("fatigue rate must be positive and finite, got {0}")]
    NonPositiveRate(f64),
    #[error("exposure time must be nonnegative, got {0}")]
    NegativeTime(f64),
    #[error("exposure time must be positive, got {0}")]
    NonPositiveTime(f64),
    #[error("fatigue {0} is outside (0, 1)")]
    FatigueValueOutOfRange(f64),

    // alt
    #[error("no value supplied for factor `{0}`")]
    MissingFactor(String),
    #[error("factor `{factor}`: {transform} transform needs a positive value, got {value}")]
    TransformDomainError {
        factor: String,
        transform: &'static str,
        value: f64,
    },
    #[error("row {row}: response {value} must be positive")]
    NonPositiveResponse { row: usize, value: f64 },
    #[error("maximum likelihood fit did not converge ({0})")]
    NoConvergence(Box<FitDiagnostics>),
    #[error("observed information matrix is singular or ill-conditioned")]
    SingularInformation,
    #[error("factor `{0}` is constant after transformation")]
    DegenerateFactor(String),
    #[error("standard error must be positive, got {0}")]
    NonPositiveSE(f64),
    #[error("value must be positive, got {0}")]
    NonPositiveValue(f64),

    // validate
    #[error("observed value must be positive, got {0}")]
    NonPositiveObserved(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("model file: {0}")]
    ModelFormat(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
