use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("usage: {0}")]
    Usage(String),
    #[error("unknown subsystem label `{0}`")]
    UnknownLabel(String),
    #[error("duplicate subsystem label `{0}`")]
    DuplicateLabel(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operator is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("not a density operator: {0}")]
    NotDensity(String),
    #[error("invalid channel: {0}")]
    InvalidChannel(String),
    #[error("invalid POVM: {0}")]
    InvalidPovm(String),
    #[error("wiring mismatch: {0}")]
    Wiring(String),
    #[error("classical table: {0}")]
    Table(String),
    #[error("dimension budget exceeded: {0}")]
    Budget(String),
    #[error("optimizer did not converge (best value {best}, residual {residual:e})")]
    NonConvergence { best: f64, residual: f64 },
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("{path}: {field}: {message}")]
    Input {
        path: String,
        field: String,
        message: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }
}
