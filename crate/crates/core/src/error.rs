use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("operands live on different partitions; refine them to a common partition first")]
    PartitionMismatch,

    #[error("singular filter: denominator {value:e} at eigenvalue {eigenvalue}")]
    SingularFilter { eigenvalue: f64, value: f64 },

    #[error(
        "filter has h(0) = {0}; h(T) is not an integral operator on the kernel of T \
         (use the signal route or relax strict mode)"
    )]
    NonzeroAtZero(f64),

    #[error("regularity: {0}")]
    Regularity(String),

    #[error("enumeration budget exceeded: {0}")]
    Budget(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("gate failure: {0}")]
    Gate(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}
