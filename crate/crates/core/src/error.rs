use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum QError {
    #[error("unknown register id `{0}`")]
    UnknownRegister(String),

    #[error("duplicate register id `{0}`")]
    DuplicateRegister(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("dimension cap exceeded: need {needed}, cap {cap}")]
    CapExceeded { needed: usize, cap: usize },

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("operator is not an isometry (max |V†V - I| = {0})")]
    NotIsometry(f64),

    #[error("matrix is not a valid density operator: {0}")]
    InvalidDensity(String),

    #[error("register holder violation: {0}")]
    HolderViolation(String),

    #[error("task mismatch: expected {expected}, protocol declares {found}")]
    TaskMismatch { expected: String, found: String },

    #[error("malformed POVM: {0}")]
    MalformedPovm(String),

    #[error("missing decoder for input ({x}, {y})")]
    MissingDecoder { x: u64, y: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("protocol structure error: {0}")]
    Protocol(String),

    #[error("serialization error: {0}")]
    Serde(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for QError {
    fn from(e: serde_json::Error) -> Self {
        QError::Serde(e.to_string())
    }
}

pub type QResult<T> = Result<T, QError>;
