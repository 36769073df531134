use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count {0} exceeds capacity {1}")]
    Capacity(usize, usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("Kraus channel is not trace preserving (deviation {0:.3e})")]
    NotTracePreserving(f64),
    #[error("noise model violates complete positivity: {0}")]
    NonPhysicalNoise(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("cannot transpile gate: {0}")]
    Transpile(String),
    #[error("optimizer failure: {0}")]
    Optimizer(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
