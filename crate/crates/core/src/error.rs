use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("model configuration mismatch: {0}")]
    ConfigMismatch(String),
    #[error("invalid model configuration: {0}")]
    InvalidConfig(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("series did not terminate within {bound} iterations ({what})")]
    SeriesBound { what: &'static str, bound: usize },
    #[error("invalid contraction: {0}")]
    InvalidContraction(String),
    #[error("invalid perturbation: {0}")]
    InvalidPerturbation(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
