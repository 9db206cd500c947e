use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("algebra mismatch: {0}")]
    AlgebraMismatch(String),
    #[error("leg signature mismatch: {0}")]
    Signature(String),
    #[error("unsupported operator: {0}")]
    Unsupported(String),
    #[error("singular slice at {slow:?}: {reason}")]
    SingularSlice { slow: Vec<f64>, reason: String },
    #[error("grid mismatch: {0}")]
    Grid(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
