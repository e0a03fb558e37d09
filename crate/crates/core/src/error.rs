use thiserror::Error;

#[derive(Debug, Error)]
pub enum MacError {
    #[error("malformed grid spec: {0}")]
    MalformedSpec(String),
    #[error("unsupported dimension {0} (expected 2 or 3)")]
    UnsupportedDimension(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("linear solver failure: {0}")]
    LinearSolver(String),
    #[error("unknown problem `{0}`")]
    UnknownProblem(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, MacError>;
