use thiserror::Error;

#[derive(Debug, Error)]
pub enum EpwError {
    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("inversion failed: {0}")]
    Inversion(String),

    #[error("linear algebra failure: {0}")]
    Linalg(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("mesh is not a closed surface: {0}")]
    NotClosed(String),

    #[error("singular evaluation: {0}")]
    Singular(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, EpwError>;

pub(crate) fn domain_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(EpwError::Domain(msg.into()))
}
