use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid torus space: {0}")]
    InvalidSpace(String),
    #[error("space mismatch: {0}")]
    SpaceMismatch(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("requires odd N (got N = {0})")]
    RequiresOddN(usize),
    #[error("operator is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("term budget exceeded: {terms:e} terms requested, budget is {budget:e}")]
    Budget { terms: f64, budget: f64 },
    #[error("{0}")]
    Domain(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for malformed input as opposed to well-formed input outside the domain.
    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse(_) | Error::Json(_) | Error::Io(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
