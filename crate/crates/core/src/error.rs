use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid young function: {0}")]
    InvalidYoung(String),
    #[error("invalid measure space: {0}")]
    InvalidSpace(String),
    #[error("invalid function: {0}")]
    InvalidFunction(String),
    #[error("invalid transformation: {0}")]
    InvalidMap(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("degenerate probe range [{lo}, {hi}]")]
    DegenerateRange { lo: f64, hi: f64 },
    #[error("tail cannot be resolved in closed form: {0}")]
    UnresolvedTail(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("divergent quantity: {0}")]
    Divergent(String),
}
