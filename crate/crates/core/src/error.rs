use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (max |M - M^dagger| = {0:e})")]
    NotHermitian(f64),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("invalid dimension d = {0}; expected d >= 2")]
    InvalidDimension(usize),

    #[error("line geometry requires a prime dimension, got d = {0}")]
    NotPrime(usize),

    #[error("invalid phase-space line: {0}")]
    InvalidLine(String),

    #[error("affine map is not a bijection of Z_d^2 (det = {0})")]
    NonBijective(i64),

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program: {0}")]
    LpInternal(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("not enough curve points: need {needed}, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
