use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("coefficient domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("bad prime {prime}: denominator of entry ({row}, {col}) vanishes modulo it, retry with another prime")]
    BadPrime { prime: u64, row: usize, col: usize },

    #[error("{0} is not a usable prime modulus")]
    NotPrime(u64),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("division by zero: {0}")]
    DivisionByZero(String),

    #[error("invalid curve parameters: {0}")]
    InvalidParams(String),

    #[error("not 2-torsion: {0}")]
    NotTwoTorsion(String),

    #[error("degenerate parameters: {0}")]
    Degenerate(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("zero scaling factor {0}")]
    ZeroScaling(String),

    #[error("unknown expression `{0}`")]
    UnknownExpression(String),

    #[error("k = {0} is outside the supported range k >= 10")]
    KOutOfRange(i64),

    #[error("parse error: {0}")]
    Parse(String),

    /// Two independent computations of the same quantity disagreed.
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}
