use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix shape {rows}x{cols} does not match {len} entries")]
    ShapeMismatch { rows: usize, cols: usize, len: usize },

    #[error("matrix has a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("svd did not converge after {sweeps} sweeps; rescale the input")]
    SvdNoConvergence { sweeps: usize },

    #[error("row {row} of the correlation root has norm {norm}, expected 1")]
    RowNorm { row: usize, norm: f64 },

    #[error("correlation root has estimated rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cardinality formula undefined for single antenna")]
    SingleAntenna,

    #[error("pre-log is zero for all antenna counts")]
    ZeroPrelog,

    #[error("subset-test budget of {budget} exceeded")]
    BudgetExceeded { budget: u64 },

    #[error("singular values collide (gap {gap:e} below {eps:e})")]
    SingularValueCollision { gap: f64, eps: f64 },

    #[error("zero singular value in output sample")]
    ZeroSingularValue,

    #[error("{rejected} of {total} samples rejected for singular-value collisions")]
    ExcessiveCollisions { rejected: u64, total: u64 },

    #[error("io: {0}")]
    Io(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
