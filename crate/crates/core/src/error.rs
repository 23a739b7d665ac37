use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix must have at least one row and one column (got {rows}x{cols})")]
    EmptyMatrix { rows: usize, cols: usize },

    #[error("expected {expected} entries for the given shape, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },

    #[error("modulus {0} is not prime")]
    NonPrimeModulus(String),

    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("group of order {order} exceeds the subgroup enumeration bound {bound}")]
    GroupTooLarge { order: String, bound: u64 },

    #[error("k0 = {k0} must exceed every prime divisor of |B| (largest is {largest})")]
    K0TooSmall { k0: u64, largest: u64 },

    #[error("bad argument: {0}")]
    BadArgument(String),

    #[error("bad distribution parameters: {0}")]
    BadParams(String),

    #[error("adjacency matrix has a nonzero diagonal entry at index {0}")]
    NonzeroDiagonal(usize),

    #[error("column {0} of the Laplacian does not sum to zero")]
    ColumnsNotZeroSum(usize),

    #[error("invalid experiment spec: {0}")]
    InvalidSpec(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
