use thiserror::Error;

#[derive(Debug, Error)]
pub enum SparseError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not square ({nrows}x{ncols})")]
    NotSquare { nrows: usize, ncols: usize },

    #[error("matrix is singular: zero or negligible pivot in row {row}")]
    Singular { row: usize },

    #[error("matrix is not symmetric positive definite: pivot {pivot:e} in row {row}")]
    NotSpd { row: usize, pivot: f64 },

    #[error("invalid CSR structure: {0}")]
    InvalidStructure(String),

    #[error("matrix market line {line}: {msg}")]
    MatrixMarket { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
