use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("inconsistent variable declarations: {0}")]
    Variables(String),

    #[error("empty system: {0}")]
    EmptySystem(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("variable index {index} out of range for {nvars} variables")]
    IndexOutOfRange { index: usize, nvars: usize },

    #[error("SVD did not converge after {0} sweeps")]
    SvdNoConvergence(usize),

    #[error("tolerance {0} outside the open interval (0, 1)")]
    InvalidTolerance(f64),

    #[error("invalid option: {0}")]
    InvalidOption(String),

    #[error("Jacobian has full column rank (rank {rank}, {cols} columns)")]
    FullColumnRank { rank: usize, cols: usize },

    #[error("point is not a root: residual {0:e}")]
    NotARoot(f64),

    #[error("malformed point file: {0}")]
    PointFormat(String),

    #[error("Macaulay matrix too large: {cols} columns exceeds cap {cap}")]
    MatrixTooLarge { cols: usize, cap: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

pub(crate) fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidTolerance(tol))
    }
}
