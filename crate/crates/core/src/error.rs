use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is rank deficient: pivot {pivot:.3e} in column {column} is below tolerance")]
    RankDeficient { column: usize, pivot: f64 },

    #[error("matrix is not symmetric (max asymmetry {0:.3e})")]
    NotSymmetric(f64),

    #[error("Jacobi sweeps did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("quadrature did not reach tolerance (error estimate {0:.3e})")]
    ToleranceNotReached(f64),

    #[error("argument {0} is outside the function domain")]
    DomainError(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("not a frame: smallest eigenvalue of the frame operator is {0:.3e}")]
    NotAFrame(f64),

    #[error("atoms have different subspace dimensions")]
    MixedDimensions,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("vector is not unit norm (norm {0})")]
    NotUnitVector(f64),

    #[error("operation is not supported for the {0} distribution")]
    UnsupportedVariant(&'static str),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
