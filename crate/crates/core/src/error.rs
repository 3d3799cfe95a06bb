use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (asymmetry {0:e})")]
    NotHermitian(f64),
    #[error("matrix or vector has a non-finite entry")]
    NonFinite,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not an orthogonal projection (residual {0:e})")]
    NotProjection(f64),
    #[error("lattice closure exceeded {max_size} elements")]
    ClosureOverflow { max_size: usize },
    #[error("subspace lattice is not commutative")]
    NotCommutative,
    #[error("spectrum entry {index} = {value} lies outside the open unit interval")]
    SpectrumOutOfRange { index: usize, value: f64 },
    #[error("angle between the subspaces is zero within tolerance; invertible B required")]
    AngleZero,
    #[error("structure mismatch: {0}")]
    StructureMismatch(String),
    #[error("no convergence after {iterations} iterations (bracket [{lower:e}, {upper:e}])")]
    NoConvergence {
        iterations: usize,
        lower: f64,
        upper: f64,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },
    #[error("invalid value at {path}: {message}")]
    Validation { path: String, message: String },
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
