use thiserror::Error;

/// Failures shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("wrong number of arguments: expected {expected}, got {found}")]
    Arity { expected: usize, found: usize },
    #[error("matrix is not in su(n): {0}")]
    NotInAlgebra(String),
    #[error("matrix is not in SU(n): {0}")]
    NotInGroup(String),
    #[error("loop needs an even sample count of at least 4, got {0}")]
    SampleCount(usize),
    #[error("loop grids differ: {left} vs {right} samples")]
    GridMismatch { left: usize, right: usize },
    #[error("finite-difference step must be positive, got {0}")]
    Step(f64),
    #[error("invalid degree: {0}")]
    Degree(String),
    #[error("coordinate {index} is out of range for a chart of dimension {dim}")]
    Coordinate { index: usize, dim: usize },
    #[error("invalid parameter: {0}")]
    Parameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
