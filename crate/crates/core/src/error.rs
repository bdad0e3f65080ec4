use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SdqcError {
    #[error("matrix dimension {0} is not supported (expected 2 or 3)")]
    InvalidDimension(usize),

    #[error("matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },

    #[error("matrix is not symmetric: |a[{i}][{j}] - a[{j}][{i}]| = {gap:e}")]
    NotSymmetric { i: usize, j: usize, gap: f64 },

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("invalid planar set: {0}")]
    InvalidPrimitive(String),

    #[error("planar set has no primitives")]
    EmptySet,

    #[error("direction is not a unit vector (|e| = {0})")]
    NotUnit(f64),

    #[error("parameters outside the domain of the closed form: {0}")]
    DomainError(String),

    #[error("no admissible tangent hyperbola: {0}")]
    DegenerateTangency(String),

    #[error("base point has q = {0}; curves through q = 0 are not defined")]
    DegenerateBase(f64),

    #[error("tangent slope |e2/e1| = {0} exceeds sqrt(3)/4")]
    SlopeOutOfRange(f64),

    #[error("fixpoint did not converge after {iterations} sweeps")]
    NotConverged { iterations: usize },

    #[error("field has a nonzero mean coefficient (|w(0)| = {0:e})")]
    NonzeroMean(f64),

    #[error("grid size {grid} is below the alias-free bound {required}")]
    GridTooCoarse { grid: usize, required: usize },

    #[error("A - B is invertible (|det| = {0:e})")]
    NotRankDeficient(f64),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("grid size {0} is too small")]
    GridTooSmall(usize),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, SdqcError>;
