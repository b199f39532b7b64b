//! Error type shared by every module of the crate.

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("point is not finite or has zero length")]
    DegeneratePoint,

    #[error("point of norm {norm} is not inside the open ball")]
    OutsideBall { norm: f64 },

    #[error("point of norm {norm} is outside the closed ball")]
    OutsideClosedBall { norm: f64 },

    #[error("matrix is not orthogonal (defect {defect:e})")]
    NotOrthogonal { defect: f64 },

    #[error("quadrature level {level} is not supported (allowed 3..={max})")]
    UnsupportedLevel { level: usize, max: usize },

    #[error("sphere dimension {n} has no deterministic rule")]
    UnsupportedDimension { n: usize },

    #[error("harmonic measure centre radius {radius} exceeds r_max = {r_max}")]
    RadiusExceeded { radius: f64, r_max: f64 },

    #[error("map evaluation failed: {0}")]
    MapEval(String),

    #[error("measure is not admissible: atom of mass {mass} at {point:?}")]
    Inadmissible { point: Vec<f64>, mass: f64 },

    #[error("sampled pushforward collapses mass {mass} onto {point:?}")]
    InadmissibleSample { point: Vec<f64>, mass: f64 },

    #[error(
        "no convergence after {iterations} iterations (residual {residual:e}, largest atom {largest_atom})"
    )]
    NoConvergence {
        iterations: usize,
        residual: f64,
        largest_atom: f64,
        history: Vec<f64>,
    },

    #[error("w-Jacobian of the implicit system is singular")]
    SingularJacobian,

    #[error("indeterminate value 0/0")]
    Indeterminate,

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
