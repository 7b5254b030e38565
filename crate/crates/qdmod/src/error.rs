use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QdError {
    #[error("Möbius map has a pole at {0}")]
    PoleOfMap(Complex64),
    #[error("degenerate Möbius coefficients (|ad - bc| = {0:e})")]
    DegenerateMoebius(f64),
    #[error("point {0} is outside the open unit disk")]
    OutsideDisk(Complex64),
    #[error("points {0} and {1} coincide")]
    DegeneratePair(Complex64, Complex64),
    #[error("no root of the Pick equation lies in the unit disk at z = {0}")]
    RootSelection(Complex64),
    #[error("point {0} is not in the image of the map (continuation stalled)")]
    NotInImage(Complex64),
    #[error("quadratic differential has a pole at {0}")]
    PoleEvaluation(Complex64),
    #[error("trajectory seed {0} is a singular point")]
    ImmediateSingularity(Complex64),
    #[error("evaluation at the singular point {0}")]
    Singularity(Complex64),
    #[error("branch tracking failed: {0}")]
    BranchTracking(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, QdError>;
