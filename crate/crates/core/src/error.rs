use thiserror::Error;

use crate::cycles::BalancingReport;
use crate::geometry::QVec;
use crate::plfunc::PshReport;
use crate::slicing::GenericityCertificate;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ambient dimension {dim} exceeds the guard of {max}")]
    DimensionGuardExceeded { dim: usize, max: usize },
    #[error("{count} constraints exceed the guard of {max}")]
    ConstraintGuardExceeded { count: usize, max: usize },
    #[error("vector of length {found} where ambient dimension {expected} was expected")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("polyhedron is empty")]
    EmptyPolyhedron,
    #[error("zero vector has no primitive direction")]
    ZeroVector,
    #[error("not a codimension-one face")]
    NotACodimOneFace,
    #[error("cells {0} and {1} intersect in a set that is not a face of both")]
    IntersectionAxiomViolated(usize, usize),
    #[error("maximal cells have dimensions {min}..{max}; a pure-dimensional cycle is required")]
    NotPureDimensional { min: i64, max: i64 },
    #[error("cycle has no cells of nonzero weight")]
    EmptyCycle,
    #[error("point is not on the support")]
    PointNotOnSupport,
    #[error("no piece given for maximal cell {0}")]
    MissingPiece(usize),
    #[error("pieces disagree on face {face} at {point:?}")]
    ContinuityViolated { face: usize, point: QVec },
    #[error("cell {0} of the subcycle is not contained in a maximal cell of the source")]
    SupportNotContained(usize),
    #[error("cycle is not balanced ({} violating faces)", .0.violations.len())]
    NotBalanced(Box<BalancingReport>),
    #[error("hyperplane is not generic ({} offending cells)", .0.offenders.len())]
    NotGeneric(Box<GenericityCertificate>),
    #[error("no generic hyperplane found after {iterations} draws")]
    Exhausted { iterations: usize },
    #[error("corner locus has a non-constant or non-integral weight on cell {0}")]
    NonIntegralWeight(usize),
    #[error("function is not weakly tropically psh")]
    NotPsh(Box<PshReport>),
    #[error("point is not a local maximum")]
    NotLocalMax,
    #[error("cycle is not a fan centered at the origin")]
    NotAFan,
    #[error("function is not affine on every cell")]
    NotAffine,
    #[error("function does not vanish at the origin")]
    NonzeroAtOrigin,
    #[error("{0}")]
    InvalidInput(String),
    #[error("{0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
