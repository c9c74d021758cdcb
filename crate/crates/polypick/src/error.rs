//! One error type for the whole crate.

use crate::poly::C64;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },

    #[error("the zero polynomial has no degree")]
    ZeroPolynomial,

    #[error("reflection degree {requested:?} is below the polynomial degree {needed:?}")]
    ReflectionDegree { needed: Vec<u32>, requested: Vec<u32> },

    #[error("|tau| = {0} is not within tolerance of 1")]
    NotUnimodular(f64),

    #[error("denominator vanishes at the origin, cannot normalize q(0) = 1")]
    DenominatorVanishesAtOrigin,

    #[error("evaluation hit a denominator zero: |q(z)| = {0:e}")]
    Pole(f64),

    #[error("degree condition violated for perturbing polynomial {index}: m + s - r_i has a negative entry")]
    PerturbationDegree { index: usize },

    #[error("perturbation degree mismatch: ndeg(p) = {p:?} but ndeg(q) = {q:?}")]
    SimpleDegreeMismatch { p: Vec<u32>, q: Vec<u32> },

    #[error("perturbed denominator vanishes on the sampled closed polydisc near {witness:?}")]
    NotInner { witness: Vec<C64> },

    #[error("Blaschke zero must satisfy |a| < 1 - 1e-12, got |a| = {0}")]
    BlaschkeZeroOnBoundary(f64),

    #[error("parameter outside the closed disc: |t| = {0}")]
    OutsideClosedDisc(f64),

    #[error("parameter outside the open disc: |t| = {0}")]
    OutsideOpenDisc(f64),

    #[error("point outside the open polydisc")]
    OutsidePolydisc,

    #[error("curve is not injective on sampled parameters: gamma({0}) = gamma({1})")]
    NotInjective(C64, C64),

    #[error("defining polynomial {index} does not vanish on the curve: |p| = {value:e} at t = {at}")]
    NotOnVariety { index: usize, value: f64, at: C64 },

    #[error("coordinate {index} is not unimodular on the sampled circle: deviation {deviation:e}")]
    CoordinateNotInner { index: usize, deviation: f64 },

    #[error("pullback has a pole on the curve boundary: |q(gamma(t))| = {0:e}")]
    PullbackPole(f64),

    #[error("winding number did not settle near an integer: {0}")]
    WindingResolution(f64),

    #[error("no generic level value found for root counting")]
    NoGenericValue,

    #[error("eigenvalue iteration failed to converge")]
    EigenFailure,

    #[error("degree formula gives {formula} but the winding oracle gives {winding}")]
    DegreeConsistency { formula: usize, winding: usize },

    #[error("quadrature grid too coarse: need at least {needed} points, got {got}")]
    QuadratureTooCoarse { needed: usize, got: usize },

    #[error("nodes {0} and {1} coincide")]
    DuplicateNode(usize, usize),

    #[error("target {index} lies outside the closed unit disc: |w| = {modulus}")]
    TargetOutsideDisc { index: usize, modulus: f64 },

    #[error("node {index} is off the curve point of its parameter by {error:e}")]
    NodeOffCurve { index: usize, error: f64 },

    #[error("need more than deg_V(F) = {deg} nodes, got {got}")]
    InsufficientNodes { deg: usize, got: usize },

    #[error("extension point lies in the zero set of G: relative denominator {0:e}")]
    OutsideUniquenessDomain(f64),

    #[error("Pick matrix has no null vector: smallest singular ratio {0:e} above threshold")]
    NoNullVector(f64),

    #[error("operation requires a curve kernel, problem uses the ambient Szego kernel")]
    NotCurveKernel,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
