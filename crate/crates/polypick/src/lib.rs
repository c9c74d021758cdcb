//! Construction and certification of Nevanlinna-Pick problems on the polydisc
//! whose set of uniqueness is a prescribed rationally parameterized inner curve.
//!
//! The pipeline: a curve `γ : 𝔻 → 𝔻ⁿ` with rational inner coordinates carries a
//! Hilbert space of boundary functions ([`kernel::KernelSpace`]); a regular
//! rational inner function `F` sampled at more than `deg_V(F)` curve points
//! yields a Pick matrix that is singular by construction ([`pick`]); the null
//! vector forces the value of every solution along the curve, while the
//! perturbation families of [`inner`] exhibit distinct solutions off it. The
//! two halves together are emitted as a [`pick::UniquenessCertificate`].

pub mod curve;
pub mod error;
pub mod inner;
pub mod kernel;
pub mod pick;
pub mod poly;
pub mod schema;

pub use error::{Error, Result};
pub use poly::{MultiIndex, MultiPoly, C64};

pub use curve::{degree_on_curve, winding_number, BlaschkeFactor, OneVarInner, ParamCurve};
pub use inner::{PerturbationSpec, RationalFn, RationalInner, Regularity};
pub use kernel::{ambient_szego, KernelSpace, KernelVector};
pub use pick::{
    build_pick_matrix, certify, construct_problem, extend_value, CertifyConfig, Constructed,
    ExtensionPoint, KernelConfig, KernelSource, PickMatrix, PickProblem, UniquenessCertificate,
};
