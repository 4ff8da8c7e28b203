//! Exact-arithmetic convex and tropical geometry.
//!
//! Everything in this crate computes over arbitrary-precision rationals;
//! there is no floating point anywhere. The modules build on each other
//! roughly bottom-up:
//!
//! * [`linalg`] - dense rational matrices, integer normal forms (Smith, Hermite)
//! * [`geometry`] - polytopes, cones, faces, volumes (double description kernel)
//! * [`lattices`] - integer lattices, saturation, stabilizers, duals, bilinear forms
//! * [`complexes`] - polytopal complexes, periodic quotients, transversality
//! * [`tropical`] - tropicalization of Laurent polynomials, corner loci
//! * [`plc`] - piecewise-linear convex functions, dual complexes, Voronoi models
//! * [`measure`] - mixed volumes and canonical piecewise Haar measures
//! * [`json`] - serde schemas for every file format the CLI speaks

pub mod complexes;
pub mod geometry;
pub mod json;
pub mod lattices;
pub mod linalg;
pub mod measure;
pub mod num;
pub mod plc;
pub mod tropical;

pub use crate::num::{Q, Z};

use thiserror::Error;

/// Crate-wide error type. Validation failures carry enough context to name
/// the offending object in CLI output.
#[derive(Debug, Error)]
pub enum Error {
    #[error("ambient dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("point is not contained in the set")]
    NotInSet,
    #[error("face index out of range: k = {k}, dim = {dim}")]
    FaceRange { k: usize, dim: usize },
    #[error("cells {0} and {1} intersect improperly (intersection is not a common closed face)")]
    ImproperIntersection(usize, usize),
    #[error("not a cell of the complex")]
    NotACell,
    #[error("polyhedron is unbounded")]
    Unbounded,
    #[error("matrix or map is rank deficient")]
    RankDeficient,
    #[error("bilinear form is not positive definite")]
    NotPositiveDefinite,
    #[error("bilinear form restricted to the subspace is degenerate")]
    DegenerateRestriction,
    #[error("polytopal set is not pure of dimension {1}: a maximal member has dimension {0}")]
    NotPureDimensional(usize, usize),
    #[error("decomposition is not transversal: witness cell {0}")]
    NotTransversal(usize),
    #[error("pegs are not integral; scale the function by N = {0} first")]
    NonIntegerPegs(crate::num::Z),
    #[error("perturbation attempt bound exceeded; last failing pair: {0}")]
    AttemptBoundExceeded(String),
    #[error("affine maps disagree on the shared face of strata {0} and {1}")]
    FaceMismatch(usize, usize),
    #[error("inconsistent stratum incidence between {0} and {1}")]
    BadIncidence(usize, usize),
    #[error("invalid input: {0}")]
    BadInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
