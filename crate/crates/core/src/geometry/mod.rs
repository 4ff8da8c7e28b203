//! Exact polyhedral geometry: the Appendix-A substrate.

mod cone;
mod dd;
mod polytope;

pub use cone::Cone;
pub use dd::{cone_generators, vertices_of_intersection};
pub use polytope::{affine_rank, edge_direction, Halfspace, Polytope};

use crate::linalg::{vec_sub, QVec};
use crate::num::Q;
use crate::{Error, Result};

/// A finite union of polytopes in a common ambient dimension. Pure
/// dimensionality is a queried property, not an invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolytopalSet {
    ambient: usize,
    members: Vec<Polytope>,
}

impl PolytopalSet {
    pub fn new(ambient: usize, members: Vec<Polytope>) -> Result<PolytopalSet> {
        for m in &members {
            if m.ambient() != ambient {
                return Err(Error::DimensionMismatch(m.ambient(), ambient));
            }
        }
        Ok(PolytopalSet { ambient, members })
    }

    pub fn empty(ambient: usize) -> PolytopalSet {
        PolytopalSet {
            ambient,
            members: Vec::new(),
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn members(&self) -> &[Polytope] {
        &self.members
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, u: &[Q]) -> bool {
        self.members.iter().any(|p| p.contains(u))
    }

    /// Members that are maximal under inclusion.
    pub fn maximal_members(&self) -> Vec<&Polytope> {
        self.members
            .iter()
            .enumerate()
            .filter(|(i, p)| {
                !self
                    .members
                    .iter()
                    .enumerate()
                    .any(|(j, q)| *i != j && q.contains_polytope(p) && !p.contains_polytope(q))
                    && !self.members[..*i].iter().any(|q| q == *p)
            })
            .map(|(_, p)| p)
            .collect()
    }

    /// Check pure dimension d; on failure returns the two offending maximal
    /// dimensions via the error and a witness list of (index, dim).
    pub fn check_pure_dimension(&self, d: usize) -> (bool, Vec<(usize, usize)>) {
        let mut witnesses = Vec::new();
        let mut ok = true;
        for (i, p) in self.members.iter().enumerate() {
            let maximal = !self
                .members
                .iter()
                .enumerate()
                .any(|(j, q)| i != j && q.contains_polytope(p) && !p.contains_polytope(q));
            if maximal && p.dim() != d {
                ok = false;
                witnesses.push((i, p.dim()));
            }
        }
        (ok, witnesses)
    }

    pub fn max_dim(&self) -> Option<usize> {
        self.members.iter().map(|p| p.dim()).max()
    }
}

/// The local cone of S at u, one cone per member polytope containing u,
/// translated to the origin. For a polytope Δ this is cone(Δ - u).
pub fn local_cones(s: &PolytopalSet, u: &[Q]) -> Result<Vec<Cone>> {
    if !s.contains(u) {
        return Err(Error::NotInSet);
    }
    let mut cones = Vec::new();
    for p in s.members() {
        if !p.contains(u) {
            continue;
        }
        let gens: Vec<QVec> = p.vertices().iter().map(|v| vec_sub(v, u)).collect();
        cones.push(Cone::from_generators(s.ambient(), &gens));
    }
    Ok(cones)
}

/// Concavity at u in the sense of the local-cone hull test: the convex hull
/// of LC_u(S) is an affine subspace. Testable form: every extreme direction
/// of the hull has its negation inside the hull.
pub fn is_concave_at(s: &PolytopalSet, u: &[Q]) -> Result<bool> {
    let cones = local_cones(s, u)?;
    let mut gens: Vec<QVec> = Vec::new();
    for c in cones {
        gens.extend(c.rays().iter().cloned());
    }
    let hull = Cone::from_generators(s.ambient(), &gens);
    let canonical = hull.canonical();
    for r in canonical.rays() {
        let neg: QVec = r.iter().map(|x| -x).collect();
        if !hull.contains(&neg) {
            return Ok(false);
        }
    }
    Ok(true)
}
