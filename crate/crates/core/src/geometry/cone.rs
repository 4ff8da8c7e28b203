//! Cones centered at the origin: span(lines) + cone(rays).

use super::dd::cone_generators;
use crate::linalg::{dot, is_zero_vec, primitive_q, subspace_canonical_basis, QMat, QVec};
use crate::num::Q;
use num_traits::Zero;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cone {
    ambient: usize,
    rays: Vec<QVec>,
    lines: Vec<QVec>,
}

impl Cone {
    /// Cone generated by the given directions (no lines). Zero generators are
    /// dropped; the list is reduced to primitive vectors but not to extreme
    /// rays (call `canonical` for that).
    pub fn from_generators(ambient: usize, gens: &[QVec]) -> Cone {
        let mut rays: Vec<QVec> = gens
            .iter()
            .filter(|g| !is_zero_vec(g))
            .map(|g| primitive_q(g))
            .collect();
        rays.sort();
        rays.dedup();
        Cone {
            ambient,
            rays,
            lines: Vec::new(),
        }
    }

    pub fn from_parts(ambient: usize, rays: Vec<QVec>, lines: Vec<QVec>) -> Cone {
        Cone {
            ambient,
            rays,
            lines,
        }
    }

    pub fn zero(ambient: usize) -> Cone {
        Cone {
            ambient,
            rays: Vec::new(),
            lines: Vec::new(),
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn rays(&self) -> &[QVec] {
        &self.rays
    }

    pub fn lines(&self) -> &[QVec] {
        &self.lines
    }

    /// All generators with lines expanded into ± pairs.
    pub fn generators(&self) -> Vec<QVec> {
        let mut g = self.rays.clone();
        for l in &self.lines {
            g.push(l.clone());
            g.push(l.iter().map(|x| -x).collect());
        }
        g
    }

    /// Dual cone {u' : u . u' >= 0 for all u in self}, computed by double
    /// description on the generator constraints. Involutive on closed cones.
    pub fn dual(&self) -> Cone {
        let rows = self.generators();
        let (lines, rays) = cone_generators(self.ambient, &rows);
        Cone {
            ambient: self.ambient,
            rays,
            lines,
        }
    }

    /// Membership via the dual description.
    pub fn contains(&self, x: &[Q]) -> bool {
        let d = self.dual();
        d.generators().iter().all(|a| dot(a, x) >= Q::zero())
    }

    /// Canonical form: extreme rays reduced modulo the lineality space and a
    /// canonical lineality basis. Equal cones (as sets) canonicalize equal.
    pub fn canonical(&self) -> Cone {
        let dd = self.dual().dual();
        let lines = subspace_canonical_basis(&dd.lines, self.ambient);
        let line_pivots: Vec<usize> = if lines.is_empty() {
            Vec::new()
        } else {
            QMat::from_rows(lines.clone()).rref().1
        };
        let mut rays: Vec<QVec> = dd
            .rays
            .iter()
            .map(|r| {
                // zero out the pivot coordinates of the lineality
                let mut v = r.clone();
                for (li, &pc) in line_pivots.iter().enumerate() {
                    if v[pc].is_zero() {
                        continue;
                    }
                    let f = v[pc].clone();
                    for c in 0..self.ambient {
                        let sub = &f * &lines[li][c];
                        v[c] -= sub;
                    }
                }
                primitive_q(&v)
            })
            .filter(|v| !is_zero_vec(v))
            .collect();
        rays.sort();
        rays.dedup();
        Cone {
            ambient: self.ambient,
            rays,
            lines,
        }
    }

    /// A closed cone is a linear subspace iff its canonical form has no rays.
    pub fn is_linear_subspace(&self) -> bool {
        self.canonical().rays.is_empty()
    }
}
