//! Tropicalization of Laurent polynomials with rational coefficient
//! valuations: the piecewise-affine valuation function, supremum valuations
//! over polytopes, and corner-locus hypersurfaces inside a window.

use crate::complexes::PolytopalComplex;
use crate::geometry::{edge_direction, Halfspace, PolytopalSet, Polytope};
use crate::linalg::{dot, vec_sub, QVec};
use crate::num::{Q, Z};
use crate::{Error, Result};
use num_integer::Integer;
use num_traits::Zero;

/// A finite support map from integer exponent vectors to coefficient
/// valuations. Only the valuations of the coefficients are retained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TropicalPolynomial {
    dim: usize,
    terms: Vec<(Vec<Z>, Q)>,
}

impl TropicalPolynomial {
    pub fn new(dim: usize, terms: Vec<(Vec<Z>, Q)>) -> Result<TropicalPolynomial> {
        if terms.is_empty() {
            return Err(Error::BadInput("empty support".into()));
        }
        let mut terms = terms;
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        for w in terms.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::BadInput(format!(
                    "duplicate exponent vector {:?}",
                    w[0].0
                )));
            }
        }
        for (m, _) in &terms {
            if m.len() != dim {
                return Err(Error::DimensionMismatch(m.len(), dim));
            }
        }
        Ok(TropicalPolynomial { dim, terms })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[(Vec<Z>, Q)] {
        &self.terms
    }

    fn term_value(&self, k: usize, u: &[Q]) -> Q {
        let (m, v) = &self.terms[k];
        let mq: QVec = m.iter().cloned().map(Q::from_integer).collect();
        v + dot(&mq, u)
    }

    /// min over the support of v(a_m) + m . u, together with the argmin set;
    /// the valuation of the sup-norm on val^{-1}(u).
    pub fn val_function(&self, u: &[Q]) -> (Q, Vec<usize>) {
        assert_eq!(u.len(), self.dim);
        let mut best = self.term_value(0, u);
        let mut arg = vec![0usize];
        for k in 1..self.terms.len() {
            let v = self.term_value(k, u);
            if v < best {
                best = v;
                arg = vec![k];
            } else if v == best {
                arg.push(k);
            }
        }
        (best, arg)
    }

    /// Valuation of the supremum norm over a polytope: the minimum of the
    /// valuation function, always attained at a vertex. Returns the value and
    /// an attaining vertex.
    pub fn sup_valuation(&self, delta: &Polytope) -> (Q, QVec) {
        assert_eq!(delta.ambient(), self.dim);
        let mut best: Option<(Q, QVec)> = None;
        for v in delta.vertices() {
            let (val, _) = self.val_function(v);
            match &best {
                Some((b, _)) if *b <= val => {}
                _ => best = Some((val, v.clone())),
            }
        }
        best.expect("polytope has vertices")
    }

    /// Shift every valuation by m . c (translates the hypersurface by -c).
    pub fn shift_valuations(&self, c: &[Q]) -> TropicalPolynomial {
        let terms = self
            .terms
            .iter()
            .map(|(m, v)| {
                let mq: QVec = m.iter().cloned().map(Q::from_integer).collect();
                (m.clone(), v + dot(&mq, c))
            })
            .collect();
        TropicalPolynomial {
            dim: self.dim,
            terms,
        }
    }
}

/// Corner locus of a tropical polynomial inside a full-dimensional window,
/// as a polytopal complex with the minimizing-monomial set per cell.
#[derive(Debug, Clone)]
pub struct TropicalHypersurface {
    window: Polytope,
    complex: PolytopalComplex,
    /// indices into the polynomial's terms minimizing on each cell's
    /// relative interior, aligned with `complex.cells()`
    minimizers: Vec<Vec<usize>>,
    /// lattice length of the dual Newton edge for each (n-1)-cell;
    /// informational, consumed by no formula here
    weights: Vec<Option<Z>>,
}

impl TropicalHypersurface {
    pub fn window(&self) -> &Polytope {
        &self.window
    }

    pub fn complex(&self) -> &PolytopalComplex {
        &self.complex
    }

    pub fn minimizers(&self) -> &[Vec<usize>] {
        &self.minimizers
    }

    pub fn weights(&self) -> &[Option<Z>] {
        &self.weights
    }

    pub fn is_empty(&self) -> bool {
        self.complex.cells().is_empty()
    }

    /// The maximal cells as a polytopal set.
    pub fn support(&self) -> PolytopalSet {
        self.complex.support()
    }

    /// The maximal cells that meet the window interior. Tie loci can touch
    /// the window boundary in isolated lower-dimensional pieces (a bisector
    /// grazing a window corner, say); pure dimensionality is a statement
    /// about this interior part.
    pub fn interior_support(&self) -> PolytopalSet {
        let members: Vec<Polytope> = self
            .support()
            .members()
            .iter()
            .filter(|c| {
                let u = c.relative_interior_point();
                !self.window.facets().iter().any(|h| h.tight_at(&u))
            })
            .cloned()
            .collect();
        PolytopalSet::new(self.window.ambient(), members).expect("same ambient")
    }

    pub fn contains(&self, u: &[Q]) -> bool {
        self.complex.cells().iter().any(|c| c.contains(u))
    }
}

/// The corner locus {u in window : the argmin of f has >= 2 elements},
/// built from exact bisector cells over all pairs of the support.
pub fn tropical_hypersurface(
    f: &TropicalPolynomial,
    window: &Polytope,
) -> Result<TropicalHypersurface> {
    if window.ambient() != f.dim() {
        return Err(Error::DimensionMismatch(window.ambient(), f.dim()));
    }
    if window.dim() != window.ambient() {
        return Err(Error::BadInput("window must be full-dimensional".into()));
    }
    let n = f.dim();
    let terms = f.terms();
    let mut cells: Vec<Polytope> = Vec::new();
    for i in 0..terms.len() {
        for j in i + 1..terms.len() {
            // tie between i and j, both minimal, inside the window
            let (mi, vi) = &terms[i];
            let (mj, vj) = &terms[j];
            let diff: QVec = mi
                .iter()
                .zip(mj)
                .map(|(a, b)| Q::from_integer(a - b))
                .collect();
            let Some(eq) = Halfspace::new(&diff, &(vj - vi)) else {
                continue; // duplicate exponents are rejected at construction
            };
            let mut ineqs: Vec<Halfspace> = window.facets().to_vec();
            for (k, (mk, vk)) in terms.iter().enumerate() {
                if k == i || k == j {
                    continue;
                }
                let d: QVec = mk
                    .iter()
                    .zip(mi)
                    .map(|(a, b)| Q::from_integer(a - b))
                    .collect();
                if let Some(h) = Halfspace::new(&d, &(vi - vk)) {
                    ineqs.push(h);
                }
            }
            let mut eqs: Vec<Halfspace> = window.equations().to_vec();
            eqs.push(eq);
            if let Some(cell) = Polytope::from_halfspaces(n, &ineqs, &eqs)? {
                cells.push(cell);
            }
        }
    }
    // keep maximal cells only; lower-dimensional tie loci reappear as faces
    let maximal: Vec<Polytope> = cells
        .iter()
        .enumerate()
        .filter(|(i, c)| {
            !cells
                .iter()
                .enumerate()
                .any(|(j, d)| *i != j && d.contains_polytope(c) && !c.contains_polytope(d))
                && !cells[..*i].contains(c)
        })
        .map(|(_, c)| c.clone())
        .collect();
    let complex = PolytopalComplex::build(n, &maximal)?;
    let minimizers: Vec<Vec<usize>> = complex
        .cells()
        .iter()
        .map(|c| f.val_function(&c.relative_interior_point()).1)
        .collect();
    let weights: Vec<Option<Z>> = complex
        .cells()
        .iter()
        .zip(&minimizers)
        .map(|(c, argmin)| {
            if c.dim() + 1 != n {
                return None;
            }
            let pts: Vec<QVec> = argmin
                .iter()
                .map(|&k| terms[k].0.iter().cloned().map(Q::from_integer).collect())
                .collect();
            let newton_edge = Polytope::from_points(n, &pts).ok()?;
            edge_direction(&newton_edge).map(|_| {
                let d = vec_sub(&newton_edge.vertices()[1], &newton_edge.vertices()[0]);
                let ints: Vec<Z> = d.iter().map(|q| q.numer().clone()).collect();
                let mut g = Z::zero();
                for v in &ints {
                    g = g.gcd(v);
                }
                g
            })
        })
        .collect();
    Ok(TropicalHypersurface {
        window: window.clone(),
        complex,
        minimizers,
        weights,
    })
}

/// Intersection of the hypersurfaces of several polynomials inside a common
/// window, as a polytopal set (maximal pieces of the common refinement).
pub fn prevariety(fs: &[TropicalPolynomial], window: &Polytope) -> Result<PolytopalSet> {
    if fs.is_empty() {
        return Err(Error::BadInput("empty polynomial list".into()));
    }
    let first = tropical_hypersurface(&fs[0], window)?;
    let mut pieces: Vec<Polytope> = first.support().members().to_vec();
    for f in &fs[1..] {
        let h = tropical_hypersurface(f, window)?;
        let mut next = Vec::new();
        for a in &pieces {
            for b in h.support().members() {
                if let Some(c) = a.intersect(b)? {
                    if !next.contains(&c) {
                        next.push(c);
                    }
                }
            }
        }
        pieces = next;
    }
    let maximal: Vec<Polytope> = pieces
        .iter()
        .enumerate()
        .filter(|(i, c)| {
            !pieces
                .iter()
                .enumerate()
                .any(|(j, d)| *i != j && d.contains_polytope(c) && !c.contains_polytope(d))
                && !pieces[..*i].contains(c)
        })
        .map(|(_, c)| c.clone())
        .collect();
    PolytopalSet::new(window.ambient(), maximal)
}

/// Pure-dimension check with witnesses: (verdict, offending (index, dim)
/// pairs among the maximal members).
pub fn check_pure_dimension(s: &PolytopalSet, d: usize) -> (bool, Vec<(usize, usize)>) {
    s.check_pure_dimension(d)
}

#[derive(Debug, Clone)]
pub struct ConcavityReport {
    /// per-sample verdicts for samples in the interior
    pub results: Vec<(QVec, bool)>,
    /// samples skipped because they lie on the window boundary
    pub excluded_boundary: Vec<QVec>,
    pub all_concave: bool,
}

/// Concavity verdict per sample (local-cone hull test). Samples on the
/// boundary of `window` are excluded from the verdict: truncation by the
/// window destroys concavity there for reasons that say nothing about the
/// underlying set.
pub fn check_total_concavity(
    s: &PolytopalSet,
    samples: &[QVec],
    window: Option<&Polytope>,
) -> Result<ConcavityReport> {
    let mut results = Vec::new();
    let mut excluded = Vec::new();
    for u in samples {
        if !s.contains(u) {
            return Err(Error::NotInSet);
        }
        if let Some(w) = window {
            let on_boundary = w.contains(u) && w.facets().iter().any(|h| h.tight_at(u));
            if on_boundary {
                excluded.push(u.clone());
                continue;
            }
        }
        let verdict = crate::geometry::is_concave_at(s, u)?;
        results.push((u.clone(), verdict));
    }
    let all = results.iter().all(|(_, v)| *v);
    Ok(ConcavityReport {
        results,
        excluded_boundary: excluded,
        all_concave: all,
    })
}

/// One relative-interior sample per cell of each dimension, window-boundary
/// cells excluded.
pub fn auto_samples(h: &TropicalHypersurface) -> Vec<QVec> {
    h.complex()
        .cells()
        .iter()
        .map(|c| c.relative_interior_point())
        .filter(|u| !h.window().facets().iter().any(|f| f.tight_at(u)))
        .collect()
}

/// The tropical line {0, e1, e2} with zero valuations.
pub fn tropical_line() -> TropicalPolynomial {
    TropicalPolynomial::new(
        2,
        vec![
            (vec![Z::zero(), Z::zero()], Q::zero()),
            (vec![Z::from(1), Z::zero()], Q::zero()),
            (vec![Z::zero(), Z::from(1)], Q::zero()),
        ],
    )
    .expect("valid support")
}

pub fn box_window(n: usize, radius: i64) -> Polytope {
    let mut corners: Vec<QVec> = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for c in &corners {
            for v in [crate::num::qi(-radius), crate::num::qi(radius)] {
                let mut p = c.clone();
                p.push(v);
                next.push(p);
            }
        }
        corners = next;
    }
    Polytope::from_points(n, &corners).expect("box")
}
