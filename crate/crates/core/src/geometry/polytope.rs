//! Polytopes with simultaneous V- and H-representations.
//!
//! Both representations are computed from whichever one the caller supplies
//! and held in canonical form: vertices sorted lexicographically, facet
//! normals primitive integer vectors, explicit affine-span equations for
//! lower-dimensional polytopes. Two polytopes are equal iff they are equal
//! as sets.

use super::dd::{cone_generators, vertices_of_intersection};
use crate::lattices::span_saturation_basis;
use crate::linalg::{dot, primitive, vec_sub, QMat, QVec};
use crate::num::{Q, Z};
use crate::{Error, Result};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Closed halfspace {u : normal . u >= offset} with primitive integer normal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Halfspace {
    pub normal: Vec<Z>,
    pub offset: Q,
}

impl Halfspace {
    /// Normalize (m, c) with rational m to a primitive-normal halfspace.
    pub fn new(normal: &[Q], offset: &Q) -> Option<Halfspace> {
        if normal.iter().all(|x| x.is_zero()) {
            return None;
        }
        let mut den = Z::one();
        for x in normal {
            den = den.lcm(x.denom());
        }
        let ints: Vec<Z> = normal
            .iter()
            .map(|x| x.numer() * (&den / x.denom()))
            .collect();
        let mut g = Z::zero();
        for v in &ints {
            g = g.gcd(v);
        }
        let scale = Q::new(den, g.clone());
        Some(Halfspace {
            normal: ints.iter().map(|v| v / &g).collect(),
            offset: offset * scale,
        })
    }

    pub fn normal_q(&self) -> QVec {
        self.normal.iter().cloned().map(Q::from_integer).collect()
    }

    pub fn satisfied_by(&self, u: &[Q]) -> bool {
        dot(&self.normal_q(), u) >= self.offset
    }

    pub fn tight_at(&self, u: &[Q]) -> bool {
        dot(&self.normal_q(), u) == self.offset
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polytope {
    ambient: usize,
    dim: usize,
    vertices: Vec<QVec>,
    facets: Vec<Halfspace>,
    equations: Vec<Halfspace>,
}

impl Polytope {
    /// Convex hull of a nonempty point set. Lower-dimensional input is fine;
    /// the affine span is recorded through explicit equations.
    pub fn from_points(ambient: usize, points: &[QVec]) -> Result<Polytope> {
        if points.is_empty() {
            return Err(Error::BadInput("empty point list".into()));
        }
        let mut pts: Vec<QVec> = points.to_vec();
        for p in &pts {
            if p.len() != ambient {
                return Err(Error::DimensionMismatch(p.len(), ambient));
            }
        }
        pts.sort();
        pts.dedup();

        // the dual cone {(c, a) : c + a . p >= 0 for all p}: its lines carry
        // the affine-span equations, its extreme rays the facets
        let rows: Vec<QVec> = pts
            .iter()
            .map(|p| {
                let mut r = Vec::with_capacity(ambient + 1);
                r.push(Q::one());
                r.extend(p.iter().cloned());
                r
            })
            .collect();
        let (lines, rays) = cone_generators(ambient + 1, &rows);

        // the a-parts of the dual lineality span the orthogonal complement of
        // the affine span's direction space; its rref is the canonical
        // equation system, with offsets evaluated on the (lex-min) base point
        let eq_normal_rows: Vec<QVec> = lines.iter().map(|l| l[1..].to_vec()).collect();
        let eq_basis = crate::linalg::subspace_canonical_basis(&eq_normal_rows, ambient);
        let mut equations = Vec::new();
        for e in &eq_basis {
            if let Some(h) = Halfspace::new(e, &dot(e, &pts[0])) {
                equations.push(normalize_equation(h));
            }
        }
        equations.sort();
        equations.dedup();

        // facet inequalities are only determined modulo the span equations;
        // reduce each normal against the rref of the equation normals (the
        // offset follows along) for a canonical H-representation
        let eq_pivots: Vec<usize> = if eq_basis.is_empty() {
            Vec::new()
        } else {
            QMat::from_rows(eq_basis.clone()).rref().1
        };
        // affine values of the reduced equations on the span
        let eq_values: Vec<Q> = eq_basis.iter().map(|e| dot(e, &pts[0])).collect();
        let mut facets = Vec::new();
        for r in &rays {
            let mut normal: QVec = r[1..].to_vec();
            let mut offset = -r[0].clone();
            for (k, &pc) in eq_pivots.iter().enumerate() {
                if normal[pc].is_zero() {
                    continue;
                }
                let t = normal[pc].clone();
                for c in 0..ambient {
                    let sub = &t * &eq_basis[k][c];
                    normal[c] -= sub;
                }
                let sub = &t * &eq_values[k];
                offset -= sub;
            }
            if let Some(h) = Halfspace::new(&normal, &offset) {
                facets.push(h);
            }
        }
        facets.sort();
        facets.dedup();

        // minimal vertex set: a point is a 0-face iff its active constraint
        // normals (tight facets plus the span equations) span R^ambient
        let eq_normals: Vec<QVec> = equations.iter().map(|h| h.normal_q()).collect();
        let vertices: Vec<QVec> = pts
            .iter()
            .filter(|p| {
                let mut rows = eq_normals.clone();
                for h in &facets {
                    if h.tight_at(p) {
                        rows.push(h.normal_q());
                    }
                }
                !rows.is_empty() && QMat::from_rows(rows).rank() == ambient
            })
            .cloned()
            .collect();
        let vertices = if vertices.is_empty() {
            pts.clone()
        } else {
            vertices
        };

        let dim = affine_rank(&vertices);
        Ok(Polytope {
            ambient,
            dim,
            vertices,
            facets,
            equations,
        })
    }

    /// Bounded intersection of halfspaces (and optional equations).
    /// `Ok(None)` when the intersection is empty.
    pub fn from_halfspaces(
        ambient: usize,
        halfspaces: &[Halfspace],
        equations: &[Halfspace],
    ) -> Result<Option<Polytope>> {
        let ineqs: Vec<(QVec, Q)> = halfspaces
            .iter()
            .map(|h| (h.normal_q(), h.offset.clone()))
            .collect();
        let eqs: Vec<(QVec, Q)> = equations
            .iter()
            .map(|h| (h.normal_q(), h.offset.clone()))
            .collect();
        let verts = vertices_of_intersection(ambient, &ineqs, &eqs)?;
        if verts.is_empty() {
            return Ok(None);
        }
        Ok(Some(Polytope::from_points(ambient, &verts)?))
    }

    pub fn point(p: QVec) -> Polytope {
        let ambient = p.len();
        Polytope::from_points(ambient, &[p]).expect("single point")
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn codim(&self) -> usize {
        self.ambient - self.dim
    }

    pub fn vertices(&self) -> &[QVec] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Halfspace] {
        &self.facets
    }

    pub fn equations(&self) -> &[Halfspace] {
        &self.equations
    }

    pub fn is_gamma_rational(&self) -> bool {
        // automatic over Q: rational vertices and (by construction)
        // primitive integral facet normals
        true
    }

    pub fn contains(&self, u: &[Q]) -> bool {
        if u.len() != self.ambient {
            return false;
        }
        self.equations.iter().all(|h| h.tight_at(u))
            && self.facets.iter().all(|h| h.satisfied_by(u))
    }

    pub fn contains_polytope(&self, other: &Polytope) -> bool {
        other.vertices.iter().all(|v| self.contains(v))
    }

    /// Average of the vertices: a relative-interior point.
    pub fn relative_interior_point(&self) -> QVec {
        let n = Q::from_integer(Z::from(self.vertices.len() as i64));
        let mut acc = vec![Q::zero(); self.ambient];
        for v in &self.vertices {
            for (a, x) in acc.iter_mut().zip(v) {
                *a += x;
            }
        }
        acc.into_iter().map(|x| x / &n).collect()
    }

    pub fn translate(&self, t: &[Q]) -> Polytope {
        let mut vertices: Vec<QVec> = self
            .vertices
            .iter()
            .map(|v| crate::linalg::vec_add(v, t))
            .collect();
        vertices.sort();
        let shift = |h: &Halfspace| Halfspace {
            normal: h.normal.clone(),
            offset: &h.offset + dot(&h.normal_q(), t),
        };
        Polytope {
            ambient: self.ambient,
            dim: self.dim,
            vertices,
            facets: self.facets.iter().map(shift).collect(),
            equations: self.equations.iter().map(shift).collect(),
        }
    }

    pub fn scale(&self, s: &Q) -> Polytope {
        if s.is_zero() {
            return Polytope::point(vec![Q::zero(); self.ambient]);
        }
        let mut vertices: Vec<QVec> = self
            .vertices
            .iter()
            .map(|v| crate::linalg::vec_scale(v, s))
            .collect();
        vertices.sort();
        let rescale = |h: &Halfspace| {
            if s.is_negative() {
                Halfspace {
                    normal: h.normal.iter().map(|x| -x).collect(),
                    offset: -(&h.offset * s),
                }
            } else {
                Halfspace {
                    normal: h.normal.clone(),
                    offset: &h.offset * s,
                }
            }
        };
        let mut facets: Vec<Halfspace> = self.facets.iter().map(&rescale).collect();
        facets.sort();
        let mut equations: Vec<Halfspace> = self
            .equations
            .iter()
            .map(|h| normalize_equation(rescale(h)))
            .collect();
        equations.sort();
        Polytope {
            ambient: self.ambient,
            dim: self.dim,
            vertices,
            facets,
            equations,
        }
    }

    /// Direction space of the affine span, as a canonical basis.
    pub fn span_directions(&self) -> Vec<QVec> {
        let v0 = &self.vertices[0];
        let dirs: Vec<QVec> = self.vertices[1..].iter().map(|v| vec_sub(v, v0)).collect();
        crate::linalg::subspace_canonical_basis(&dirs, self.ambient)
    }

    /// Vertex sets of the facets, as indices into `vertices`.
    fn facet_vertex_sets(&self) -> Vec<Vec<usize>> {
        self.facets
            .iter()
            .map(|h| {
                (0..self.vertices.len())
                    .filter(|&i| h.tight_at(&self.vertices[i]))
                    .collect()
            })
            .collect()
    }

    /// All closed faces (including the polytope itself), as sorted vertex
    /// index sets, via closure of the vertex-facet incidence.
    pub fn face_vertex_sets(&self) -> Vec<Vec<usize>> {
        let facet_sets = self.facet_vertex_sets();
        let all: Vec<usize> = (0..self.vertices.len()).collect();
        let mut found: Vec<Vec<usize>> = vec![all.clone()];
        let mut queue: Vec<Vec<usize>> = vec![all];
        while let Some(s) = queue.pop() {
            for f in &facet_sets {
                let inter: Vec<usize> = s.iter().copied().filter(|i| f.contains(i)).collect();
                if !inter.is_empty() && !found.contains(&inter) {
                    found.push(inter.clone());
                    queue.push(inter);
                }
            }
        }
        found.sort();
        found
    }

    /// All k-dimensional closed faces as polytopes.
    pub fn faces(&self, k: usize) -> Result<Vec<Polytope>> {
        if k > self.dim {
            return Err(Error::FaceRange { k, dim: self.dim });
        }
        let mut out = Vec::new();
        for s in self.face_vertex_sets() {
            let pts: Vec<QVec> = s.iter().map(|&i| self.vertices[i].clone()).collect();
            if affine_rank(&pts) == k {
                out.push(Polytope::from_points(self.ambient, &pts)?);
            }
        }
        Ok(out)
    }

    /// Every closed face of every dimension, the polytope included.
    pub fn all_faces(&self) -> Vec<Polytope> {
        self.face_vertex_sets()
            .into_iter()
            .map(|s| {
                let pts: Vec<QVec> = s.iter().map(|&i| self.vertices[i].clone()).collect();
                Polytope::from_points(self.ambient, &pts).expect("face")
            })
            .collect()
    }

    /// The closed face whose relative interior contains u (the smallest
    /// closed face containing u).
    pub fn open_face_containing(&self, u: &[Q]) -> Result<Polytope> {
        if !self.contains(u) {
            return Err(Error::NotInSet);
        }
        let tight: Vec<usize> = (0..self.facets.len())
            .filter(|&i| self.facets[i].tight_at(u))
            .collect();
        let mut verts: Vec<QVec> = Vec::new();
        for v in &self.vertices {
            if tight.iter().all(|&i| self.facets[i].tight_at(v)) {
                verts.push(v.clone());
            }
        }
        Polytope::from_points(self.ambient, &verts)
    }

    /// Is u in the relative interior?
    pub fn relint_contains(&self, u: &[Q]) -> bool {
        self.contains(u) && !self.facets.iter().any(|h| h.tight_at(u))
    }

    /// Triangulation into dim-simplices, each given by dim+1 vertices.
    pub fn triangulate(&self) -> Vec<Vec<QVec>> {
        if self.dim == 0 {
            return vec![vec![self.vertices[0].clone()]];
        }
        let apex = self.vertices[0].clone();
        let mut simplices = Vec::new();
        for facet in self.faces(self.dim - 1).expect("facet enumeration") {
            if facet.contains(&apex) {
                continue;
            }
            for mut s in facet.triangulate() {
                s.push(apex.clone());
                simplices.push(s);
            }
        }
        simplices
    }

    /// Lebesgue volume as a full-dimensional body; zero if dim < ambient.
    pub fn volume_full(&self) -> Q {
        if self.dim < self.ambient {
            return Q::zero();
        }
        let mut vol = Q::zero();
        for s in self.triangulate() {
            let base = &s[s.len() - 1];
            let edges: Vec<QVec> = s[..s.len() - 1].iter().map(|v| vec_sub(v, base)).collect();
            vol += QMat::from_cols(edges).det().abs();
        }
        let mut fact = Q::one();
        for k in 2..=self.dim {
            fact *= Q::from_integer(Z::from(k as i64));
        }
        vol / fact
    }

    /// Volume in the affine span, measured in the given chart: `coords` is an
    /// ambient x dim matrix whose columns span the direction space. The
    /// 0-dimensional volume is 1 by convention.
    pub fn volume_relative(&self, coords: &QMat) -> Result<Q> {
        if self.dim == 0 {
            return Ok(Q::one());
        }
        if coords.cols != self.dim {
            return Err(Error::RankDeficient);
        }
        let base = self.vertices[0].clone();
        let mapped: Vec<QVec> = self
            .vertices
            .iter()
            .map(|v| {
                coords
                    .solve(&vec_sub(v, &base))
                    .ok_or_else(|| Error::BadInput("chart does not span the polytope".into()))
            })
            .collect::<Result<_>>()?;
        let p = Polytope::from_points(self.dim, &mapped)?;
        Ok(p.volume_full())
    }

    /// Volume in the lattice-adapted chart: coordinates are a Z-basis of
    /// span ∩ Z^n. This is the normalization every degree and measure
    /// formula uses.
    pub fn volume_lattice_normalized(&self) -> Q {
        if self.dim == 0 {
            return Q::one();
        }
        let coords = span_saturation_basis(self.ambient, &self.span_directions());
        self.volume_relative(&coords)
            .expect("saturated chart spans")
    }

    /// Exact Minkowski sum.
    pub fn minkowski_sum(&self, other: &Polytope) -> Result<Polytope> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch(self.ambient, other.ambient));
        }
        let mut pts = Vec::with_capacity(self.vertices.len() * other.vertices.len());
        for a in &self.vertices {
            for b in &other.vertices {
                pts.push(crate::linalg::vec_add(a, b));
            }
        }
        Polytope::from_points(self.ambient, &pts)
    }

    /// Intersection as a polytope, `None` when empty.
    pub fn intersect(&self, other: &Polytope) -> Result<Option<Polytope>> {
        match self.intersect_vertex_set(other)? {
            None => Ok(None),
            Some(verts) => Ok(Some(Polytope::from_points(self.ambient, &verts)?)),
        }
    }

    /// Vertex set of the intersection without building its H-representation.
    pub fn intersect_vertex_set(&self, other: &Polytope) -> Result<Option<Vec<QVec>>> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch(self.ambient, other.ambient));
        }
        // cheap containment fast paths
        if self.contains_polytope(other) {
            return Ok(Some(other.vertices.clone()));
        }
        if other.contains_polytope(self) {
            return Ok(Some(self.vertices.clone()));
        }
        let mut ineqs: Vec<(QVec, Q)> = Vec::new();
        for h in self.facets.iter().chain(other.facets.iter()) {
            ineqs.push((h.normal_q(), h.offset.clone()));
        }
        let mut eqs: Vec<(QVec, Q)> = Vec::new();
        for h in self.equations.iter().chain(other.equations.iter()) {
            eqs.push((h.normal_q(), h.offset.clone()));
        }
        let verts = vertices_of_intersection(self.ambient, &ineqs, &eqs)?;
        if verts.is_empty() {
            Ok(None)
        } else {
            Ok(Some(verts))
        }
    }

    /// Axis-aligned bounding box as (min, max) coordinate vectors.
    pub fn bounding_box(&self) -> (QVec, QVec) {
        let mut lo = self.vertices[0].clone();
        let mut hi = self.vertices[0].clone();
        for v in &self.vertices[1..] {
            for i in 0..self.ambient {
                if v[i] < lo[i] {
                    lo[i] = v[i].clone();
                }
                if v[i] > hi[i] {
                    hi[i] = v[i].clone();
                }
            }
        }
        (lo, hi)
    }
}

/// Equations are defined up to sign; fix the first nonzero normal entry > 0.
fn normalize_equation(h: Halfspace) -> Halfspace {
    let flip = h
        .normal
        .iter()
        .find(|x| !x.is_zero())
        .map(|x| x.is_negative())
        .unwrap_or(false);
    if flip {
        Halfspace {
            normal: h.normal.iter().map(|x| -x).collect(),
            offset: -h.offset,
        }
    } else {
        h
    }
}

pub fn affine_rank(points: &[QVec]) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let base = &points[0];
    let dirs: Vec<QVec> = points[1..].iter().map(|p| vec_sub(p, base)).collect();
    QMat::from_rows(dirs).rank()
}

/// Primitive integer direction of a 1-dimensional polytope (an edge).
pub fn edge_direction(p: &Polytope) -> Option<Vec<Z>> {
    if p.dim() != 1 {
        return None;
    }
    let d = vec_sub(&p.vertices()[1], &p.vertices()[0]);
    Some(primitive(&d))
}
