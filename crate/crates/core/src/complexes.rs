//! Polytopal complexes, Λ-periodic decompositions of R^n/Λ, stars,
//! subdivision and transversality tests.
//!
//! A periodic complex stores one canonical representative per cell class
//! (the translate whose barycenter lies in the half-open fundamental
//! parallelepiped) plus a finite cover: every cell instance meeting the
//! closed fundamental parallelepiped. All queries canonicalize into that
//! data.

use crate::geometry::{PolytopalSet, Polytope};
use crate::lattices::Lattice;
use crate::linalg::{vec_sub, QMat, QVec};
use crate::num::{floor_q, Q, Z};
use crate::{Error, Result};
use num_traits::{Signed, ToPrimitive, Zero};

/// Is `face` a closed face of `p`? Exact test via the open-face machinery.
pub fn is_face_of(face: &Polytope, p: &Polytope) -> bool {
    if !p.contains_polytope(face) {
        return false;
    }
    let u = face.relative_interior_point();
    match p.open_face_containing(&u) {
        Ok(g) => &g == face,
        Err(_) => false,
    }
}

/// Do the cells a and b intersect properly (emptily or in a common closed
/// face)? Works on the intersection's vertex set; never builds its H-rep.
fn intersects_properly(a: &Polytope, b: &Polytope) -> Result<bool> {
    let Some(vs) = a.intersect_vertex_set(b)? else {
        return Ok(true);
    };
    let u = average(&vs);
    let fa = a.open_face_containing(&u)?;
    if fa.vertices() != vs.as_slice() {
        return Ok(false);
    }
    let fb = b.open_face_containing(&u)?;
    Ok(fb.vertices() == vs.as_slice())
}

fn average(pts: &[QVec]) -> QVec {
    let n = Q::from_integer(Z::from(pts.len() as i64));
    let mut acc = vec![Q::zero(); pts[0].len()];
    for p in pts {
        for (a, x) in acc.iter_mut().zip(p) {
            *a += x;
        }
    }
    acc.into_iter().map(|x| x / &n).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolytopalComplex {
    ambient: usize,
    cells: Vec<Polytope>,
}

impl PolytopalComplex {
    /// Build a complex from a finite cell list. Closed faces are added
    /// automatically; the proper-intersection axiom is verified and a
    /// violation names the offending pair.
    pub fn build(ambient: usize, cells: &[Polytope]) -> Result<PolytopalComplex> {
        let mut all: Vec<Polytope> = Vec::new();
        for c in cells {
            if c.ambient() != ambient {
                return Err(Error::DimensionMismatch(c.ambient(), ambient));
            }
            for f in c.all_faces() {
                if !all.contains(&f) {
                    all.push(f);
                }
            }
        }
        all.sort_by(|a, b| a.vertices().cmp(b.vertices()));
        let cx = PolytopalComplex {
            ambient,
            cells: all,
        };
        cx.validate_proper_intersections()?;
        Ok(cx)
    }

    fn validate_proper_intersections(&self) -> Result<()> {
        for i in 0..self.cells.len() {
            for j in i + 1..self.cells.len() {
                let a = &self.cells[i];
                let b = &self.cells[j];
                if boxes_disjoint(a, b) {
                    continue;
                }
                if !intersects_properly(a, b)? {
                    return Err(Error::ImproperIntersection(i, j));
                }
            }
        }
        Ok(())
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn cells(&self) -> &[Polytope] {
        &self.cells
    }

    pub fn cell_index(&self, p: &Polytope) -> Option<usize> {
        self.cells.iter().position(|c| c == p)
    }

    pub fn max_dim(&self) -> usize {
        self.cells.iter().map(|c| c.dim()).max().unwrap_or(0)
    }

    /// star(σ) = all cells containing σ (σ itself included).
    pub fn star(&self, sigma: &Polytope) -> Result<Vec<&Polytope>> {
        if self.cell_index(sigma).is_none() {
            return Err(Error::NotACell);
        }
        Ok(self
            .cells
            .iter()
            .filter(|c| c.contains_polytope(sigma))
            .collect())
    }

    /// star_n(σ): the ambient-dimensional cells containing σ.
    pub fn star_top(&self, sigma: &Polytope) -> Result<Vec<&Polytope>> {
        Ok(self
            .star(sigma)?
            .into_iter()
            .filter(|c| c.dim() == self.ambient)
            .collect())
    }

    /// The union of the cells as a polytopal set (maximal cells only).
    pub fn support(&self) -> PolytopalSet {
        let maximal: Vec<Polytope> = self
            .cells
            .iter()
            .filter(|c| !self.cells.iter().any(|d| d != *c && d.contains_polytope(c)))
            .cloned()
            .collect();
        PolytopalSet::new(self.ambient, maximal).expect("same ambient")
    }

    /// Does `self` subdivide `coarse`: is every cell of `coarse` the union
    /// of the cells of `self` contained in it? Decided exactly by volumes
    /// in a shared chart of each coarse cell.
    pub fn subdivides(&self, coarse: &PolytopalComplex) -> bool {
        if self.ambient != coarse.ambient {
            return false;
        }
        for big in coarse.cells() {
            if big.dim() == 0 {
                if !self.cells.contains(big) {
                    return false;
                }
                continue;
            }
            let chart =
                crate::lattices::span_saturation_basis(self.ambient, &big.span_directions());
            let target = big
                .volume_relative(&chart)
                .expect("chart spans its own polytope");
            let mut covered = Q::zero();
            for small in &self.cells {
                if small.dim() == big.dim() && big.contains_polytope(small) {
                    covered += small.volume_relative(&chart).expect("nested span");
                }
            }
            if covered != target {
                return false;
            }
        }
        true
    }
}

fn boxes_disjoint(a: &Polytope, b: &Polytope) -> bool {
    let (alo, ahi) = a.bounding_box();
    let (blo, bhi) = b.bounding_box();
    for i in 0..alo.len() {
        if ahi[i] < blo[i] || bhi[i] < alo[i] {
            return true;
        }
    }
    false
}

/// A cell instance of a periodic complex: class representative translated by
/// the lattice element with the given basis coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellInstance {
    pub class: usize,
    pub shift: Vec<Z>,
    pub poly: Polytope,
}

#[derive(Debug, Clone)]
pub struct PeriodicComplex {
    lattice: Lattice,
    /// canonical representative per cell class, all dimensions, sorted by
    /// (dim, vertex list)
    classes: Vec<Polytope>,
    /// every instance meeting the closed fundamental parallelepiped
    cover: Vec<CellInstance>,
}

impl PeriodicComplex {
    /// Build from the top-dimensional cell classes. Their Λ-translates must
    /// tile R^n; faces are closed up automatically and the complex axioms
    /// are verified on the fundamental-domain cover.
    pub fn from_top_cells(lattice: Lattice, tops: &[Polytope]) -> Result<PeriodicComplex> {
        let n = lattice.ambient();
        if lattice.rank() != n {
            return Err(Error::RankDeficient);
        }
        if tops.is_empty() {
            return Err(Error::BadInput("no top cells".into()));
        }
        for t in tops {
            if t.ambient() != n {
                return Err(Error::DimensionMismatch(t.ambient(), n));
            }
        }
        let basis = lattice.basis_matrix().clone();

        // open-cell injectivity into R^n/Λ: relint(Δ) meets none of its own
        // nonzero Λ-translates, i.e. relint(Δ - Δ) ∩ Λ = {0}
        for t in tops {
            let neg = t.scale(&crate::num::qi(-1));
            let diff = t.minkowski_sum(&neg)?;
            for z in lattice_points_in(&lattice, &diff)? {
                if z.iter().all(|c| c.is_zero()) {
                    continue;
                }
                let v = basis.mul_vec(
                    &z.iter()
                        .map(|x| Q::from_integer(x.clone()))
                        .collect::<QVec>(),
                );
                if diff.relint_contains(&v) {
                    return Err(Error::BadInput(
                        "a top cell's relative interior does not map injectively to R^n/Λ".into(),
                    ));
                }
            }
        }

        // canonical class representatives
        let mut classes: Vec<Polytope> = Vec::new();
        for t in tops {
            for f in t.all_faces() {
                let (rep, _) = canonicalize_cell(&lattice, &f);
                if !classes.contains(&rep) {
                    classes.push(rep);
                }
            }
        }
        classes.sort_by(|a, b| {
            (a.dim(), a.vertices().to_vec()).cmp(&(b.dim(), b.vertices().to_vec()))
        });

        // cover: all instances meeting the closed fundamental parallelepiped
        let corners: Vec<QVec> = cube_corners(n)
            .into_iter()
            .map(|c| basis.mul_vec(&c))
            .collect();
        let fund = Polytope::from_points(n, &corners)?;
        let mut cover: Vec<CellInstance> = Vec::new();
        for (ci, rep) in classes.iter().enumerate() {
            for z in shift_candidates(&lattice, rep, &fund)? {
                let t: QVec = basis.mul_vec(
                    &z.iter()
                        .map(|x| Q::from_integer(x.clone()))
                        .collect::<QVec>(),
                );
                let inst = rep.translate(&t);
                if inst.intersect_vertex_set(&fund)?.is_some() {
                    cover.push(CellInstance {
                        class: ci,
                        shift: z,
                        poly: inst,
                    });
                }
            }
        }
        cover.sort_by(|a, b| (a.class, a.shift.clone()).cmp(&(b.class, b.shift.clone())));

        // tiling check: top classes fill exactly one fundamental domain
        let total: Q = classes
            .iter()
            .filter(|c| c.dim() == n)
            .map(|c| c.volume_full())
            .sum();
        if total != basis.det().abs() {
            return Err(Error::BadInput(format!(
                "top cells do not tile R^n/Λ: class volume {} vs covolume {}",
                crate::num::format_q(&total),
                crate::num::format_q(&basis.det().abs())
            )));
        }

        let pc = PeriodicComplex {
            lattice,
            classes,
            cover,
        };
        pc.validate_cover()?;
        Ok(pc)
    }

    fn validate_cover(&self) -> Result<()> {
        for i in 0..self.cover.len() {
            for j in i + 1..self.cover.len() {
                let a = &self.cover[i].poly;
                let b = &self.cover[j].poly;
                if a == b {
                    return Err(Error::ImproperIntersection(i, j));
                }
                if boxes_disjoint(a, b) {
                    continue;
                }
                if !intersects_properly(a, b)? {
                    return Err(Error::ImproperIntersection(i, j));
                }
            }
        }
        Ok(())
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn classes(&self) -> &[Polytope] {
        &self.classes
    }

    pub fn cover(&self) -> &[CellInstance] {
        &self.cover
    }

    pub fn ambient(&self) -> usize {
        self.lattice.ambient()
    }

    /// Number of open-face classes of the given codimension modulo Λ.
    pub fn open_face_class_count(&self, codim: usize) -> usize {
        let n = self.ambient();
        self.classes.iter().filter(|c| c.dim() + codim == n).count()
    }

    /// The scaled decomposition (1/m) C with the same lattice.
    pub fn scale(&self, m: u32) -> Result<PeriodicComplex> {
        if m == 0 {
            return Err(Error::BadInput("scale factor must be positive".into()));
        }
        let n = self.ambient();
        let basis = self.lattice.basis_matrix();
        let inv_m = Q::new(Z::from(1), Z::from(m as i64));
        let mut tops = Vec::new();
        for c in self.classes.iter().filter(|c| c.dim() == n) {
            for z in integer_box(&vec![0i64; n], &vec![m as i64 - 1; n]) {
                let t: QVec = basis.mul_vec(
                    &z.iter()
                        .map(|x| Q::from_integer(x.clone()))
                        .collect::<QVec>(),
                );
                tops.push(c.translate(&t).scale(&inv_m));
            }
        }
        PeriodicComplex::from_top_cells(self.lattice.clone(), &tops)
    }

    /// Canonical representative of the Λ-class of `u` in the half-open
    /// fundamental parallelepiped, plus the integer shift taken.
    pub fn canonicalize_point(&self, u: &[Q]) -> (QVec, Vec<Z>) {
        let coords = self
            .lattice
            .basis_matrix()
            .solve(u)
            .expect("full-rank lattice");
        let z: Vec<Z> = coords.iter().map(floor_q).collect();
        let t = self.lattice.basis_matrix().mul_vec(
            &z.iter()
                .map(|x| Q::from_integer(x.clone()))
                .collect::<QVec>(),
        );
        (vec_sub(u, &t), z)
    }

    /// Index of a top-dimensional cover instance containing the
    /// canonicalized point, plus the canonical representative itself.
    pub fn instance_containing(&self, u: &[Q]) -> Option<(usize, QVec)> {
        let (u0, _) = self.canonicalize_point(u);
        let n = self.ambient();
        self.cover
            .iter()
            .enumerate()
            .filter(|(_, ci)| ci.poly.dim() == n && ci.poly.contains(&u0))
            .min_by(|(_, a), (_, b)| (a.class, a.shift.clone()).cmp(&(b.class, b.shift.clone())))
            .map(|(idx, _)| (idx, u0.clone()))
    }

    /// All top-dimensional cover instances containing the canonical
    /// representative of the given cell class.
    pub fn star_top_of_class(&self, class: usize) -> Vec<&CellInstance> {
        let n = self.ambient();
        let rep = &self.classes[class];
        self.cover
            .iter()
            .filter(|ci| ci.poly.dim() == n && ci.poly.contains_polytope(rep))
            .collect()
    }

    /// Instances of all classes whose translate meets the axis box [lo, hi].
    pub fn instances_in_box(&self, lo: &QVec, hi: &QVec) -> Result<Vec<CellInstance>> {
        let n = self.ambient();
        let corners: Vec<QVec> = cube_corners(n)
            .into_iter()
            .map(|c| {
                (0..n)
                    .map(|i| {
                        if c[i].is_zero() {
                            lo[i].clone()
                        } else {
                            hi[i].clone()
                        }
                    })
                    .collect()
            })
            .collect();
        let window = Polytope::from_points(n, &corners)?;
        let basis = self.lattice.basis_matrix();
        let mut out = Vec::new();
        for (ci, rep) in self.classes.iter().enumerate() {
            for z in shift_candidates(&self.lattice, rep, &window)? {
                let t: QVec = basis.mul_vec(
                    &z.iter()
                        .map(|x| Q::from_integer(x.clone()))
                        .collect::<QVec>(),
                );
                let inst = rep.translate(&t);
                if inst.intersect_vertex_set(&window)?.is_some() {
                    out.push(CellInstance {
                        class: ci,
                        shift: z,
                        poly: inst,
                    });
                }
            }
        }
        out.sort_by(|a, b| (a.class, a.shift.clone()).cmp(&(b.class, b.shift.clone())));
        Ok(out)
    }

    /// Does `finer` subdivide `self`? Checked per class representative
    /// against the Λ-periodic cells of `finer`.
    pub fn subdivided_by(&self, finer: &PeriodicComplex) -> Result<bool> {
        if finer.lattice != self.lattice {
            return Ok(false);
        }
        for big in &self.classes {
            let (lo, hi) = big.bounding_box();
            if big.dim() == 0 {
                let found = finer
                    .instances_in_box(&lo, &hi)?
                    .iter()
                    .any(|inst| &inst.poly == big);
                if !found {
                    return Ok(false);
                }
                continue;
            }
            let chart =
                crate::lattices::span_saturation_basis(self.ambient(), &big.span_directions());
            let target = big.volume_relative(&chart).expect("own chart");
            let mut covered = Q::zero();
            for inst in finer.instances_in_box(&lo, &hi)? {
                if inst.poly.dim() == big.dim() && big.contains_polytope(&inst.poly) {
                    covered += inst.poly.volume_relative(&chart).expect("nested span");
                }
            }
            if covered != target {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Canonical representative of the Λ-class of a cell: translate so the
/// barycenter lands in the half-open fundamental parallelepiped.
pub fn canonicalize_cell(lattice: &Lattice, cell: &Polytope) -> (Polytope, Vec<Z>) {
    let b = cell.relative_interior_point();
    let coords = lattice.basis_matrix().solve(&b).expect("full-rank lattice");
    let z: Vec<Z> = coords.iter().map(floor_q).collect();
    let t = lattice.basis_matrix().mul_vec(
        &z.iter()
            .map(|x| Q::from_integer(x.clone()))
            .collect::<QVec>(),
    );
    let neg: QVec = t.iter().map(|x| -x).collect();
    (cell.translate(&neg), z)
}

/// Integer coefficient vectors z such that cell + Λz could meet `target`
/// (a necessary box in lattice coordinates; callers do the exact test).
pub(crate) fn shift_candidates(
    lattice: &Lattice,
    cell: &Polytope,
    target: &Polytope,
) -> Result<Vec<Vec<Z>>> {
    let binv = lattice
        .basis_matrix()
        .inverse()
        .ok_or(Error::RankDeficient)?;
    let n = lattice.ambient();
    let mut cell_lo = vec![Q::zero(); n];
    let mut cell_hi = vec![Q::zero(); n];
    let mut tgt_lo = vec![Q::zero(); n];
    let mut tgt_hi = vec![Q::zero(); n];
    range_in_coords(&binv, cell.vertices(), &mut cell_lo, &mut cell_hi);
    range_in_coords(&binv, target.vertices(), &mut tgt_lo, &mut tgt_hi);
    let mut lo = Vec::with_capacity(n);
    let mut hi = Vec::with_capacity(n);
    for i in 0..n {
        let l = floor_q(&(&tgt_lo[i] - &cell_hi[i]));
        let h = floor_q(&(&tgt_hi[i] - &cell_lo[i])) + Z::from(1);
        lo.push(
            l.to_i64()
                .ok_or_else(|| Error::BadInput("shift range overflow".into()))?,
        );
        hi.push(
            h.to_i64()
                .ok_or_else(|| Error::BadInput("shift range overflow".into()))?,
        );
    }
    Ok(integer_box(&lo, &hi))
}

fn range_in_coords(binv: &QMat, pts: &[QVec], lo: &mut QVec, hi: &mut QVec) {
    for (k, p) in pts.iter().enumerate() {
        let c = binv.mul_vec(p);
        for i in 0..c.len() {
            if k == 0 || c[i] < lo[i] {
                lo[i] = c[i].clone();
            }
            if k == 0 || c[i] > hi[i] {
                hi[i] = c[i].clone();
            }
        }
    }
}

pub(crate) fn integer_box(lo: &[i64], hi: &[i64]) -> Vec<Vec<Z>> {
    let n = lo.len();
    let mut out: Vec<Vec<Z>> = vec![Vec::new()];
    for i in 0..n {
        let mut next = Vec::new();
        for prefix in &out {
            for v in lo[i]..=hi[i] {
                let mut p = prefix.clone();
                p.push(Z::from(v));
                next.push(p);
            }
        }
        out = next;
    }
    out
}

pub(crate) fn cube_corners(n: usize) -> Vec<QVec> {
    let mut out: Vec<QVec> = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for prefix in &out {
            for v in [Q::zero(), crate::num::qi(1)] {
                let mut p = prefix.clone();
                p.push(v);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Lattice elements (as basis coefficient vectors) lying inside a polytope.
pub fn lattice_points_in(lattice: &Lattice, p: &Polytope) -> Result<Vec<Vec<Z>>> {
    let binv = lattice
        .basis_matrix()
        .inverse()
        .ok_or(Error::RankDeficient)?;
    let n = lattice.ambient();
    let mut lo = vec![Q::zero(); n];
    let mut hi = vec![Q::zero(); n];
    range_in_coords(&binv, p.vertices(), &mut lo, &mut hi);
    let lo_i: Vec<i64> = lo
        .iter()
        .map(|q| {
            floor_q(q)
                .to_i64()
                .ok_or_else(|| Error::BadInput("range overflow".into()))
        })
        .collect::<Result<_>>()?;
    let hi_i: Vec<i64> = hi
        .iter()
        .map(|q| {
            (floor_q(q) + Z::from(1))
                .to_i64()
                .ok_or_else(|| Error::BadInput("range overflow".into()))
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for z in integer_box(&lo_i, &hi_i) {
        let v = lattice.basis_matrix().mul_vec(
            &z.iter()
                .map(|x| Q::from_integer(x.clone()))
                .collect::<QVec>(),
        );
        if p.contains(&v) {
            out.push(z);
        }
    }
    Ok(out)
}

/// Transversality of a window complex to a pure d-dimensional polytopal set:
/// every cell meets S either emptily or in pure dimension d - codim(cell).
/// Returns a witness cell on failure.
pub fn is_transversal_window(
    cx: &PolytopalComplex,
    s: &PolytopalSet,
    d: usize,
) -> Result<Option<Polytope>> {
    check_purity(s, d)?;
    for cell in cx.cells() {
        if !cell_meets_s_properly(cell, s, d)? {
            return Ok(Some(cell.clone()));
        }
    }
    Ok(None)
}

pub fn is_transversal_periodic(
    pc: &PeriodicComplex,
    s: &PolytopalSet,
    d: usize,
) -> Result<Option<Polytope>> {
    check_purity(s, d)?;
    if s.is_empty() {
        return Ok(None);
    }
    let (lo, hi) = set_bounding_box(s);
    for inst in pc.instances_in_box(&lo, &hi)? {
        if !cell_meets_s_properly(&inst.poly, s, d)? {
            return Ok(Some(inst.poly.clone()));
        }
    }
    Ok(None)
}

fn check_purity(s: &PolytopalSet, d: usize) -> Result<()> {
    let (pure, witnesses) = s.check_pure_dimension(d);
    if !pure {
        let dims: Vec<usize> = witnesses.iter().map(|w| w.1).collect();
        return Err(Error::NotPureDimensional(*dims.iter().max().unwrap(), d));
    }
    Ok(())
}

fn cell_meets_s_properly(cell: &Polytope, s: &PolytopalSet, d: usize) -> Result<bool> {
    let codim = cell.codim();
    let mut pieces: Vec<Polytope> = Vec::new();
    for m in s.members() {
        if let Some(p) = cell.intersect(m)? {
            pieces.push(p);
        }
    }
    if pieces.is_empty() {
        return Ok(true);
    }
    if codim > d {
        return Ok(false); // would need negative pure dimension, i.e. empty
    }
    let need = d - codim;
    // maximal pieces must all have dimension `need`
    for (i, p) in pieces.iter().enumerate() {
        let maximal = !pieces
            .iter()
            .enumerate()
            .any(|(j, q)| i != j && q.contains_polytope(p) && !p.contains_polytope(q));
        if maximal && p.dim() != need {
            return Ok(false);
        }
    }
    Ok(true)
}

fn set_bounding_box(s: &PolytopalSet) -> (QVec, QVec) {
    let mut lo: Option<QVec> = None;
    let mut hi: Option<QVec> = None;
    for m in s.members() {
        let (mlo, mhi) = m.bounding_box();
        match (&mut lo, &mut hi) {
            (None, None) => {
                lo = Some(mlo);
                hi = Some(mhi);
            }
            (Some(l), Some(h)) => {
                for i in 0..l.len() {
                    if mlo[i] < l[i] {
                        l[i] = mlo[i].clone();
                    }
                    if mhi[i] > h[i] {
                        h[i] = mhi[i].clone();
                    }
                }
            }
            _ => unreachable!(),
        }
    }
    (lo.unwrap(), hi.unwrap())
}

/// One transversal vertex: an intersection point of S with a cell of
/// codimension d, keyed by the open face (= that cell) containing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransversalVertex {
    pub point: QVec,
    /// the codim-d cell whose relative interior contains the point
    pub face: Polytope,
    /// equivalence class id: equal iff the containing open face is equal
    pub class: usize,
}

#[derive(Debug, Clone, Default)]
pub struct TransversalVertexReport {
    pub vertices: Vec<TransversalVertex>,
    pub class_count: usize,
}

/// Transversal vertices of C ∩ S for a window complex.
pub fn transversal_vertices_window(
    cx: &PolytopalComplex,
    s: &PolytopalSet,
    d: usize,
) -> Result<TransversalVertexReport> {
    if let Some(w) = is_transversal_window(cx, s, d)? {
        return Err(Error::NotTransversal(
            cx.cell_index(&w).unwrap_or(usize::MAX),
        ));
    }
    let cells: Vec<&Polytope> = cx.cells().iter().filter(|c| c.codim() == d).collect();
    collect_transversal_vertices(&cells, s)
}

/// Transversal vertices for a periodic complex, over the instances meeting
/// the bounding box of S.
pub fn transversal_vertices_periodic(
    pc: &PeriodicComplex,
    s: &PolytopalSet,
    d: usize,
) -> Result<TransversalVertexReport> {
    if let Some(_w) = is_transversal_periodic(pc, s, d)? {
        return Err(Error::NotTransversal(usize::MAX));
    }
    if s.is_empty() {
        return Ok(TransversalVertexReport::default());
    }
    let (lo, hi) = set_bounding_box(s);
    let instances = pc.instances_in_box(&lo, &hi)?;
    let cells: Vec<&Polytope> = instances
        .iter()
        .map(|i| &i.poly)
        .filter(|p| p.codim() == d)
        .collect();
    collect_transversal_vertices(&cells, s)
}

fn collect_transversal_vertices(
    cells: &[&Polytope],
    s: &PolytopalSet,
) -> Result<TransversalVertexReport> {
    let mut vertices = Vec::new();
    let mut class = 0usize;
    for cell in cells {
        let mut points: Vec<QVec> = Vec::new();
        for m in s.members() {
            if let Some(p) = cell.intersect(m)? {
                debug_assert_eq!(p.dim(), 0, "transversality gives point intersections");
                points.push(p.vertices()[0].clone());
            }
        }
        points.sort();
        points.dedup();
        if points.is_empty() {
            continue;
        }
        for pt in points {
            debug_assert!(cell.relint_contains(&pt));
            vertices.push(TransversalVertex {
                point: pt,
                face: (*cell).clone(),
                class,
            });
        }
        class += 1;
    }
    Ok(TransversalVertexReport {
        vertices,
        class_count: class,
    })
}
