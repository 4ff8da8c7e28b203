//! Piecewise-linear convex functions over window or periodic complexes:
//! pegs, cocycle transport, ampleness, dual complexes, toric degrees, and
//! the Voronoi model construction with its genericity perturbation.

use crate::complexes::{PeriodicComplex, PolytopalComplex};
use crate::geometry::{Halfspace, Polytope};
use crate::lattices::{BilinearForm, Lattice};
use crate::linalg::{dot, vec_add, vec_sub, QMat, QVec};
use crate::num::{lcm, Q, Z};
use crate::{Error, Result};
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Where a PL function lives: a finite window complex or a Λ-periodic one.
#[derive(Debug, Clone)]
pub enum PlDomain {
    Window(PolytopalComplex),
    Periodic(PeriodicComplex),
}

/// Affine data on one top cell: f(u) = peg . u + constant there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub peg: QVec,
    pub constant: Q,
}

impl Piece {
    pub fn eval(&self, u: &[Q]) -> Q {
        dot(&self.peg, u) + &self.constant
    }
}

#[derive(Debug, Clone)]
pub struct PlConvexFunction {
    domain: PlDomain,
    /// one piece per top cell (window) or per top cover instance (periodic),
    /// aligned with the respective cell lists
    pieces: Vec<(usize, Piece)>,
}

impl PlConvexFunction {
    /// Attach affine pieces to the top cells of the domain. Only structural
    /// consistency is enforced here; convexity and continuity are queries
    /// (`ample_check`), not construction invariants.
    pub fn new(domain: PlDomain, pieces: Vec<(usize, Piece)>) -> Result<PlConvexFunction> {
        let tops = top_cell_ids(&domain);
        let mut got: Vec<usize> = pieces.iter().map(|(i, _)| *i).collect();
        got.sort_unstable();
        let mut want = tops.clone();
        want.sort_unstable();
        if got != want {
            return Err(Error::BadInput(
                "pieces must cover the top cells exactly once".into(),
            ));
        }
        let n = ambient(&domain);
        for (_, p) in &pieces {
            if p.peg.len() != n {
                return Err(Error::DimensionMismatch(p.peg.len(), n));
            }
        }
        Ok(PlConvexFunction { domain, pieces })
    }

    pub fn domain(&self) -> &PlDomain {
        &self.domain
    }

    pub fn pieces(&self) -> &[(usize, Piece)] {
        &self.pieces
    }

    pub fn piece_for(&self, cell_id: usize) -> Option<&Piece> {
        self.pieces
            .iter()
            .find(|(i, _)| *i == cell_id)
            .map(|(_, p)| p)
    }

    pub fn ambient(&self) -> usize {
        ambient(&self.domain)
    }

    fn top_cell(&self, id: usize) -> &Polytope {
        match &self.domain {
            PlDomain::Window(cx) => &cx.cells()[id],
            PlDomain::Periodic(pc) => &pc.cover()[id].poly,
        }
    }

    /// Value at u through its containing top cell. For periodic domains u is
    /// canonicalized modulo Λ first, i.e. this evaluates the restriction of
    /// f to the fundamental domain.
    pub fn evaluate(&self, u: &[Q]) -> Result<Q> {
        match &self.domain {
            PlDomain::Window(cx) => {
                for (id, piece) in &self.pieces {
                    if cx.cells()[*id].contains(u) {
                        return Ok(piece.eval(u));
                    }
                }
                Err(Error::NotInSet)
            }
            PlDomain::Periodic(pc) => {
                let (idx, u0) = pc.instance_containing(u).ok_or(Error::NotInSet)?;
                Ok(self
                    .piece_for(idx)
                    .expect("piece per top instance")
                    .eval(&u0))
            }
        }
    }

    /// max over all stored pieces; agrees with `evaluate` exactly when the
    /// data is convex (used as the convexity cross-check).
    pub fn evaluate_max(&self, u: &[Q]) -> Q {
        let u = match &self.domain {
            PlDomain::Periodic(pc) => pc.canonicalize_point(u).0,
            PlDomain::Window(_) => u.to_vec(),
        };
        self.pieces
            .iter()
            .map(|(_, p)| p.eval(&u))
            .max()
            .expect("nonempty pieces")
    }

    /// Pairs of adjacent top cells (sharing an (n-1)-face), by piece index.
    fn adjacent_top_pairs(&self) -> Result<Vec<(usize, usize)>> {
        let n = self.ambient();
        let ids: Vec<usize> = self.pieces.iter().map(|(i, _)| *i).collect();
        let mut out = Vec::new();
        for a in 0..ids.len() {
            for b in a + 1..ids.len() {
                let pa = self.top_cell(ids[a]);
                let pb = self.top_cell(ids[b]);
                if let Some(vs) = pa.intersect_vertex_set(pb)? {
                    if crate::geometry::affine_rank(&vs) == n - 1 {
                        out.push((ids[a], ids[b]));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Do the affine pieces glue continuously across every shared face?
    pub fn is_continuous(&self) -> Result<bool> {
        let ids: Vec<usize> = self.pieces.iter().map(|(i, _)| *i).collect();
        for a in 0..ids.len() {
            for b in a + 1..ids.len() {
                let pa = self.top_cell(ids[a]);
                let pb = self.top_cell(ids[b]);
                let Some(vs) = pa.intersect_vertex_set(pb)? else {
                    continue;
                };
                let fa = self.piece_for(ids[a]).unwrap();
                let fb = self.piece_for(ids[b]).unwrap();
                for v in &vs {
                    if fa.eval(v) != fb.eval(v) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// Convexity across every interior wall: continuity plus the peg jump
    /// pointing with the wall crossing.
    pub fn is_convex(&self) -> Result<bool> {
        if !self.is_continuous()? {
            return Ok(false);
        }
        for (a, b) in self.adjacent_top_pairs()? {
            let pa = self.top_cell(a);
            let pb = self.top_cell(b);
            let fa = self.piece_for(a).unwrap();
            let fb = self.piece_for(b).unwrap();
            let dir = vec_sub(&pb.relative_interior_point(), &pa.relative_interior_point());
            let jump = vec_sub(&fb.peg, &fa.peg);
            if dot(&jump, &dir) < Q::zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Are the top cells exactly the maximal affinity domains, i.e. do
    /// adjacent top cells carry distinct pegs?
    pub fn is_strongly_polyhedral(&self) -> Result<bool> {
        for (a, b) in self.adjacent_top_pairs()? {
            if self.piece_for(a).unwrap().peg == self.piece_for(b).unwrap().peg {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Ampleness criterion: convex and strongly polyhedral.
    pub fn ample_check(&self) -> Result<bool> {
        Ok(self.is_convex()? && self.is_strongly_polyhedral()?)
    }

    /// (always-ok flag over Q, common denominator N of all pegs): N*f has
    /// integer pegs.
    pub fn model_function_check(&self) -> (bool, Z) {
        let mut n = Z::one();
        for (_, p) in &self.pieces {
            for c in &p.peg {
                n = lcm(&n, c.denom());
            }
        }
        (true, n)
    }

    /// N*f: same cells, pegs and constants scaled.
    pub fn scale_values(&self, n: &Z) -> PlConvexFunction {
        let s = Q::from_integer(n.clone());
        PlConvexFunction {
            domain: self.domain.clone(),
            pieces: self
                .pieces
                .iter()
                .map(|(i, p)| {
                    (
                        *i,
                        Piece {
                            peg: p.peg.iter().map(|x| x * &s).collect(),
                            constant: &p.constant * &s,
                        },
                    )
                })
                .collect(),
        }
    }

    /// Star of a cell among the top cells carrying pieces. For periodic
    /// domains `cell` is a class index; the star is taken around the class
    /// representative.
    fn star_pieces(&self, cell: &CellRef) -> Result<Vec<(usize, &Piece)>> {
        match (&self.domain, cell) {
            (PlDomain::Window(cx), CellRef::Window(sigma)) => {
                cx.cell_index(sigma).ok_or(Error::NotACell)?;
                let mut out = Vec::new();
                for (id, p) in &self.pieces {
                    if cx.cells()[*id].contains_polytope(sigma) {
                        out.push((*id, p));
                    }
                }
                Ok(out)
            }
            (PlDomain::Periodic(pc), CellRef::Class(class)) => {
                if *class >= pc.classes().len() {
                    return Err(Error::NotACell);
                }
                let rep = &pc.classes()[*class];
                let mut out = Vec::new();
                for (idx, inst) in pc.cover().iter().enumerate() {
                    if inst.poly.dim() == pc.ambient() && inst.poly.contains_polytope(rep) {
                        out.push((idx, self.piece_for(idx).expect("piece per top instance")));
                    }
                }
                Ok(out)
            }
            _ => Err(Error::BadInput(
                "cell reference does not match domain".into(),
            )),
        }
    }

    /// Dual cell σ^f = conv{peg(Δ) : Δ in star_top(σ)}, a polytope in the
    /// dual space.
    pub fn dual_cell(&self, cell: &CellRef) -> Result<Polytope> {
        let star = self.star_pieces(cell)?;
        if star.is_empty() {
            return Err(Error::NotACell);
        }
        let pts: Vec<QVec> = star.iter().map(|(_, p)| p.peg.clone()).collect();
        Polytope::from_points(self.ambient(), &pts)
    }

    /// The inequality description of a vertex dual cell:
    /// {ω : ω . (u - u0) <= peg(Δ) . (u - u0) for u in Δ in star_top(u0)}.
    /// Agrees with the hull of pegs; kept as an independent route.
    pub fn dual_vertex_cell_by_inequalities(&self, vertex: &CellRef) -> Result<Polytope> {
        let u0 = match (&self.domain, vertex) {
            (PlDomain::Window(cx), CellRef::Window(sigma)) => {
                cx.cell_index(sigma).ok_or(Error::NotACell)?;
                if sigma.dim() != 0 {
                    return Err(Error::BadInput("not a vertex".into()));
                }
                sigma.vertices()[0].clone()
            }
            (PlDomain::Periodic(pc), CellRef::Class(class)) => {
                let rep = &pc.classes()[*class];
                if rep.dim() != 0 {
                    return Err(Error::BadInput("not a vertex".into()));
                }
                rep.vertices()[0].clone()
            }
            _ => {
                return Err(Error::BadInput(
                    "cell reference does not match domain".into(),
                ))
            }
        };
        let star = self.star_pieces(vertex)?;
        let mut hs: Vec<Halfspace> = Vec::new();
        for (id, piece) in &star {
            let cell = self.top_cell(*id);
            for v in cell.vertices() {
                let d = vec_sub(v, &u0);
                let neg: QVec = d.iter().map(|x| -x).collect();
                if let Some(h) = Halfspace::new(&neg, &-dot(&piece.peg, &d)) {
                    hs.push(h);
                }
            }
        }
        Polytope::from_halfspaces(self.ambient(), &hs, &[])?
            .ok_or_else(|| Error::BadInput("empty dual cell".into()))
    }

    /// Toric degree at a vertex u0 lying in a cell of codimension d:
    /// d! times the lattice-normalized volume of the dual cell.
    pub fn degree_at_vertex(&self, u0: &[Q], d: usize) -> Result<Q> {
        let (_, n_scale) = self.model_function_check();
        if !n_scale.is_one() {
            return Err(Error::NonIntegerPegs(n_scale));
        }
        let cell = match &self.domain {
            PlDomain::Window(cx) => {
                let top = self
                    .pieces
                    .iter()
                    .map(|(i, _)| &cx.cells()[*i])
                    .find(|c| c.contains(u0))
                    .ok_or(Error::NotInSet)?;
                let face = top.open_face_containing(u0)?;
                let idx = cx.cell_index(&face).ok_or(Error::NotACell)?;
                CellRef::Window(cx.cells()[idx].clone())
            }
            PlDomain::Periodic(pc) => {
                let (idx, u0c) = pc.instance_containing(u0).ok_or(Error::NotInSet)?;
                let face = pc.cover()[idx].poly.open_face_containing(&u0c)?;
                let (rep, _) = crate::complexes::canonicalize_cell(pc.lattice(), &face);
                let class = pc
                    .classes()
                    .iter()
                    .position(|c| *c == rep)
                    .ok_or(Error::NotACell)?;
                CellRef::Class(class)
            }
        };
        let codim = match (&self.domain, &cell) {
            (PlDomain::Window(_), CellRef::Window(p)) => p.codim(),
            (PlDomain::Periodic(pc), CellRef::Class(c)) => pc.ambient() - pc.classes()[*c].dim(),
            _ => unreachable!(),
        };
        if codim != d {
            return Err(Error::BadInput(format!(
                "vertex lies in a cell of codimension {codim}, expected {d}"
            )));
        }
        let dual = self.dual_cell(&cell)?;
        if dual.dim() < d {
            return Ok(Q::zero());
        }
        let mut fact = Q::one();
        for k in 2..=d {
            fact *= crate::num::qi(k as i64);
        }
        Ok(fact * dual.volume_lattice_normalized())
    }
}

/// Reference to a cell of the underlying domain: a concrete cell of a window
/// complex, or a class index of a periodic one.
#[derive(Debug, Clone)]
pub enum CellRef {
    Window(Polytope),
    Class(usize),
}

fn top_cell_ids(domain: &PlDomain) -> Vec<usize> {
    match domain {
        PlDomain::Window(cx) => {
            let n = cx.ambient();
            (0..cx.cells().len())
                .filter(|&i| cx.cells()[i].dim() == n)
                .collect()
        }
        PlDomain::Periodic(pc) => {
            let n = pc.ambient();
            (0..pc.cover().len())
                .filter(|&i| pc.cover()[i].poly.dim() == n)
                .collect()
        }
    }
}

fn ambient(domain: &PlDomain) -> usize {
    match domain {
        PlDomain::Window(cx) => cx.ambient(),
        PlDomain::Periodic(pc) => pc.ambient(),
    }
}

/// Theta-cocycle data: z_λ(u) = z_λ(0) + b(u, λ), with z_λ(0) stored on a
/// lattice basis and extended by the quadratic rule
/// z_{λ+ρ}(0) = z_λ(0) + z_ρ(0) + b(λ, ρ).
#[derive(Debug, Clone)]
pub struct CocycleData {
    pub lattice: Lattice,
    pub form: BilinearForm,
    /// z_{e_k}(0) on the basis of `lattice`
    pub z_basis: Vec<Q>,
}

impl CocycleData {
    pub fn new(lattice: Lattice, form: BilinearForm, z_basis: Vec<Q>) -> Result<CocycleData> {
        if lattice.rank() != lattice.ambient() {
            return Err(Error::RankDeficient);
        }
        if z_basis.len() != lattice.rank() {
            return Err(Error::DimensionMismatch(z_basis.len(), lattice.rank()));
        }
        if form.dim() != lattice.ambient() {
            return Err(Error::DimensionMismatch(form.dim(), lattice.ambient()));
        }
        Ok(CocycleData {
            lattice,
            form,
            z_basis,
        })
    }

    /// The canonical cocycle of a polarization: z_λ(0) = q(λ) + l(λ).
    pub fn from_form(
        lattice: Lattice,
        form: BilinearForm,
        linear: Option<QVec>,
    ) -> Result<CocycleData> {
        let z_basis = lattice
            .basis_cols()
            .iter()
            .map(|e| {
                let mut z = form.quadratic(e);
                if let Some(l) = &linear {
                    z += dot(l, e);
                }
                z
            })
            .collect();
        CocycleData::new(lattice, form, z_basis)
    }

    /// z_λ(0) for λ with the given integer basis coefficients, by the
    /// quadratic extension rule.
    pub fn z_at_zero(&self, coeffs: &[Z]) -> Q {
        let lam = self.lattice.basis_matrix().mul_vec(
            &coeffs
                .iter()
                .map(|c| Q::from_integer(c.clone()))
                .collect::<QVec>(),
        );
        // z(λ) = q(λ) + h(λ) with h linear, h(e_k) = z_k - q(e_k)
        let mut z = self.form.quadratic(&lam);
        for (k, c) in coeffs.iter().enumerate() {
            let e = self.lattice.basis_matrix().col(k);
            let h = &self.z_basis[k] - self.form.quadratic(&e);
            z += Q::from_integer(c.clone()) * h;
        }
        z
    }

    /// Verifies z_{λ+ρ}(0) - z_λ(0) - z_ρ(0) = b(λ, ρ) on basis pairs.
    pub fn is_cocycle(&self) -> bool {
        let n = self.lattice.rank();
        for i in 0..n {
            for j in 0..n {
                let mut ci = vec![Z::zero(); n];
                ci[i] = Z::one();
                let mut cj = vec![Z::zero(); n];
                cj[j] = Z::one();
                let mut cij = ci.clone();
                cij[j] += Z::one();
                let li = self.lattice.basis_matrix().col(i);
                let lj = self.lattice.basis_matrix().col(j);
                let lhs = self.z_at_zero(&cij) - self.z_at_zero(&ci) - self.z_at_zero(&cj);
                if lhs != self.form.eval(&li, &lj) {
                    return false;
                }
            }
        }
        true
    }
}

/// Does the periodic PL function transform by the cocycle,
/// f(u + λ) = f(u) + z_λ(u)? Checked exactly: every stored piece must be the
/// cocycle transport of its class-base piece.
pub fn check_cocycle(f: &PlConvexFunction, data: &CocycleData) -> Result<bool> {
    let PlDomain::Periodic(pc) = f.domain() else {
        return Err(Error::BadInput(
            "cocycle checks need a periodic domain".into(),
        ));
    };
    if data.lattice != *pc.lattice() {
        return Ok(false);
    }
    if !data.is_cocycle() {
        return Ok(false);
    }
    let n = pc.ambient();
    // base piece per class: the shift-0 instance carries the representative
    let mut base: Vec<Option<(usize, &Piece)>> = vec![None; pc.classes().len()];
    for (idx, inst) in pc.cover().iter().enumerate() {
        if inst.poly.dim() == n && inst.shift.iter().all(|z| z.is_zero()) {
            base[inst.class] = Some((idx, f.piece_for(idx).expect("piece per top instance")));
        }
    }
    for (idx, inst) in pc.cover().iter().enumerate() {
        if inst.poly.dim() != n {
            continue;
        }
        let Some((_, base_piece)) = base[inst.class] else {
            return Err(Error::BadInput(
                "class representative instance missing from cover".into(),
            ));
        };
        let piece = f.piece_for(idx).expect("piece per top instance");
        let lam = pc.lattice().basis_matrix().mul_vec(
            &inst
                .shift
                .iter()
                .map(|z| Q::from_integer(z.clone()))
                .collect::<QVec>(),
        );
        // transport of (m, c) by λ: (m + Bλ, c - m.λ + z_λ(0) - b(λ,λ))
        let m_t = vec_add(&base_piece.peg, &data.form.apply(&lam));
        let c_t = &base_piece.constant - dot(&base_piece.peg, &lam) + data.z_at_zero(&inst.shift)
            - data.form.eval(&lam, &lam);
        if piece.peg != m_t || piece.constant != c_t {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The order-reversing dual complex: one dual polytope per source cell.
#[derive(Debug, Clone)]
pub struct DualComplex {
    /// (source id, source dim, dual cell); source ids are class indices for
    /// periodic domains and cell indices for window domains
    pub cells: Vec<(usize, usize, Polytope)>,
}

impl DualComplex {
    pub fn vertex_duals(&self) -> Vec<&Polytope> {
        self.cells
            .iter()
            .filter(|(_, d, _)| *d == 0)
            .map(|(_, _, p)| p)
            .collect()
    }
}

pub fn dual_complex_of(f: &PlConvexFunction) -> Result<DualComplex> {
    let mut cells = Vec::new();
    match f.domain() {
        PlDomain::Window(cx) => {
            for (i, c) in cx.cells().iter().enumerate() {
                let dual = f.dual_cell(&CellRef::Window(c.clone()))?;
                cells.push((i, c.dim(), dual));
            }
        }
        PlDomain::Periodic(pc) => {
            for (i, c) in pc.classes().iter().enumerate() {
                let dual = f.dual_cell(&CellRef::Class(i))?;
                cells.push((i, c.dim(), dual));
            }
        }
    }
    Ok(DualComplex { cells })
}

/// The Voronoi model function of a polarized lattice: the decomposition
/// into Voronoi cells of (1/2)Λ under the metric q(u) = b(u,u)/2, with
/// g = max over half-lattice points w of b(., w) - q(w) (+ the optional
/// linear part via the g = ĝ/2 + l reduction).
pub fn voronoi_model_function(
    lattice: &Lattice,
    form: &BilinearForm,
    linear: Option<&QVec>,
) -> Result<(PeriodicComplex, PlConvexFunction)> {
    if !form.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    let n = lattice.ambient();
    if lattice.rank() != n {
        return Err(Error::RankDeficient);
    }
    // the canonical Hermite basis can be skew, so the coefficient box needed
    // to capture every cell's cutting neighbors grows with the skew; retry
    // with wider boxes until the tiling and injectivity checks pass
    for radius in [2i64, 3, 4, 6, 8] {
        match try_voronoi(lattice, form, linear, radius) {
            Ok(result) => return Ok(result),
            Err(Error::Unbounded) | Err(Error::BadInput(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::BadInput(
        "voronoi neighbor radius exhausted without a tiling".into(),
    ))
}

fn half_lattice_points(lattice: &Lattice, radius: i64) -> Vec<QVec> {
    let n = lattice.ambient();
    let half = Q::new(Z::one(), Z::from(2));
    let mut out = Vec::new();
    for z in crate::complexes::integer_box(&vec![-radius; n], &vec![radius; n]) {
        let coeffs: QVec = z
            .iter()
            .map(|x| Q::from_integer(x.clone()) * &half)
            .collect();
        out.push(lattice.basis_matrix().mul_vec(&coeffs));
    }
    out
}

fn try_voronoi(
    lattice: &Lattice,
    form: &BilinearForm,
    linear: Option<&QVec>,
    radius: i64,
) -> Result<(PeriodicComplex, PlConvexFunction)> {
    let n = lattice.ambient();
    let centers = half_lattice_points(lattice, radius);
    // the 2^n base centers: θ in {0, 1/2}^n in lattice coordinates
    let half = Q::new(Z::one(), Z::from(2));
    let mut base: Vec<QVec> = Vec::new();
    for z in crate::complexes::integer_box(&vec![0; n], &vec![1; n]) {
        let coeffs: QVec = z
            .iter()
            .map(|x| Q::from_integer(x.clone()) * &half)
            .collect();
        base.push(lattice.basis_matrix().mul_vec(&coeffs));
    }
    let mut tops = Vec::new();
    for w in &base {
        let mut hs = Vec::new();
        for w2 in &centers {
            if w2 == w {
                continue;
            }
            // b(u, w - w') >= q(w) - q(w')
            let d = vec_sub(w, w2);
            let normal = form.apply(&d);
            let offset = form.quadratic(w) - form.quadratic(w2);
            if let Some(h) = Halfspace::new(&normal, &offset) {
                hs.push(h);
            }
        }
        let cell = Polytope::from_halfspaces(n, &hs, &[])?
            .ok_or_else(|| Error::BadInput("empty voronoi cell".into()))?;
        tops.push(cell);
    }
    let pc = PeriodicComplex::from_top_cells(lattice.clone(), &tops)?;
    let f = attach_affine_pieces(
        &pc,
        |w| {
            let mut peg = form.apply(w);
            if let Some(l) = linear {
                peg = vec_add(&peg, l);
            }
            Piece {
                constant: -form.quadratic(w),
                peg,
            }
        },
        &centers,
        form,
    )?;
    Ok((pc, f))
}

/// Assign to each top cover instance the affine piece of the center whose
/// affine approximation is maximal at the instance's barycenter.
fn attach_affine_pieces(
    pc: &PeriodicComplex,
    piece_of_center: impl Fn(&QVec) -> Piece,
    centers: &[QVec],
    form: &BilinearForm,
) -> Result<PlConvexFunction> {
    let n = pc.ambient();
    let mut pieces = Vec::new();
    for (idx, inst) in pc.cover().iter().enumerate() {
        if inst.poly.dim() != n {
            continue;
        }
        let b = inst.poly.relative_interior_point();
        let best = centers
            .iter()
            .max_by(|w1, w2| {
                let a1 = form.eval(&b, w1) - form.quadratic(w1);
                let a2 = form.eval(&b, w2) - form.quadratic(w2);
                a1.cmp(&a2)
            })
            .expect("nonempty centers");
        pieces.push((idx, piece_of_center(best)));
    }
    PlConvexFunction::new(PlDomain::Periodic(pc.clone()), pieces)
}

/// Genericity of the scaled decompositions (1/m)C against a face-closed
/// family Σ of rational polytopes (classes modulo Λ):
/// (a) dim(A_σ ∩ A_Δ) = dim σ + dim Δ - n whenever that is >= 0, checked as
///     direction-span transversality;
/// (b) A_σ ∩ A_Δ = ∅ whenever dim σ + dim Δ - n < 0, over all Λ-translates.
/// Returns a witness (σ index, class index) on failure.
pub fn is_generic(
    pc: &PeriodicComplex,
    sigma: &[Polytope],
    m: u32,
) -> Result<Option<(usize, usize)>> {
    let n = pc.ambient();
    let closed = face_closure(sigma);
    let m_q = Q::new(Z::one(), Z::from(m as i64));
    let scaled_lattice = Lattice::from_generators(
        n,
        &pc.lattice()
            .basis_cols()
            .iter()
            .map(|c| crate::linalg::vec_scale(c, &m_q))
            .collect::<Vec<_>>(),
    );
    for (si, s) in closed.iter().enumerate() {
        let s_dirs = s.span_directions();
        let s_pt = s.relative_interior_point();
        for (ci, c) in pc.classes().iter().enumerate() {
            let c_dirs = c.span_directions();
            let c_pt = crate::linalg::vec_scale(&c.relative_interior_point(), &m_q);
            let d_sum = s.dim() + c.dim();
            let mut w_dirs = s_dirs.clone();
            w_dirs.extend(c_dirs.iter().cloned());
            if d_sum >= n {
                // (a): direction spans must together fill R^n
                let rank = if w_dirs.is_empty() {
                    0
                } else {
                    QMat::from_rows(w_dirs.clone()).rank()
                };
                if rank != n {
                    return Ok(Some((si, ci)));
                }
            } else {
                // (b): affine spans must miss each other over all translates
                let diff = vec_sub(&s_pt, &c_pt);
                if crate::lattices::in_subspace_plus_lattice(&diff, &w_dirs, &scaled_lattice) {
                    return Ok(Some((si, ci)));
                }
            }
        }
    }
    Ok(None)
}

fn face_closure(sigma: &[Polytope]) -> Vec<Polytope> {
    let mut out: Vec<Polytope> = Vec::new();
    for s in sigma {
        for f in s.all_faces() {
            if !out.contains(&f) {
                out.push(f);
            }
        }
    }
    out
}

/// Genericity perturbation: retry deterministic rational perturbations
/// of the Voronoi affine data until the induced decomposition is Σ-generic
/// for every m in 1..=m_max and the function is strongly polyhedral convex.
pub fn perturb_to_generic(
    lattice: &Lattice,
    form: &BilinearForm,
    sigma: &[Polytope],
    m_max: u32,
    seed: u64,
) -> Result<(PeriodicComplex, PlConvexFunction)> {
    if !form.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    let n = lattice.ambient();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last_witness = String::from("none");

    // denominator bound already present in the data
    let mut den = Z::one();
    for c in lattice.basis_cols() {
        for x in &c {
            den = lcm(&den, x.denom());
        }
    }
    for i in 0..n {
        for j in 0..n {
            den = lcm(&den, form.matrix()[(i, j)].denom());
        }
    }

    const ATTEMPTS: u32 = 64;
    for attempt in 0..ATTEMPTS {
        let result = if attempt == 0 {
            voronoi_model_function(lattice, form, None)
        } else {
            let step = Q::new(Z::one(), &den * Z::from(8i64 * attempt as i64));
            build_perturbed(lattice, form, &mut rng, &step)
        };
        let (pc, f) = match result {
            Ok(r) => r,
            Err(_) if attempt > 0 => continue,
            Err(e) => return Err(e),
        };
        if !f.ample_check()? {
            last_witness = "ampleness".into();
            continue;
        }
        let mut witness: Option<(u32, usize, usize)> = None;
        for m in 1..=m_max {
            if let Some((si, ci)) = is_generic(&pc, sigma, m)? {
                witness = Some((m, si, ci));
                break;
            }
        }
        match witness {
            None => return Ok((pc, f)),
            Some((m, si, ci)) => {
                last_witness = format!("m = {m}, sigma member {si}, cell class {ci}");
            }
        }
    }
    Err(Error::AttemptBoundExceeded(last_witness))
}

/// One perturbed power-diagram build: jitter the 2^n base pegs and constants
/// on a step-sized grid, extend Λ-equivariantly, and cut the cells of the
/// resulting max function.
fn build_perturbed(
    lattice: &Lattice,
    form: &BilinearForm,
    rng: &mut ChaCha8Rng,
    step: &Q,
) -> Result<(PeriodicComplex, PlConvexFunction)> {
    let n = lattice.ambient();
    let half = Q::new(Z::one(), Z::from(2));
    let mut base_centers: Vec<QVec> = Vec::new();
    for z in crate::complexes::integer_box(&vec![0; n], &vec![1; n]) {
        let coeffs: QVec = z
            .iter()
            .map(|x| Q::from_integer(x.clone()) * &half)
            .collect();
        base_centers.push(lattice.basis_matrix().mul_vec(&coeffs));
    }
    // perturbed base data: m_i near B u_i, c_i near -q(u_i). Denominators are
    // random primes so that the perturbed bisector lines do not land on
    // (1/m)Λ-rational positions through grid commensurability; the magnitude
    // stays within one `step`.
    const PRIMES: [i64; 12] = [101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157];
    let jitter = |rng: &mut ChaCha8Rng| -> Q {
        let p = PRIMES[rng.gen_range(0..PRIMES.len())];
        let mut r: i64 = 0;
        while r == 0 {
            r = rng.gen_range(-5..=5);
        }
        crate::num::qi(r) * step / crate::num::qi(p)
    };
    let base_data: Vec<(QVec, Q)> = base_centers
        .iter()
        .map(|w| {
            let mut m = form.apply(w);
            for c in m.iter_mut() {
                *c += jitter(rng);
            }
            let c = -form.quadratic(w) + jitter(rng);
            (m, c)
        })
        .collect();
    // Λ-translates: A_{i,λ}(u) = (m_i + Bλ) . u + c_i - m_i.λ - q(λ)
    let radius = 2i64;
    let mut family: Vec<(QVec, Q)> = Vec::new();
    for z in crate::complexes::integer_box(&vec![-radius; n], &vec![radius; n]) {
        let lam = lattice.basis_matrix().mul_vec(
            &z.iter()
                .map(|x| Q::from_integer(x.clone()))
                .collect::<QVec>(),
        );
        for (m, c) in &base_data {
            let m_l = vec_add(m, &form.apply(&lam));
            let c_l = c - dot(m, &lam) - form.quadratic(&lam);
            family.push((m_l, c_l));
        }
    }
    // cells of the base affine functions
    let mut tops = Vec::new();
    for (m, c) in &base_data {
        let mut hs = Vec::new();
        for (m2, c2) in &family {
            if m2 == m && c2 == c {
                continue;
            }
            // m.u + c >= m2.u + c2
            if let Some(h) = Halfspace::new(&vec_sub(m, m2), &(c2 - c)) {
                hs.push(h);
            }
        }
        let cell = Polytope::from_halfspaces(n, &hs, &[])?
            .ok_or_else(|| Error::BadInput("perturbation emptied a cell".into()))?;
        if cell.dim() != n {
            return Err(Error::BadInput("perturbation flattened a cell".into()));
        }
        tops.push(cell);
    }
    let pc = PeriodicComplex::from_top_cells(lattice.clone(), &tops)?;
    // pieces per top instance: the maximal family member at the barycenter
    let n_dim = pc.ambient();
    let mut pieces = Vec::new();
    for (idx, inst) in pc.cover().iter().enumerate() {
        if inst.poly.dim() != n_dim {
            continue;
        }
        let b = inst.poly.relative_interior_point();
        let (m, c) = family
            .iter()
            .max_by(|(m1, c1), (m2, c2)| (dot(m1, &b) + c1).cmp(&(dot(m2, &b) + c2)))
            .expect("nonempty family");
        pieces.push((
            idx,
            Piece {
                peg: m.clone(),
                constant: c.clone(),
            },
        ));
    }
    let f = PlConvexFunction::new(PlDomain::Periodic(pc.clone()), pieces)?;
    Ok((pc, f))
}
