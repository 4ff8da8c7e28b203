//! Integer lattices and bilinear forms.
//!
//! A [`Lattice`] is a finitely generated subgroup of Q^n of full rank in its
//! span, stored through a canonical (Hermite-reduced, denominator-scaled)
//! basis so that equal lattices compare equal. All the index, saturation,
//! stabilizer and dual computations the measure formulas need live here.

use crate::linalg::{dot, hermite_column_form, is_zero_vec, smith_normal_form, QMat, QVec, ZMat};
use crate::num::{Q, Z};
use crate::{Error, Result};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    ambient: usize,
    /// ambient x rank; columns are the canonical basis
    basis: QMat,
}

impl Lattice {
    /// Lattice generated by the given vectors (redundant or dependent
    /// generators are fine). Canonicalizes via Hermite reduction of the
    /// denominator-cleared generator matrix.
    pub fn from_generators(ambient: usize, gens: &[QVec]) -> Lattice {
        let nonzero: Vec<&QVec> = gens.iter().filter(|g| !is_zero_vec(g)).collect();
        if nonzero.is_empty() {
            return Lattice {
                ambient,
                basis: QMat::zero(ambient, 0),
            };
        }
        let mut den = Z::one();
        for g in &nonzero {
            assert_eq!(g.len(), ambient);
            for x in g.iter() {
                den = den.lcm(x.denom());
            }
        }
        let cols: Vec<Vec<Z>> = nonzero
            .iter()
            .map(|g| g.iter().map(|x| x.numer() * (&den / x.denom())).collect())
            .collect();
        let h = hermite_column_form(&ZMat::from_cols(cols));
        let mut basis = QMat::zero(ambient, h.cols);
        for i in 0..ambient {
            for j in 0..h.cols {
                basis[(i, j)] = Q::new(h[(i, j)].clone(), den.clone());
            }
        }
        Lattice { ambient, basis }
    }

    pub fn standard(n: usize) -> Lattice {
        Lattice {
            ambient: n,
            basis: QMat::identity(n),
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.basis.cols
    }

    pub fn basis_cols(&self) -> Vec<QVec> {
        self.basis.cols_vec()
    }

    pub fn basis_matrix(&self) -> &QMat {
        &self.basis
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        match self.coordinates_of(v) {
            Some(x) => x.iter().all(|c| c.denom().is_one()),
            None => false,
        }
    }

    /// Rational coordinates of `v` in the basis, if `v` lies in the span.
    pub fn coordinates_of(&self, v: &[Q]) -> Option<QVec> {
        if self.rank() == 0 {
            return if is_zero_vec(v) {
                Some(Vec::new())
            } else {
                None
            };
        }
        let x = self.basis.solve(v)?;
        if self.basis.mul_vec(&x) == v.to_vec() {
            Some(x)
        } else {
            None
        }
    }

    pub fn span_contains(&self, v: &[Q]) -> bool {
        self.coordinates_of(v).is_some()
    }

    /// span_Q(self) ∩ Z^ambient. Contains `self` with finite index when
    /// `self` is integral.
    pub fn saturate(&self) -> Lattice {
        let r = self.rank();
        if r == 0 {
            return self.clone();
        }
        // clear denominators; the span is unchanged
        let mut den = Z::one();
        for j in 0..r {
            for i in 0..self.ambient {
                den = den.lcm(self.basis[(i, j)].denom());
            }
        }
        let cols: Vec<Vec<Z>> = (0..r)
            .map(|j| {
                (0..self.ambient)
                    .map(|i| {
                        let x = &self.basis[(i, j)];
                        x.numer() * (&den / x.denom())
                    })
                    .collect()
            })
            .collect();
        let m = ZMat::from_cols(cols);
        let (u, _d, _v) = smith_normal_form(&m);
        let u_inv = u.to_q().inverse().expect("unimodular");
        let gens: Vec<QVec> = (0..r).map(|j| u_inv.col(j)).collect();
        Lattice::from_generators(self.ambient, &gens)
    }

    /// Integer index [other : self] when self ⊆ other with finite index.
    pub fn index_in(&self, other: &Lattice) -> Result<Z> {
        if self.rank() != other.rank() {
            return Err(Error::RankDeficient);
        }
        let mut coords: Vec<QVec> = Vec::new();
        for c in self.basis_cols() {
            let x = other
                .coordinates_of(&c)
                .ok_or_else(|| Error::BadInput("lattice is not inside the target span".into()))?;
            if !x.iter().all(|v| v.denom().is_one()) {
                return Err(Error::BadInput(
                    "lattice is not a sublattice of the target".into(),
                ));
            }
            coords.push(x);
        }
        let m = ZMat::from_cols(
            coords
                .iter()
                .map(|x| x.iter().map(|q| q.numer().clone()).collect())
                .collect(),
        );
        let (_, d, _) = smith_normal_form(&m);
        let mut idx = Z::one();
        for k in 0..d.rows.min(d.cols) {
            idx *= d[(k, k)].clone();
        }
        if idx.is_zero() {
            return Err(Error::RankDeficient);
        }
        Ok(idx.abs())
    }

    /// Generalized index [other : self] = covol(self)/covol(other), defined
    /// whenever the two lattices share their span. A positive rational; an
    /// integer exactly when self ⊆ other.
    pub fn relative_index(&self, other: &Lattice) -> Result<Q> {
        if self.rank() != other.rank() {
            return Err(Error::RankDeficient);
        }
        let mut coords: Vec<QVec> = Vec::new();
        for c in self.basis_cols() {
            let x = other
                .coordinates_of(&c)
                .ok_or_else(|| Error::BadInput("lattices do not share their span".into()))?;
            coords.push(x);
        }
        let det = QMat::from_cols(coords).det();
        if det.is_zero() {
            return Err(Error::RankDeficient);
        }
        Ok(det.abs())
    }

    /// |det| of the basis expressed in `coords` (an ambient x rank matrix
    /// whose columns form a basis of the span).
    pub fn covolume_in(&self, coords: &QMat) -> Result<Q> {
        let r = self.rank();
        if coords.cols != r {
            return Err(Error::RankDeficient);
        }
        let mut cols: Vec<QVec> = Vec::new();
        for c in self.basis_cols() {
            let x = coords
                .solve(&c)
                .ok_or_else(|| Error::BadInput("basis is not inside the coordinate span".into()))?;
            cols.push(x);
        }
        if r == 0 {
            return Ok(Q::one());
        }
        let det = QMat::from_cols(cols).det();
        if det.is_zero() {
            return Err(Error::RankDeficient);
        }
        Ok(det.abs())
    }

    /// Dual lattice {l in V* : l(self) ⊆ Z}, expressed in the dual basis of
    /// `coords`. The result lives in the rank-dimensional coordinate space.
    pub fn dual_in_coords(&self, coords: &QMat) -> Result<Lattice> {
        let r = self.rank();
        let mut cols: Vec<QVec> = Vec::new();
        for c in self.basis_cols() {
            let x = coords
                .solve(&c)
                .ok_or_else(|| Error::BadInput("basis is not inside the coordinate span".into()))?;
            cols.push(x);
        }
        let g = QMat::from_cols(cols);
        if g.rows != r || g.cols != r {
            return Err(Error::RankDeficient);
        }
        let dual_basis = g.transpose().inverse().ok_or(Error::RankDeficient)?;
        Ok(Lattice::from_generators(r, &dual_basis.cols_vec()))
    }

    /// Basis expressed in `coords` as a square matrix (rank x rank).
    pub fn basis_in_coords(&self, coords: &QMat) -> Result<QMat> {
        let mut cols: Vec<QVec> = Vec::new();
        for c in self.basis_cols() {
            let x = coords
                .solve(&c)
                .ok_or_else(|| Error::BadInput("basis is not inside the coordinate span".into()))?;
            cols.push(x);
        }
        Ok(QMat::from_cols(cols))
    }
}

/// One integer solution of A x = b over Z^cols, if any, via the Smith normal
/// form of the denominator-cleared system.
pub fn solve_integer(a: &QMat, b: &QVec) -> Option<Vec<Z>> {
    // clear denominators row-wise so integer solvability is preserved
    let mut rows: Vec<Vec<Z>> = Vec::with_capacity(a.rows);
    let mut rhs: Vec<Z> = Vec::with_capacity(a.rows);
    for i in 0..a.rows {
        let mut den = Z::one();
        for j in 0..a.cols {
            den = den.lcm(a[(i, j)].denom());
        }
        den = den.lcm(b[i].denom());
        rows.push(
            (0..a.cols)
                .map(|j| {
                    let x = &a[(i, j)];
                    x.numer() * (&den / x.denom())
                })
                .collect(),
        );
        rhs.push(b[i].numer() * (&den / b[i].denom()));
    }
    let m = ZMat::from_rows(rows);
    let (u, d, v) = smith_normal_form(&m);
    // D y = U rhs, x = V y
    let c: Vec<Z> = (0..u.rows)
        .map(|i| {
            (0..u.cols)
                .map(|j| &u[(i, j)] * &rhs[j])
                .fold(Z::zero(), |acc, t| acc + t)
        })
        .collect();
    let t = d.rows.min(d.cols);
    let mut y = vec![Z::zero(); d.cols];
    for i in 0..d.rows {
        if i < t && !d[(i, i)].is_zero() {
            if !(&c[i] % &d[(i, i)]).is_zero() {
                return None;
            }
            y[i] = &c[i] / &d[(i, i)];
        } else if !c[i].is_zero() {
            return None;
        }
    }
    let x: Vec<Z> = (0..v.rows)
        .map(|i| {
            (0..v.cols)
                .map(|j| &v[(i, j)] * &y[j])
                .fold(Z::zero(), |acc, t| acc + t)
        })
        .collect();
    Some(x)
}

/// {x in Z^cols : M x = 0} as a lattice in Z^cols.
pub fn integer_kernel_lattice(m: &QMat) -> Lattice {
    let ker = m.kernel_basis();
    Lattice::from_generators(m.cols, &ker).saturate()
}

/// Z-basis of span(dirs) ∩ Z^ambient, as an ambient x d matrix. This is the
/// lattice-adapted chart every relative volume in the measure formulas is
/// taken in.
pub fn span_saturation_basis(ambient: usize, dirs: &[QVec]) -> QMat {
    let lat = Lattice::from_generators(ambient, dirs).saturate();
    QMat::from_cols(lat.basis_cols())
}

/// Stabilizer Λ ∩ L of an affine subspace with direction space L inside the
/// full-rank lattice Λ. The offset of the subspace is irrelevant.
pub fn stabilizer_lattice(lambda: &Lattice, dir_basis: &[QVec]) -> Lattice {
    let n = lambda.ambient();
    // rows spanning L^perp
    let perp_rows = if dir_basis.is_empty() {
        QMat::identity(n).rows_vec()
    } else {
        QMat::from_rows(dir_basis.to_vec()).kernel_basis()
    };
    if perp_rows.is_empty() {
        // L is everything
        return lambda.clone();
    }
    let c = QMat::from_rows(perp_rows);
    let ce = c.mul(lambda.basis_matrix());
    let int_ker = integer_kernel_lattice(&ce);
    let gens: Vec<QVec> = int_ker
        .basis_cols()
        .iter()
        .map(|x| lambda.basis_matrix().mul_vec(x))
        .collect();
    Lattice::from_generators(n, &gens)
}

/// Does w lie in span(dirs) + Λ? Decides condition (b) of genericity and
/// span-class grouping for periodic objects.
pub fn in_subspace_plus_lattice(w: &[Q], dirs: &[QVec], lambda: &Lattice) -> bool {
    let n = w.len();
    let perp_rows = if dirs.is_empty() {
        QMat::identity(n).rows_vec()
    } else {
        QMat::from_rows(dirs.to_vec()).kernel_basis()
    };
    if perp_rows.is_empty() {
        return true;
    }
    let p = QMat::from_rows(perp_rows);
    let pw = p.mul_vec(w);
    let proj_gens: Vec<QVec> = lambda.basis_cols().iter().map(|c| p.mul_vec(c)).collect();
    let image = Lattice::from_generators(p.rows, &proj_gens);
    image.contains(&pw)
}

/// Symmetric rational bilinear form b(u, v) = u^T B v.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BilinearForm {
    mat: QMat,
}

impl BilinearForm {
    pub fn new(mat: QMat) -> Result<BilinearForm> {
        if mat.rows != mat.cols {
            return Err(Error::DimensionMismatch(mat.rows, mat.cols));
        }
        for i in 0..mat.rows {
            for j in 0..i {
                if mat[(i, j)] != mat[(j, i)] {
                    return Err(Error::BadInput("bilinear form is not symmetric".into()));
                }
            }
        }
        Ok(BilinearForm { mat })
    }

    pub fn dim(&self) -> usize {
        self.mat.rows
    }

    pub fn matrix(&self) -> &QMat {
        &self.mat
    }

    pub fn eval(&self, u: &[Q], v: &[Q]) -> Q {
        dot(u, &self.mat.mul_vec(v))
    }

    /// q(u) = b(u, u) / 2
    pub fn quadratic(&self, u: &[Q]) -> Q {
        self.eval(u, u) / crate::num::qi(2)
    }

    /// Gradient of q at u, i.e. the vector B u.
    pub fn apply(&self, u: &[Q]) -> QVec {
        self.mat.mul_vec(u)
    }

    /// Sylvester's criterion on leading principal minors.
    pub fn is_positive_definite(&self) -> bool {
        for k in 1..=self.mat.rows {
            let mut sub = QMat::zero(k, k);
            for i in 0..k {
                for j in 0..k {
                    sub[(i, j)] = self.mat[(i, j)].clone();
                }
            }
            if sub.det() <= Q::zero() {
                return false;
            }
        }
        true
    }

    /// S^T B S: the form restricted to the column span of S, in S-coordinates.
    pub fn restrict(&self, s: &QMat) -> QMat {
        s.transpose().mul(&self.mat).mul(s)
    }
}

/// Affine map u' -> M u' + t with integer linear part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineMap {
    pub linear: ZMat,
    pub translation: QVec,
}

impl AffineMap {
    pub fn new(linear: ZMat, translation: QVec) -> Result<AffineMap> {
        if linear.rows != translation.len() {
            return Err(Error::DimensionMismatch(linear.rows, translation.len()));
        }
        Ok(AffineMap {
            linear,
            translation,
        })
    }

    pub fn domain_dim(&self) -> usize {
        self.linear.cols
    }

    pub fn target_dim(&self) -> usize {
        self.linear.rows
    }

    pub fn rank(&self) -> usize {
        self.linear.to_q().rank()
    }

    pub fn apply(&self, u: &[Q]) -> QVec {
        let lin = self.linear.to_q().mul_vec(u);
        crate::linalg::vec_add(&lin, &self.translation)
    }
}

/// Index of the image of M inside the target lattice, via the Smith normal
/// form of the coordinate matrix. Errors if the image is rank deficient or
/// is not a sublattice of the target.
pub fn index_of_image(m: &ZMat, target: &Lattice) -> Result<Z> {
    let gens: Vec<QVec> = (0..m.cols)
        .map(|j| m.col(j).into_iter().map(Q::from_integer).collect())
        .collect();
    let image = Lattice::from_generators(m.rows, &gens);
    if image.rank() != m.cols {
        return Err(Error::RankDeficient);
    }
    image.index_in(target)
}

/// Lattice of functionals b(. , λ) restricted to the column span of
/// `v_coords`, for λ in `stab`, expressed in the dual basis of `v_coords`.
pub fn form_lattice(b: &BilinearForm, stab: &Lattice, v_coords: &QMat) -> Result<Lattice> {
    let restricted = b.restrict(v_coords);
    if restricted.rank() < v_coords.cols {
        return Err(Error::DegenerateRestriction);
    }
    let gens: Vec<QVec> = stab
        .basis_cols()
        .iter()
        .map(|lam| v_coords.transpose().mul(b.matrix()).mul_vec(lam))
        .collect();
    Ok(Lattice::from_generators(v_coords.cols, &gens))
}
