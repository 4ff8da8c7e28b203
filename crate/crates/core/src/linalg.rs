//! Dense exact linear algebra over `Q` and `Z`.
//!
//! Small hand-rolled kernels: Gaussian elimination with exact pivoting,
//! Smith normal form with unimodular transforms, and a column-style Hermite
//! form used to canonicalize lattice bases. Dimensions in this crate are
//! tiny (n <= 4 in practice), so clarity wins over asymptotics.

use crate::num::{Q, Z};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type QVec = Vec<Q>;

pub fn qvec_zero(n: usize) -> QVec {
    vec![Q::zero(); n]
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn vec_add(a: &[Q], b: &[Q]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_sub(a: &[Q], b: &[Q]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_scale(a: &[Q], s: &Q) -> QVec {
    a.iter().map(|x| x * s).collect()
}

pub fn vec_neg(a: &[Q]) -> QVec {
    a.iter().map(|x| -x).collect()
}

pub fn is_zero_vec(a: &[Q]) -> bool {
    a.iter().all(|x| x.is_zero())
}

/// Scale a rational vector to a primitive integer vector pointing the same
/// way. The zero vector stays zero.
pub fn primitive(a: &[Q]) -> Vec<Z> {
    if is_zero_vec(a) {
        return vec![Z::zero(); a.len()];
    }
    let mut den = Z::one();
    for x in a {
        den = den.lcm(x.denom());
    }
    let ints: Vec<Z> = a.iter().map(|x| x.numer() * (&den / x.denom())).collect();
    let mut g = Z::zero();
    for v in &ints {
        g = g.gcd(v);
    }
    ints.iter().map(|v| v / &g).collect()
}

pub fn primitive_q(a: &[Q]) -> QVec {
    primitive(a).into_iter().map(Q::from_integer).collect()
}

/// Row-major dense rational matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Q>,
}

impl QMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        QMat {
            rows,
            cols,
            data: vec![Q::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMat::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Q::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<QVec>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        assert!(rows.iter().all(|v| v.len() == c));
        QMat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_cols(cols: Vec<QVec>) -> Self {
        QMat::from_rows(cols).transpose()
    }

    pub fn row(&self, i: usize) -> QVec {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> QVec {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn rows_vec(&self) -> Vec<QVec> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn cols_vec(&self) -> Vec<QVec> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn transpose(&self) -> QMat {
        let mut t = QMat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, rhs: &QMat) -> QMat {
        assert_eq!(self.cols, rhs.rows);
        let mut m = QMat::zero(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self[(i, k)].is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let add = &self[(i, k)] * &rhs[(k, j)];
                    m[(i, j)] += add;
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[Q]) -> QVec {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| dot(&self.row(i), v)).collect()
    }

    /// Reduced row echelon form; returns the pivot columns.
    pub fn rref(&self) -> (QMat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            // first nonzero entry in column c at or below row r
            let Some(pr) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, pr);
            let inv = m[(r, c)].clone();
            for j in 0..m.cols {
                m[(r, j)] = &m[(r, j)] / &inv;
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in 0..m.cols {
                        let sub = &f * &m[(r, j)];
                        m[(i, j)] -= sub;
                    }
                }
            }
            pivots.push(c);
            r += 1;
            if r == m.rows {
                break;
            }
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of {x : Mx = 0}, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<QVec> {
        let (r, pivots) = self.rref();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivots.contains(&free) {
                continue;
            }
            let mut v = qvec_zero(self.cols);
            v[free] = Q::one();
            for (pi, &pc) in pivots.iter().enumerate() {
                v[pc] = -r[(pi, free)].clone();
            }
            basis.push(v);
        }
        basis
    }

    /// One solution of Mx = b, if any.
    pub fn solve(&self, b: &[Q]) -> Option<QVec> {
        assert_eq!(self.rows, b.len());
        let mut aug = QMat::zero(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let (r, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return None; // inconsistent
        }
        let mut x = qvec_zero(self.cols);
        for (pi, &pc) in pivots.iter().enumerate() {
            x[pc] = r[(pi, self.cols)].clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<QMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = QMat::zero(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Q::one();
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        let mut inv = QMat::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = r[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    pub fn det(&self) -> Q {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Q::one();
        for c in 0..n {
            let Some(pr) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return Q::zero();
            };
            if pr != c {
                m.swap_rows(c, pr);
                det = -det;
            }
            det *= m[(c, c)].clone();
            let inv = m[(c, c)].clone();
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let f = &m[(i, c)] / &inv;
                for j in c..n {
                    let sub = &f * &m[(c, j)];
                    m[(i, j)] -= sub;
                }
            }
        }
        det
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl std::ops::Index<(usize, usize)> for QMat {
    type Output = Q;
    fn index(&self, (i, j): (usize, usize)) -> &Q {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Q {
        &mut self.data[i * self.cols + j]
    }
}

/// Polarized determinant of square matrices, normalized so that
/// D(M, ..., M) = det(M):
/// D = (1/d!) Σ_{∅ != S ⊆ [d]} (-1)^{d-|S|} det(Σ_{i in S} M_i).
/// This is the unique symmetric function multilinear in the slots that
/// restricts to the determinant on the diagonal (the mixed discriminant).
pub fn mixed_determinant(ms: &[QMat]) -> Q {
    let d = ms.len();
    assert!(d > 0 && d <= 32);
    for m in ms {
        assert_eq!(m.rows, d);
        assert_eq!(m.cols, d);
    }
    let mut total = Q::zero();
    for mask in 1u32..(1 << d) {
        let mut sum = QMat::zero(d, d);
        for (i, m) in ms.iter().enumerate() {
            if mask & (1 << i) == 0 {
                continue;
            }
            for r in 0..d {
                for c in 0..d {
                    let add = m[(r, c)].clone();
                    sum[(r, c)] += add;
                }
            }
        }
        let term = sum.det();
        if (d - mask.count_ones() as usize) % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    let mut fact = Q::one();
    for k in 2..=d {
        fact *= Q::from_integer(Z::from(k as i64));
    }
    total / fact
}

/// Canonical basis of the row span of `rows` (the nonzero rows of the rref).
/// Two lists of vectors span the same subspace iff they canonicalize to the
/// same list.
pub fn subspace_canonical_basis(rows: &[QVec], dim: usize) -> Vec<QVec> {
    if rows.is_empty() {
        return Vec::new();
    }
    let m = QMat::from_rows(rows.to_vec());
    assert_eq!(m.cols, dim);
    let (r, pivots) = m.rref();
    (0..pivots.len()).map(|i| r.row(i)).collect()
}

/// Row-major dense integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Z>,
}

impl ZMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        ZMat {
            rows,
            cols,
            data: vec![Z::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = ZMat::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Z::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Z>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        assert!(rows.iter().all(|v| v.len() == c));
        ZMat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_cols(cols: Vec<Vec<Z>>) -> Self {
        let m = ZMat::from_rows(cols);
        m.transpose()
    }

    pub fn transpose(&self) -> ZMat {
        let mut t = ZMat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn to_q(&self) -> QMat {
        let mut m = QMat::zero(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = Q::from_integer(self[(i, j)].clone());
            }
        }
        m
    }

    pub fn mul(&self, rhs: &ZMat) -> ZMat {
        assert_eq!(self.cols, rhs.rows);
        let mut m = ZMat::zero(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self[(i, k)].is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let add = &self[(i, k)] * &rhs[(k, j)];
                    m[(i, j)] += add;
                }
            }
        }
        m
    }

    pub fn col(&self, j: usize) -> Vec<Z> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn add_row_multiple(&mut self, dst: usize, src: usize, f: &Z) {
        for j in 0..self.cols {
            let add = f * &self[(src, j)];
            self[(dst, j)] += add;
        }
    }

    fn add_col_multiple(&mut self, dst: usize, src: usize, f: &Z) {
        for i in 0..self.rows {
            let add = f * &self[(i, src)];
            self[(i, dst)] += add;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self[(i, j)].clone();
            self[(i, j)] = v;
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -self[(i, j)].clone();
            self[(i, j)] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for ZMat {
    type Output = Z;
    fn index(&self, (i, j): (usize, usize)) -> &Z {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ZMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Z {
        &mut self.data[i * self.cols + j]
    }
}

/// Smith normal form: returns (U, D, V) with U*M*V = D, U and V unimodular,
/// D diagonal with d1 | d2 | ... and nonnegative diagonal.
///
/// Pivot choice is the minimal nonzero absolute value, first in
/// row-major scan order, so the transforms are reproducible.
pub fn smith_normal_form(m: &ZMat) -> (ZMat, ZMat, ZMat) {
    let mut d = m.clone();
    let mut u = ZMat::identity(m.rows);
    let mut v = ZMat::identity(m.cols);
    let t = m.rows.min(m.cols);
    for k in 0..t {
        loop {
            // minimal nonzero |entry| in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in k..d.rows {
                for j in k..d.cols {
                    if d[(i, j)].is_zero() {
                        continue;
                    }
                    match best {
                        None => best = Some((i, j)),
                        Some((bi, bj)) => {
                            if d[(i, j)].abs() < d[(bi, bj)].abs() {
                                best = Some((i, j));
                            }
                        }
                    }
                }
            }
            let Some((pi, pj)) = best else {
                // trailing block is zero; done with all remaining k
                return finish_snf(d, u, v, k);
            };
            d.swap_rows(k, pi);
            u.swap_rows(k, pi);
            d.swap_cols(k, pj);
            v.swap_cols(k, pj);

            let mut clean = true;
            for i in k + 1..d.rows {
                if d[(i, k)].is_zero() {
                    continue;
                }
                let f = -(&d[(i, k)] / &d[(k, k)]);
                d.add_row_multiple(i, k, &f);
                u.add_row_multiple(i, k, &f);
                if !d[(i, k)].is_zero() {
                    clean = false;
                }
            }
            for j in k + 1..d.cols {
                if d[(k, j)].is_zero() {
                    continue;
                }
                let f = -(&d[(k, j)] / &d[(k, k)]);
                d.add_col_multiple(j, k, &f);
                v.add_col_multiple(j, k, &f);
                if !d[(k, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility: d[k][k] must divide the whole trailing block
            let mut offender = None;
            'scan: for i in k + 1..d.rows {
                for j in k + 1..d.cols {
                    if !(&d[(i, j)] % &d[(k, k)]).is_zero() {
                        offender = Some(i);
                        break 'scan;
                    }
                }
            }
            match offender {
                Some(i) => {
                    d.add_row_multiple(k, i, &Z::one());
                    u.add_row_multiple(k, i, &Z::one());
                }
                None => break,
            }
        }
        if d[(k, k)].is_negative() {
            d.negate_row(k);
            u.negate_row(k);
        }
    }
    finish_snf(d, u, v, t)
}

fn finish_snf(mut d: ZMat, mut u: ZMat, v: ZMat, upto: usize) -> (ZMat, ZMat, ZMat) {
    for k in 0..upto.min(d.rows.min(d.cols)) {
        if d[(k, k)].is_negative() {
            d.negate_row(k);
            u.negate_row(k);
        }
    }
    (u, d, v)
}

/// Column-style Hermite normal form. Returns H with the same column span
/// over Z as `m`, zero columns dropped, in a canonical lower-echelon shape:
/// each column's leading (topmost nonzero) entry is positive, strictly
/// descending pivot rows are not required but pivot rows increase, and
/// entries to the right of a pivot in its row are reduced into [0, pivot).
pub fn hermite_column_form(m: &ZMat) -> ZMat {
    let mut h = m.clone();
    let mut col = 0;
    for row in 0..h.rows {
        if col == h.cols {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for j in col..h.cols {
                if h[(row, j)].is_zero() {
                    continue;
                }
                match best {
                    None => best = Some(j),
                    Some(bj) => {
                        if h[(row, j)].abs() < h[(row, bj)].abs() {
                            best = Some(j);
                        }
                    }
                }
            }
            let Some(bj) = best else {
                break;
            };
            h.swap_cols(col, bj);
            if h[(row, col)].is_negative() {
                h.negate_col(col);
            }
            let mut done = true;
            for j in col + 1..h.cols {
                if h[(row, j)].is_zero() {
                    continue;
                }
                let f = -(&h[(row, j)] / &h[(row, col)]);
                h.add_col_multiple(j, col, &f);
                if !h[(row, j)].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if !h[(row, col)].is_zero() {
            // reduce earlier columns' entries in this row into [0, pivot)
            for j in 0..col {
                let f = -h[(row, j)].div_floor(&h[(row, col)]);
                if !f.is_zero() {
                    h.add_col_multiple(j, col, &f);
                }
            }
            col += 1;
        }
    }
    // drop zero columns
    let keep: Vec<usize> = (0..h.cols)
        .filter(|&j| (0..h.rows).any(|i| !h[(i, j)].is_zero()))
        .collect();
    let cols: Vec<Vec<Z>> = keep.iter().map(|&j| h.col(j)).collect();
    if cols.is_empty() {
        ZMat::zero(h.rows, 0)
    } else {
        ZMat::from_cols(cols)
    }
}
