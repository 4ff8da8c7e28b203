//! Double description over the rationals.
//!
//! One engine powers the whole polyhedral kernel: given inequality rows
//! `a_i`, produce generators of the cone {x : a_i . x >= 0 for all i} as a
//! lineality basis plus extreme rays. Constraints are processed in input
//! order and ties broken lexicographically, so output is deterministic.

use crate::linalg::{dot, is_zero_vec, primitive_q, subspace_canonical_basis, QMat, QVec};
use num_traits::Zero;

/// Generators of {x in R^dim : a . x >= 0 for every a in `ineqs`}.
/// The cone is span(lines) + cone(rays); rays are primitive integer vectors.
pub fn cone_generators(dim: usize, ineqs: &[QVec]) -> (Vec<QVec>, Vec<QVec>) {
    if dim == 0 {
        return (Vec::new(), Vec::new());
    }
    let nontrivial: Vec<QVec> = ineqs.iter().filter(|a| !is_zero_vec(a)).cloned().collect();
    if nontrivial.is_empty() {
        let lines = (0..dim)
            .map(|i| {
                let mut e = vec![crate::num::qi(0); dim];
                e[i] = crate::num::qi(1);
                e
            })
            .collect();
        return (lines, Vec::new());
    }
    let a = QMat::from_rows(nontrivial.clone());
    let lines = a.kernel_basis();

    // complement of the lineality: standard basis vectors on the non-pivot
    // coordinates of the lineality's rref
    let line_pivots: Vec<usize> = if lines.is_empty() {
        Vec::new()
    } else {
        QMat::from_rows(lines.clone()).rref().1
    };
    let comp_coords: Vec<usize> = (0..dim).filter(|c| !line_pivots.contains(c)).collect();
    let q = comp_coords.len();
    if q == 0 {
        return (subspace_canonical_basis(&lines, dim), Vec::new());
    }

    // constraints restricted to the complement subspace
    let restricted: Vec<QVec> = nontrivial
        .iter()
        .map(|row| comp_coords.iter().map(|&c| row[c].clone()).collect())
        .collect();
    let rays_q = pointed_dd(q, &restricted);

    // map back to R^dim
    let rays = rays_q
        .into_iter()
        .map(|r| {
            let mut full = vec![crate::num::qi(0); dim];
            for (k, &c) in comp_coords.iter().enumerate() {
                full[c] = r[k].clone();
            }
            primitive_q(&full)
        })
        .collect();
    (subspace_canonical_basis(&lines, dim), rays)
}

/// DD for a pointed cone {x in R^q : rows . x >= 0} whose constraint rows
/// span the full dual space. Returns the extreme rays.
fn pointed_dd(q: usize, rows: &[QVec]) -> Vec<QVec> {
    // greedily pick q linearly independent rows for the simplicial start
    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..rows.len() {
        if chosen.len() == q {
            break;
        }
        let mut trial: Vec<QVec> = chosen.iter().map(|&k| rows[k].clone()).collect();
        trial.push(rows[i].clone());
        if QMat::from_rows(trial).rank() == chosen.len() + 1 {
            chosen.push(i);
        }
    }
    assert_eq!(chosen.len(), q, "cone is not pointed in the quotient");

    let a_i = QMat::from_rows(chosen.iter().map(|&k| rows[k].clone()).collect());
    let inv = a_i.inverse().expect("independent rows");
    let mut rays: Vec<QVec> = (0..q).map(|j| primitive_q(&inv.col(j))).collect();
    let mut processed: Vec<usize> = chosen.clone();

    for i in 0..rows.len() {
        if chosen.contains(&i) {
            continue;
        }
        let a = &rows[i];
        let vals: Vec<crate::num::Q> = rays.iter().map(|r| dot(a, r)).collect();
        let pos: Vec<usize> = (0..rays.len())
            .filter(|&k| vals[k] > crate::num::qi(0))
            .collect();
        let neg: Vec<usize> = (0..rays.len())
            .filter(|&k| vals[k] < crate::num::qi(0))
            .collect();
        if neg.is_empty() {
            processed.push(i);
            continue;
        }
        let tight: Vec<Vec<usize>> = rays
            .iter()
            .map(|r| {
                processed
                    .iter()
                    .copied()
                    .filter(|&k| dot(&rows[k], r).is_zero())
                    .collect()
            })
            .collect();
        let mut new_rays: Vec<QVec> = Vec::new();
        for &p in &pos {
            for &n in &neg {
                let common: Vec<usize> = tight[p]
                    .iter()
                    .copied()
                    .filter(|k| tight[n].contains(k))
                    .collect();
                // combinatorial adjacency: no third ray is tight on all of `common`
                let adjacent = (0..rays.len())
                    .all(|t| t == p || t == n || !common.iter().all(|k| tight[t].contains(k)));
                if !adjacent {
                    continue;
                }
                let mut r = Vec::with_capacity(q);
                for c in 0..q {
                    r.push(&vals[p] * &rays[n][c] - &vals[n] * &rays[p][c]);
                }
                let r = primitive_q(&r);
                if !is_zero_vec(&r) {
                    new_rays.push(r);
                }
            }
        }
        let mut kept: Vec<QVec> = (0..rays.len())
            .filter(|k| !neg.contains(k))
            .map(|k| rays[k].clone())
            .collect();
        for r in new_rays {
            if !kept.contains(&r) {
                kept.push(r);
            }
        }
        rays = kept;
        processed.push(i);
    }
    rays.sort();
    rays.dedup();
    rays
}

/// Vertices of the bounded polyhedron
/// {u : m . u >= c for (m, c) in ineqs} ∩ {m . u = c for (m, c) in eqs}.
/// `Ok(vec![])` means the set is empty; `Err(Unbounded)` that it has a ray.
pub fn vertices_of_intersection(
    dim: usize,
    ineqs: &[(QVec, crate::num::Q)],
    eqs: &[(QVec, crate::num::Q)],
) -> crate::Result<Vec<QVec>> {
    // homogenize with a leading coordinate t: rows (-c, m), equations both ways,
    // plus t >= 0
    let mut rows: Vec<QVec> = Vec::new();
    let mut t_row = vec![crate::num::qi(0); dim + 1];
    t_row[0] = crate::num::qi(1);
    rows.push(t_row);
    for (m, c) in ineqs {
        let mut row = Vec::with_capacity(dim + 1);
        row.push(-c.clone());
        row.extend(m.iter().cloned());
        rows.push(row);
    }
    for (m, c) in eqs {
        let mut row = Vec::with_capacity(dim + 1);
        row.push(-c.clone());
        row.extend(m.iter().cloned());
        rows.push(row.clone());
        rows.push(row.iter().map(|x| -x).collect());
    }
    let (lines, rays) = cone_generators(dim + 1, &rows);
    if !lines.is_empty() {
        return Err(crate::Error::Unbounded);
    }
    let mut verts = Vec::new();
    for r in rays {
        if r[0].is_zero() {
            return Err(crate::Error::Unbounded);
        }
        let t = r[0].clone();
        verts.push(r[1..].iter().map(|x| x / &t).collect::<QVec>());
    }
    verts.sort();
    verts.dedup();
    Ok(verts)
}
