//! Cross-module consistency on a non-rectangular lattice: the canonical
//! measure of the full torus computed from a unimodular simplex cover must
//! match the dual-complex degree sum of the Voronoi model function, and the
//! covering identity must hold for the hexagonal cells that lattice
//! produces.

use num_traits::{One, Zero};
use tropgeo::lattices::{AffineMap, BilinearForm, Lattice};
use tropgeo::linalg::{QMat, QVec, ZMat};
use tropgeo::measure::{atoms, canonical_measure, CycleSimplex, TropicalCycle};
use tropgeo::num::{qi, Q};
use tropgeo::plc::{check_cocycle, dual_complex_of, voronoi_model_function, CocycleData};
use tropgeo::Z;

fn skew_lattice() -> Lattice {
    Lattice::from_generators(2, &[vec![qi(2), qi(0)], vec![qi(1), qi(3)]])
}

/// The torus R^2/Λ tiled by the 2 |det Λ| = 12 unit half-square triangles
/// with unimodular frames.
fn unit_triangle_cover(lattice: &Lattice) -> TropicalCycle {
    let mut simplices = Vec::new();
    // unit squares at x in 0..2, y in 0..3 tile a fundamental domain of
    // [[2,1],[0,3]] modulo the lattice
    for x in 0..2i64 {
        for y in 0..3i64 {
            let t: QVec = vec![qi(x), qi(y)];
            simplices.push(CycleSimplex {
                map: AffineMap::new(
                    ZMat::from_rows(vec![
                        vec![Z::from(1), Z::from(0)],
                        vec![Z::from(0), Z::from(1)],
                    ]),
                    t.clone(),
                )
                .unwrap(),
                vpi: qi(1),
            });
            simplices.push(CycleSimplex {
                map: AffineMap::new(
                    ZMat::from_rows(vec![
                        vec![Z::from(-1), Z::from(0)],
                        vec![Z::from(0), Z::from(-1)],
                    ]),
                    vec![qi(x + 1), qi(y + 1)],
                )
                .unwrap(),
                vpi: qi(1),
            });
        }
    }
    TropicalCycle::new(2, lattice.clone(), Z::one(), simplices).unwrap()
}

#[test]
fn measure_equals_degree_sum_on_a_skew_lattice() {
    let lattice = skew_lattice();
    let b = BilinearForm::new(QMat::identity(2)).unwrap();
    let cycle = unit_triangle_cover(&lattice);

    // every triangle is its own atom with a singleton sheet set
    let ats = atoms(&cycle).unwrap();
    assert_eq!(ats.len(), 12);
    assert!(ats.iter().all(|a| a.j_set.len() == 1));
    let total_volume: Q = ats.iter().map(|a| a.volume()).sum();
    assert_eq!(total_volume, qi(6)); // the covolume, in Z^2 coordinates

    let mu = canonical_measure(&cycle, &[b.clone(), b.clone()]).unwrap();
    assert!(mu.is_strictly_positive());
    let mass = mu.total_mass();

    // the Voronoi route: hexagonal cells for this lattice
    let (pc, g) = voronoi_model_function(&lattice, &b, None).unwrap();
    assert!(g.ample_check().unwrap());
    let data = CocycleData::from_form(lattice.clone(), b.clone(), None).unwrap();
    assert!(check_cocycle(&g, &data).unwrap());
    // some cell of this Voronoi decomposition is a genuine hexagon
    let n = pc.ambient();
    let max_facets = pc
        .classes()
        .iter()
        .filter(|c| c.dim() == n)
        .map(|c| c.facets().len())
        .max()
        .unwrap();
    assert_eq!(max_facets, 6);

    // covering identity in the dual
    let dc = dual_complex_of(&g).unwrap();
    let dual_total: Q = dc.vertex_duals().iter().map(|p| p.volume_full()).sum();
    let fl = tropgeo::lattices::form_lattice(&b, &lattice, &QMat::identity(2)).unwrap();
    assert_eq!(dual_total, fl.covolume_in(&QMat::identity(2)).unwrap());

    // degree route: Σ over vertex classes of deg(N g) / N^d
    let (_, n_scale) = g.model_function_check();
    let g_int = g.scale_values(&n_scale);
    let mut degree_sum = Q::zero();
    for c in pc.classes().iter().filter(|c| c.dim() == 0) {
        degree_sum += g_int.degree_at_vertex(&c.vertices()[0], 2).unwrap();
    }
    let n_pow = Q::from_integer(&n_scale * &n_scale);
    assert_eq!(mass, degree_sum / n_pow);
}
