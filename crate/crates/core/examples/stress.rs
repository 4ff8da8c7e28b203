//! Randomized stress run over the corner-locus pipeline: 300 polynomials,
//! purity of the interior part, concavity at interior samples, and the
//! membership oracle on a coarse grid. Run with --release.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tropgeo::num::{qr, Q};
use tropgeo::tropical::{
    auto_samples, box_window, check_total_concavity, tropical_hypersurface, TropicalPolynomial,
};
use tropgeo::Z;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xfeed);
    let window = box_window(2, 3);
    let mut nonempty = 0;
    for round in 0..300 {
        let k = rng.gen_range(2..=6);
        let mut terms: Vec<(Vec<Z>, Q)> = Vec::new();
        let mut seen: Vec<Vec<i64>> = Vec::new();
        for _ in 0..k {
            let e: Vec<i64> = (0..2).map(|_| rng.gen_range(-3..=3)).collect();
            if seen.contains(&e) {
                continue;
            }
            seen.push(e.clone());
            terms.push((
                e.into_iter().map(Z::from).collect(),
                qr(rng.gen_range(-12..=12), rng.gen_range(1..=6)),
            ));
        }
        if terms.len() < 2 {
            continue;
        }
        let f = TropicalPolynomial::new(2, terms).unwrap();
        let h =
            tropical_hypersurface(&f, &window).unwrap_or_else(|e| panic!("round {round}: {e:?}"));
        if h.is_empty() {
            continue;
        }
        nonempty += 1;
        // purity holds for the part meeting the window interior; tie loci
        // may graze the boundary in isolated points
        assert!(
            h.interior_support().check_pure_dimension(1).0,
            "round {round}: impure"
        );
        let report =
            check_total_concavity(&h.support(), &auto_samples(&h), Some(h.window())).unwrap();
        assert!(report.all_concave, "round {round}: not concave");
        // oracle on a coarse grid
        for ix in -6i64..=6 {
            for iy in -6i64..=6 {
                let u = vec![qr(ix, 2), qr(iy, 2)];
                assert_eq!(
                    h.contains(&u),
                    f.val_function(&u).1.len() >= 2,
                    "round {round} at {u:?}"
                );
            }
        }
    }
    println!("stress ok: {nonempty} nonempty hypersurfaces out of 300");
}
