//! Brute-force and cross-engine oracles.

use proptest::prelude::*;

use super::gammas;
use qml::ambient::{stratum_tangent, subsets, AmbientLayout};
use qml::combinatorics::{defect_to_kappa, enumerate_defects, kappa_to_defect, GammaVector};
use qml::fixed_point::{dpi, FixedPointData};
use qml::graded::{dpi_general, minors_of_columns, quiver_tangent_at, quiver_tangent_general, Gauge, Quasiflag};
use qml::linalg::{q, Subspace, Q};
use qml::poly::Poly;

/// Wedge lines of `(z^{c_p} e_1, e_2, .., e_p)` after adding `e_row` to
/// column `col`, minus the undeformed ones, in ambient coordinates.
fn wedge_motion(layout: &AmbientLayout, row: usize, col: usize) -> Vec<Q> {
    let gamma = layout.gamma().clone();
    let n = gamma.n();
    let mut v = vec![q(0); layout.dim()];
    for p in 1..n {
        let c = gamma.c(p) as usize;
        let columns = |moved: bool| -> Vec<Vec<Poly>> {
            (1..=p)
                .map(|k| {
                    let mut e = vec![Poly::zero(); n];
                    e[k - 1] = if k == 1 { Poly::z_pow(c) } else { Poly::one() };
                    if moved && k == col {
                        e[row - 1] = &e[row - 1] + &(if k == 1 { Poly::z_pow(c) } else { Poly::one() });
                    }
                    e
                })
                .collect()
        };
        let before = minors_of_columns(&columns(false), n);
        let after = minors_of_columns(&columns(true), n);
        for (s, (a, b)) in subsets(n, p).iter().zip(after.iter().zip(&before)) {
            let d = a - b;
            for k in 0..=c {
                let x = d.coeff(k);
                if x == q(0) {
                    continue;
                }
                if s.iter().copied().eq(1..=p) {
                    assert!(k == c, "top motion off the line");
                } else {
                    v[layout.free_coord(p, s, k)] += x;
                }
            }
        }
    }
    v
}

#[test]
fn stratum_tangent_matches_wedge_motions() {
    for g in gammas(4, 4) {
        let layout = AmbientLayout::new(&g);
        let n = g.n();
        let mut vectors: Vec<Vec<Q>> = Vec::new();
        for row in 1..=n {
            for col in 1..row {
                vectors.push(wedge_motion(&layout, row, col));
            }
        }
        // moving the defect point: d/dx (z - x)^{c_p}
        let mut point = vec![q(0); layout.dim()];
        for p in 1..n {
            let c = g.c(p) as usize;
            if c > 0 {
                point[layout.torsion_coord(p, c - 1)] = q(-(c as i64));
            }
        }
        vectors.push(point);
        let oracle = Subspace::span(layout.dim(), vectors);
        assert_eq!(oracle, stratum_tangent(&g).unwrap(), "gamma=({g})");
    }
}

#[test]
fn graded_results_do_not_depend_on_truncation_level() {
    for g in gammas(3, 3) {
        for d in enumerate_defects(&g) {
            let qf = Quasiflag::fixed_point(&d);
            let base = quiver_tangent_general(&qf).unwrap();
            let reference = dpi_general(&base, None).unwrap();
            let image = reference.image_in_layout(&qf).unwrap();
            for m in [base.m + 1, base.m + 2] {
                let t = quiver_tangent_at(&qf, m).unwrap();
                assert_eq!(t.m, m, "{d}: level {m} was not certified");
                let map = dpi_general(&t, None).unwrap();
                assert_eq!(map.kernel_dim(), reference.kernel_dim(), "{d} at level {m}");
                assert_eq!(map.image_in_layout(&qf).unwrap(), image, "{d} at level {m}");
            }
        }
    }
}

#[test]
fn graded_results_do_not_depend_on_gauge() {
    for g in gammas(3, 3) {
        for d in enumerate_defects(&g) {
            let qf = Quasiflag::fixed_point(&d);
            let t = quiver_tangent_general(&qf).unwrap();
            let plain = dpi_general(&t, None).unwrap();
            for seed in [1, 7, 42] {
                let gauged = dpi_general(&t, Some(Gauge(seed))).unwrap();
                assert_eq!(gauged.kernel_dim(), plain.kernel_dim(), "{d} gauge {seed}");
                assert_eq!(gauged.image_in_layout(&qf).unwrap(), plain.image_in_layout(&qf).unwrap());
            }
        }
    }
}

#[test]
fn fast_and_graded_tangent_dimensions_agree_for_n4() {
    for g in GammaVector::all_nonzero_up_to(4, 2) {
        for d in enumerate_defects(&g) {
            let fast = dpi(&FixedPointData::build(&d)).unwrap();
            let qf = Quasiflag::fixed_point(&d);
            let t = quiver_tangent_general(&qf).unwrap();
            let slow = dpi_general(&t, None).unwrap();
            assert_eq!(t.dim(), fast.tangent.dim(), "{d}");
            assert_eq!(slow.kernel_dim(), fast.kernel_dim(), "{d}");
        }
    }
}

#[test]
fn quasiflag_json_roundtrip() {
    for g in gammas(3, 2) {
        for d in enumerate_defects(&g) {
            let qf = Quasiflag::fixed_point(&d);
            let json = serde_json::to_string(&qf.to_doc()).unwrap();
            let back = Quasiflag::from_json(&json).unwrap();
            assert_eq!(back.to_doc(), qf.to_doc());
            assert_eq!(back.gamma(), qf.gamma());
        }
    }
}

fn gamma_strategy() -> impl Strategy<Value = GammaVector> {
    (2usize..=5).prop_flat_map(|n| prop::collection::vec(0u32..=3, n - 1)).prop_filter_map("nonzero", |cs| {
        let g = GammaVector::new(cs.len() + 1, cs).ok()?;
        (!g.is_zero()).then_some(g)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn defect_kappa_maps_are_inverse(g in gamma_strategy()) {
        for d in enumerate_defects(&g) {
            prop_assert_eq!(kappa_to_defect(&defect_to_kappa(&d)), d.clone());
            prop_assert_eq!(defect_to_kappa(&d).weight(), g.clone());
        }
    }
}
