//! Tangency of the `nu_0`, `nu_1` outputs, i.e. the commutation constraints
//! `sigma_p h_p = h_{p+1} iota_p`.

use super::gammas;
use qml::combinatorics::{enumerate_defects, DefectMatrix, GammaVector};
use qml::fixed_point::{canonical_nu1_power, nu0, nu1, p0, Completion, FixedPointData};
use qml::poly::Poly;

/// Unit seeds `f_{p,q} = 1` and `f_{p,q} = z^{d_{p,q}}` for every `q < p`.
fn nu0_seeds(d: &DefectMatrix) -> Vec<Vec<Poly>> {
    let n = d.n();
    let pairs: Vec<(usize, usize)> = (1..=n - 1).flat_map(|p| (1..p).map(move |q| (p, q))).collect();
    let mut seeds = Vec::new();
    for (i, &(p, q)) in pairs.iter().enumerate() {
        for k in [0, d.get(p, q) as usize] {
            let mut f = vec![Poly::zero(); pairs.len()];
            f[i] = Poly::z_pow(k);
            seeds.push(f);
        }
    }
    seeds
}

#[test]
fn top_power_nu1_is_always_tangent() {
    for g in gammas(4, 5) {
        for d in enumerate_defects(&g) {
            let fp = FixedPointData::build(&d);
            let j = canonical_nu1_power(&d).unwrap();
            let p = p0(&d).unwrap();
            assert_eq!(j + 1, d.get(p, p) as usize);
            let e = nu1(&fp, j).unwrap();
            assert!(fp.is_tangent(&e.vector).unwrap(), "{d}");
        }
    }
}

#[test]
fn lowest_class_nu1_is_not_tangent_at_the_vertex() {
    let d = DefectMatrix::parse("2;1,1").unwrap();
    let fp = FixedPointData::build(&d);
    let e = nu1(&fp, 0).unwrap();
    assert_eq!(e.completion, Completion::Failed);
    assert!(!fp.is_tangent(&e.vector).unwrap());
    assert!(fp.is_tangent(&nu1(&fp, 1).unwrap().vector).unwrap());
}

#[test]
fn nu0_outputs_are_tangent_up_to_n3() {
    for g in gammas(3, 5) {
        for d in enumerate_defects(&g) {
            let fp = FixedPointData::build(&d);
            for seed in nu0_seeds(&d) {
                let e = nu0(&fp, &seed).unwrap();
                assert!(fp.is_tangent(&e.vector).unwrap(), "{d}");
            }
        }
    }
}

#[test]
fn nu0_unit_seed_is_not_completable_at_three_n4_points() {
    let mut failing = Vec::new();
    for g in GammaVector::all_nonzero_up_to(4, 5) {
        for d in enumerate_defects(&g) {
            let fp = FixedPointData::build(&d);
            for seed in nu0_seeds(&d) {
                let e = nu0(&fp, &seed).unwrap();
                if !fp.is_tangent(&e.vector).unwrap() {
                    assert_eq!(e.completion, Completion::Failed);
                    failing.push(d.to_string());
                }
            }
        }
    }
    assert_eq!(failing, ["1;1,1;0,1,0", "1;1,1;0,1,1", "1;1,2;0,1,0"]);
}
