use std::collections::BTreeMap;
use std::f64::consts::PI;

use flowspin::bieberbach::*;
use flowspin::error::Error;
use nalgebra::Vector3;
mod common;

use common::{bits, closed_form};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn alpha_sets_match_closed_forms() {
    let params = BTreeMap::new();
    let (lo, hi) = (-15.0 * PI, 15.0 * PI);
    for name in [GroupName::G1, GroupName::G2, GroupName::G3, GroupName::G4, GroupName::G5] {
        let g = BieberbachGroup::standard(name, &params).unwrap();
        let xi = Vector3::z();
        for d in bits(name.delta_count()) {
            let lift = lift_generators(&g, &d).unwrap();
            let got = admissible_alphas(&g, &lift, &xi, lo, hi).unwrap();
            let want = closed_form(name, &d, 1.0, lo, hi);
            let got_alphas: Vec<f64> = got.iter().map(|a| a.alpha).collect();
            assert_eq!(got_alphas.len(), want.len(), "{name} {d:?}: {got_alphas:?} vs {want:?}");
            for (a, b) in got_alphas.iter().zip(&want) {
                assert!((a - b).abs() < 1e-9, "{name} {d:?}: {a} vs {b}");
            }
            assert!(got.iter().all(|a| a.dim == 2), "{name} {d:?}");
        }
    }
}

#[test]
fn non_unit_height_rescales_alpha() {
    let params: BTreeMap<String, f64> = [("H".to_string(), 2.5), ("L".to_string(), 0.7)].into();
    let g = BieberbachGroup::standard(GroupName::G4, &params).unwrap();
    let lift = lift_generators(&g, &[1, 0]).unwrap();
    let got = admissible_alphas(&g, &lift, &Vector3::z(), -20.0, 20.0).unwrap();
    let want = closed_form(GroupName::G4, &[1, 0], 2.5, -20.0, 20.0);
    assert_eq!(got.len(), want.len());
    for (a, b) in got.iter().zip(&want) {
        assert!((a.alpha - b).abs() < 1e-9);
    }
}

#[test]
fn reversing_the_flow_keeps_the_set() {
    let g = BieberbachGroup::standard(GroupName::G3, &BTreeMap::new()).unwrap();
    let lift = lift_generators(&g, &[0]).unwrap();
    let up = admissible_alphas(&g, &lift, &Vector3::z(), -40.0, 40.0).unwrap();
    let down = admissible_alphas(&g, &lift, &-Vector3::z(), -40.0, 40.0).unwrap();
    // Σ± trade places and every ⟨t, ξ̄⟩ flips sign, so the conditions are unchanged
    assert_eq!(up.len(), down.len());
    for (a, b) in up.iter().zip(&down) {
        assert!((a.alpha - b.alpha).abs() < 1e-9);
    }
}

#[test]
fn solutions_are_equivariant_and_perturbations_are_not() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let samples: Vec<Vector3<f64>> =
        (0..50).map(|_| Vector3::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))).collect();
    for name in [GroupName::G1, GroupName::G2, GroupName::G3, GroupName::G4, GroupName::G5] {
        let g = BieberbachGroup::standard(name, &BTreeMap::new()).unwrap();
        for d in bits(name.delta_count()) {
            let lift = lift_generators(&g, &d).unwrap();
            for sol in admissible_alphas(&g, &lift, &Vector3::z(), -15.0 * PI, 15.0 * PI).unwrap() {
                for (pp, pm) in &sol.basis {
                    let r = equivariance_residual(&g, &lift, &Vector3::z(), sol.alpha, pp, pm, &samples).unwrap();
                    assert!(r < 1e-9, "{name} {d:?} alpha {}: {r}", sol.alpha);
                    let off = equivariance_residual(&g, &lift, &Vector3::z(), sol.alpha + 0.1, pp, pm, &samples).unwrap();
                    assert!(off > 0.01, "{name} {d:?} alpha {}: {off}", sol.alpha);
                }
            }
        }
    }
}

#[test]
fn g1_on_a_skew_lattice() {
    let a = [Vector3::new(1.0, 0.0, 0.0), Vector3::new(0.3, 1.2, 0.0), Vector3::new(0.2, -0.4, 2.0)];
    let g = BieberbachGroup::g1(a).unwrap();
    let lift = lift_generators(&g, &[0, 0, 1]).unwrap();
    // ξ̄ = e1 translates along a1, a2 and a3: α must satisfy all three at once
    let got = admissible_alphas(&g, &lift, &Vector3::x(), -40.0, 40.0).unwrap();
    for sol in &got {
        for (j, dj) in [(0, 0.0), (1, 0.0), (2, 1.0)] {
            let phase = sol.alpha * a[j].x - PI * dj;
            let k = (phase / (2.0 * PI)).round();
            assert!((phase - 2.0 * PI * k).abs() < 1e-9);
        }
    }
    assert!(got.iter().all(|s| s.dim == 2));
}

#[test]
fn g6_has_no_flow_direction() {
    let g = BieberbachGroup::standard(GroupName::G6, &BTreeMap::new()).unwrap();
    assert_eq!(invariant_xi(&g).dim(), 0);
    assert!(lift_generators(&g, &[]).is_err());
}

#[test]
fn rejects_bad_input() {
    let g = BieberbachGroup::standard(GroupName::G2, &BTreeMap::new()).unwrap();
    let lift = lift_generators(&g, &[0, 0, 0]).unwrap();
    assert!(matches!(admissible_alphas(&g, &lift, &Vector3::x(), -1.0, 1.0), Err(Error::NonInvariantXi(_))));
    let bad: BTreeMap<String, f64> = [("H".to_string(), -1.0)].into();
    assert!(BieberbachGroup::standard(GroupName::G2, &bad).is_err());
    let unknown: BTreeMap<String, f64> = [("Q".to_string(), 1.0)].into();
    assert!(BieberbachGroup::standard(GroupName::G3, &unknown).is_err());
    let t = BieberbachGroup::trivial();
    let tl = lift_generators(&t, &[]).unwrap();
    assert!(admissible_alphas(&t, &tl, &Vector3::z(), -1.0, 1.0).is_err());
}

#[test]
fn wrong_lift_is_detected() {
    let g = BieberbachGroup::standard(GroupName::G4, &BTreeMap::new()).unwrap();
    let mut lift = lift_generators(&g, &[0, 0]).unwrap();
    // swap in the lift of the order-two screw
    lift.elements[3] = SpinElement { w: 0.0, x: 0.0, y: 0.0, z: 1.0 };
    assert!(matches!(check_lift(&g, &lift), Err(Error::LiftMismatch { .. })));
}
