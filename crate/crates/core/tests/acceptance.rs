//! Acceptance criteria 1-9. Runs without the libtest harness so the summary lines are
//! always printed: `cargo test --test acceptance`.

mod common;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::process::ExitCode;

use common::{bits, cases, closed_form, props};
use flowspin::bieberbach::{
    admissible_alphas, equivariance_residual, invariant_xi, lift_generators, BieberbachGroup, GroupName,
};
use flowspin::clifford::{CliffordRep, TwoForm};
use flowspin::deform::{
    d_homothety, derived_tensor_distance, sasaki_killing_bridge, transport_field, transport_params, transport_tks,
    Eigenbundle,
};
use flowspin::frame::FlowGeometry;
use flowspin::identities::{dim3_identities, dim3_minimal_identities, thm_main_residuals};
use flowspin::linalg::{c, eye, max_abs, max_norm, CMatrix};
use flowspin::spin::{SpinorField, TksParams};
use flowspin::tks::{default_grid, scan_params, solve_homogeneous, tks_residual};
use flowspin::zoo::{build, ZooEntry, ZooParams};
use nalgebra::{DMatrix, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn clifford_foundation() -> Outcome {
    let tol = 1e-12;
    let mut worst: f64 = 0.0;
    for n in 2..=5 {
        let rep = CliffordRep::new(n).map_err(|e| e.to_string())?;
        let s = rep.spinor_dim();
        let id = eye(s);
        for j in 0..n {
            let g = rep.gamma(j);
            worst = worst.max(max_abs(&(g + g.adjoint())));
            for k in 0..n {
                let anti = g * rep.gamma(k) + rep.gamma(k) * g;
                let want = if j == k { &id * c(-2.0) } else { CMatrix::zeros(s, s) };
                worst = worst.max(max_abs(&(anti - want)));
            }
        }
        let (pp, pm) = rep.xi_projectors();
        worst = worst.max(max_abs(&(&pp * &pp - &pp)));
        worst = worst.max(max_abs(&(&pm * &pm - &pm)));
        worst = worst.max(max_abs(&(&pp * &pm)));
        worst = worst.max(max_abs(&(&pp + &pm - &id)));
        worst = worst.max((pp.trace().re - s as f64 / 2.0).abs());
        worst = worst.max(max_abs(&(rep.gamma(0) * &pp - &pp * rep.gamma(0))));
        // Q-vectors exchange the two halves
        for a in 1..n {
            worst = worst.max(max_abs(&(&pm * rep.gamma(a) * &pp - rep.gamma(a) * &pp)));
        }
        if n % 2 == 1 {
            worst = worst.max(max_abs(&(rep.volume_element() - &id)));
        }
        if n == 3 {
            let omega3 = rep.gamma(0) * rep.gamma(1) * rep.gamma(2) * c(-1.0);
            worst = worst.max(max_abs(&(omega3 - &id)));
        }
        if n == 5 {
            let mut w = DMatrix::zeros(5, 5);
            w[(1, 2)] = 1.0;
            w[(2, 1)] = -1.0;
            w[(3, 4)] = 1.0;
            w[(4, 3)] = -1.0;
            let omega = TwoForm::new(w).map_err(|e| e.to_string())?;
            let ps = rep.omega_eigenprojectors(&omega, 2).map_err(|e| e.to_string())?;
            let sum = ps.iter().fold(CMatrix::zeros(s, s), |a, p| a + p);
            worst = worst.max(max_abs(&(sum - &id)));
            for p in &ps {
                worst = worst.max(max_abs(&(p * p - p)));
            }
        }
    }
    ensure(worst <= tol, || format!("worst defect {worst:.3e}"))?;
    Ok(format!("dims 2-5, worst defect {worst:.1e}"))
}

fn scan_table(name: &str) -> Result<BTreeMap<(i64, i64), usize>, String> {
    let entry = build(name, &ZooParams::new()).map_err(|e| e.to_string())?;
    let geo = FlowGeometry::new(&entry.manifold).map_err(|e| e.to_string())?;
    let rep = CliffordRep::new(3).unwrap();
    let rows = scan_params(&geo, &rep, &default_grid(), &default_grid()).map_err(|e| e.to_string())?;
    Ok(rows
        .into_iter()
        .filter(|r| r.kernel_dim > 0)
        .map(|r| (((r.alpha * 4.0).round() as i64, (r.beta * 4.0).round() as i64), r.kernel_dim))
        .collect())
}

fn s3_reproduction() -> Outcome {
    let got = scan_table("round_s3")?;
    let want: BTreeMap<(i64, i64), usize> = [((0, 4), 2), ((0, -4), 2), ((-4, 0), 2)].into();
    ensure(got == want, || format!("nonzero cells {got:?}"))?;
    Ok("nonzero kernels exactly at (0,1), (0,-1), (-1,0), each of dimension 2".into())
}

fn heisenberg_reproduction() -> Outcome {
    let got = scan_table("heisenberg")?;
    let want: BTreeMap<(i64, i64), usize> = [((0, 0), 2)].into();
    ensure(got == want, || format!("nonzero cells {got:?}"))?;
    let entry = build("heisenberg", &ZooParams::new()).unwrap();
    let geo = FlowGeometry::new(&entry.manifold).unwrap();
    let ric = &geo.point(0).curvature().ricci;
    let want = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, -2.0, -2.0]));
    let d = (ric - want).amax();
    ensure(d <= 1e-9, || format!("Ric off by {d:.3e}"))?;
    Ok(format!("only (0,0) with dimension 2; Ric = -2 Id + 4 xi*xi to {d:.1e}"))
}

fn theorem_suite() -> Outcome {
    let mut worst_ratio: f64 = 0.0;
    let mut pairs = 0;
    let mut saw_lift = false;
    for case in cases() {
        for psi in &case.fields {
            let r = thm_main_residuals(&case.geo, &case.rep, psi, case.params).map_err(|e| e.to_string())?;
            let tol = case.geo.tolerance();
            ensure(r.passes(tol), || format!("{}: {:?}", case.label, r.residuals))?;
            worst_ratio = worst_ratio.max(r.max() / tol);
            pairs += 1;
        }
        saw_lift |= case.entry.manifold.name() == "s1_x_s2";
    }
    ensure(saw_lift, || "no S1 x S2 lifts verified".into())?;
    Ok(format!("{pairs} (manifold, solution) pairs, worst residual/tolerance {worst_ratio:.1e}"))
}

fn dim3_suite() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut n = 0;
    for case in cases().iter().filter(|c| {
        matches!(c.entry.manifold.name(), "round_s3" | "heisenberg" | "berger_s3" | "flat_r3")
    }) {
        for psi in &case.fields {
            let a = dim3_identities(&case.geo, &case.rep, psi, case.params).map_err(|e| format!("{}: {e}", case.label))?;
            let b = dim3_minimal_identities(&case.geo, &case.rep, psi, case.params)
                .map_err(|e| format!("{}: {e}", case.label))?;
            ensure(a.passes(1e-9) && b.passes(1e-9), || format!("{}: {:?} {:?}", case.label, a.residuals, b.residuals))?;
            worst = worst.max(a.max()).max(b.max());
            n += 1;
        }
    }
    Ok(format!("{n} solutions on S3, Heisenberg, Berger, flat; worst {worst:.1e}"))
}

fn bieberbach_tables() -> Outcome {
    let (lo, hi) = (-15.0 * PI, 15.0 * PI);
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let samples: Vec<Vector3<f64>> = (0..50)
        .map(|_| Vector3::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)))
        .collect();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for name in [GroupName::G1, GroupName::G2, GroupName::G3, GroupName::G4, GroupName::G5] {
        let g = BieberbachGroup::standard(name, &BTreeMap::new()).map_err(|e| e.to_string())?;
        for d in bits(name.delta_count()) {
            let lift = lift_generators(&g, &d).map_err(|e| e.to_string())?;
            let got = admissible_alphas(&g, &lift, &Vector3::z(), lo, hi).map_err(|e| e.to_string())?;
            let want = closed_form(name, &d, 1.0, lo, hi);
            let same = got.len() == want.len() && got.iter().zip(&want).all(|(a, b)| (a.alpha - b).abs() <= 1e-9);
            ensure(same, || format!("{name} {d:?}: {:?} vs {want:?}", got.iter().map(|a| a.alpha).collect::<Vec<_>>()))?;
            for sol in &got {
                ensure(sol.dim == 2, || format!("{name} {d:?} alpha {}: dim {}", sol.alpha, sol.dim))?;
                for (pp, pm) in &sol.basis {
                    let r = equivariance_residual(&g, &lift, &Vector3::z(), sol.alpha, pp, pm, &samples)
                        .map_err(|e| e.to_string())?;
                    worst = worst.max(r);
                }
                count += 1;
            }
        }
    }
    ensure(worst <= 1e-9, || format!("equivariance residual {worst:.3e}"))?;
    let g6 = BieberbachGroup::standard(GroupName::G6, &BTreeMap::new()).unwrap();
    ensure(invariant_xi(&g6).dim() == 0, || "G6 has an invariant direction".into())?;
    Ok(format!("{count} admissible alphas match closed forms, equivariance {worst:.1e}; G6 has no flow"))
}

fn deformation_suite() -> Outcome {
    let rep = CliffordRep::new(3).unwrap();
    let mut worst: f64 = 0.0;
    for name in ["round_s3", "heisenberg"] {
        let entry = build(name, &ZooParams::new()).unwrap();
        let geo = FlowGeometry::new(&entry.manifold).unwrap();
        for f in entry.expected.iter() {
            let p = TksParams::real(f.alpha, f.beta);
            let k = solve_homogeneous(&geo, &rep, p).map_err(|e| e.to_string())?;
            for t in [0.5, 2.0, 3.0] {
                for psi in k.fields() {
                    let moved = transport_tks(&geo, &rep, &psi, p, t).map_err(|e| format!("{name} t={t}: {e}"))?;
                    let want = TksParams::real(f.alpha / t, f.beta / t.sqrt());
                    ensure((moved.params.alpha - want.alpha).norm() <= 1e-15 && (moved.params.beta - want.beta).norm() <= 1e-15, || {
                        format!("{name}: parameters {:?}", moved.params)
                    })?;
                    ensure(moved.residual <= 1e-9, || format!("{name} t={t}: residual {:.3e}", moved.residual))?;
                    worst = worst.max(moved.residual);
                    // inverse: back by 1/t
                    let back = transport_field(&moved.spinor, 3, 1.0 / t);
                    let bp = transport_params(moved.params, 1.0 / t);
                    let d = match (&back, &psi) {
                        (SpinorField::Jet { value: v, derivatives: dv }, SpinorField::Jet { value: w, derivatives: dw }) => dv
                            .iter()
                            .zip(dw)
                            .fold(max_norm(&(v - w)), |m, (a, b)| m.max(max_norm(&(a - b)))),
                        (SpinorField::Constant(v), SpinorField::Constant(w)) => max_norm(&(v - w)),
                        _ => f64::INFINITY,
                    };
                    ensure(d <= 1e-12 && (bp.alpha - p.alpha).norm() <= 1e-12 && (bp.beta - p.beta).norm() <= 1e-12, || {
                        format!("{name} t={t}: inverse transport off by {d:.3e}")
                    })?;
                }
                let deformed = d_homothety(&entry.manifold, t).map_err(|e| e.to_string())?;
                let dgeo = FlowGeometry::new(&deformed).unwrap();
                ensure(dgeo.sasaki_check().is_sasakian(), || format!("{name} t={t} lost the Sasakian property"))?;
            }
        }
        for (t, s) in [(2.0, 3.0), (0.5, 4.0), (3.0, 1.0 / 3.0)] {
            let two = d_homothety(&d_homothety(&entry.manifold, t).unwrap(), s).unwrap();
            let one = d_homothety(&entry.manifold, t * s).unwrap();
            let d = derived_tensor_distance(&two, &one).map_err(|e| e.to_string())?;
            ensure(d <= 1e-12, || format!("{name}: composition ({t}, {s}) off by {d:.3e}"))?;
        }
        let round = d_homothety(&d_homothety(&entry.manifold, 3.0).unwrap(), 1.0 / 3.0).unwrap();
        let d = derived_tensor_distance(&round, &entry.manifold).map_err(|e| e.to_string())?;
        ensure(d <= 1e-12, || format!("{name}: inverse deformation off by {d:.3e}"))?;
    }
    Ok(format!("t in {{1/2, 2, 3}} on S3 and Heisenberg, worst transported residual {worst:.1e}"))
}

fn bridge_case(label: &str, entry: &ZooEntry, alpha: f64, lines: &mut Vec<String>) -> Result<(), String> {
    let rep = CliffordRep::new(3).unwrap();
    let geo = FlowGeometry::new(&entry.manifold).unwrap();
    let p = TksParams::real(alpha, 0.0);
    let k = solve_homogeneous(&geo, &rep, p).map_err(|e| e.to_string())?;
    let projectors = rep.omega_eigenprojectors(&geo.point(0).omega(), 1).map_err(|e| e.to_string())?;
    for (which, r) in [(Eigenbundle::Bottom, 0), (Eigenbundle::Top, 1)] {
        // a nonzero member of the solution space inside the eigenbundle
        let psi = k
            .fields()
            .into_iter()
            .map(|f| f.map(&projectors[r]))
            .find(|f| match f {
                SpinorField::Jet { value, .. } | SpinorField::Constant(value) => value.norm() > 1e-6,
                SpinorField::Chart { .. } => false,
            })
            .ok_or_else(|| format!("{label}: no solution in eigenbundle {r}"))?;
        let res = tks_residual(&geo, &rep, &psi, p).unwrap().max();
        ensure(res <= 1e-9, || format!("{label}: projected spinor residual {res:.3e}"))?;
        let report = sasaki_killing_bridge(&geo, &rep, &psi, alpha, which, 1).map_err(|e| format!("{label}: {e}"))?;
        ensure(report.killing_residual <= 1e-9, || {
            format!("{label} {which:?}: Killing residual {:.3e}", report.killing_residual)
        })?;
        lines.push(format!(
            "{label} {which:?}: t = {}, c = {}, residual {:.1e}",
            report.t, report.killing_number, report.killing_residual
        ));
    }
    Ok(())
}

fn bridge() -> Outcome {
    let mut lines = Vec::new();
    let s3 = build("round_s3", &ZooParams::new()).unwrap();
    bridge_case("S3, alpha = -1", &s3, -1.0, &mut lines)?;
    let berger = build("berger_s3", &ZooParams::from([("t".to_string(), 0.5)])).unwrap();
    bridge_case("Berger(1/2), alpha = -2", &berger, -2.0, &mut lines)?;
    Ok(lines.join("; "))
}

fn property_suites() -> Outcome {
    const CASES: usize = 128;
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce97);
    let seeds: Vec<u64> = (0..CASES).map(|_| rng.random()).collect();
    type Prop = fn(u64) -> f64;
    let suites: [(&str, Prop, f64); 5] = [
        ("metricity", props::metricity, 1e-6),
        ("xi-parallel", props::xi_parallel, 1e-9),
        ("constant length", props::constant_length, 1e-6),
        ("xi-flip", props::xi_flip_residual, 1.0),
        ("perturbation slope", props::perturbation_slope, 0.02),
    ];
    let mut parts = Vec::new();
    for (name, f, bound) in suites {
        let worst = seeds.iter().map(|s| f(*s)).fold(0.0, f64::max);
        ensure(worst <= bound, || format!("{name}: worst {worst:.3e} > {bound:.0e}"))?;
        parts.push(format!("{name} {worst:.1e}"));
    }
    Ok(format!("{CASES} seeded inputs each: {}", parts.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("Clifford foundation", clifford_foundation),
        ("S3 reproduction", s3_reproduction),
        ("Heisenberg reproduction", heisenberg_reproduction),
        ("curvature identity suite", theorem_suite),
        ("3D specialization suite", dim3_suite),
        ("Bieberbach tables", bieberbach_tables),
        ("D-homothety suite", deformation_suite),
        ("Sasakian bridge", bridge),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
