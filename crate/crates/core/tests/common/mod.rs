#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::OnceLock;

use flowspin::bieberbach::GroupName;
use flowspin::cli::solutions;
use flowspin::clifford::CliffordRep;
use flowspin::frame::{ChartRecipe, FlowGeometry, FrameManifold};
use flowspin::linalg::{c, CMatrix, CVector, C64};
use flowspin::spin::{SpinorField, TksParams};
use flowspin::tks::IsotypicKernel;
use flowspin::tks::{solve_homogeneous, tks_residual};
use flowspin::zoo::{build, ZooEntry, ZooParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A catalog entry together with the solutions at one of its declared parameters.
pub struct Case {
    pub label: String,
    pub entry: ZooEntry,
    pub geo: FlowGeometry,
    pub rep: CliffordRep,
    pub params: TksParams,
    pub fields: Vec<SpinorField>,
    /// Matrix-coefficient data for homogeneous models, to evaluate away from the base point.
    pub isotypic: Vec<IsotypicKernel>,
    pub constants: Vec<CVector>,
}

pub fn catalog_params() -> Vec<(&'static str, ZooParams)> {
    vec![
        ("round_s3", ZooParams::new()),
        ("heisenberg", ZooParams::new()),
        ("berger_s3", ZooParams::from([("t".to_string(), 2.0)])),
        ("berger_s3", ZooParams::from([("t".to_string(), 0.5)])),
        ("flat_r3", ZooParams::new()),
        ("flat_r3", ZooParams::from([("xi_x".to_string(), 1.0), ("xi_y".to_string(), 2.0), ("xi_z".to_string(), -0.5)])),
        ("s1_x_s2", ZooParams::new()),
        ("r_x_s2", ZooParams::from([("radius".to_string(), 0.8)])),
    ]
}

/// Every (manifold, declared parameter) pair with a nonzero solution space.
pub fn cases() -> &'static [Case] {
    static CASES: OnceLock<Vec<Case>> = OnceLock::new();
    CASES.get_or_init(|| {
        let mut out = Vec::new();
        for (name, params) in catalog_params() {
            let entry = build(name, &params).unwrap();
            let geo = FlowGeometry::new(&entry.manifold).unwrap();
            let rep = CliffordRep::new(geo.dim()).unwrap();
            for f in entry.expected.clone() {
                let p = TksParams::real(f.alpha, f.beta);
                let (dim, fields) = solutions(&entry, &geo, &rep, p).unwrap();
                if dim == 0 {
                    continue;
                }
                let (isotypic, constants) = if geo.is_homogeneous() {
                    let k = solve_homogeneous(&geo, &rep, p).unwrap();
                    (k.isotypic.clone(), k.constant.basis.clone())
                } else {
                    (Vec::new(), Vec::new())
                };
                out.push(Case {
                    label: format!("{}{:?} ({}, {})", name, params, f.alpha, f.beta),
                    entry: entry.clone(),
                    geo: FlowGeometry::new(&entry.manifold).unwrap(),
                    rep: rep.clone(),
                    params: p,
                    fields,
                    isotypic,
                    constants,
                });
            }
        }
        out
    })
}

/// Manifolds used for the connection properties: homogeneous models and charts.
pub fn manifolds() -> &'static [(FrameManifold, CliffordRep)] {
    static M: OnceLock<Vec<(FrameManifold, CliffordRep)>> = OnceLock::new();
    M.get_or_init(|| {
        let mut v: Vec<FrameManifold> =
            catalog_params().into_iter().map(|(n, p)| build(n, &p).unwrap().manifold).collect();
        v.push(FrameManifold::chart("warped", ChartRecipe::Warped { lambda: 0.7 }).unwrap());
        v.into_iter()
            .map(|m| {
                let rep = CliffordRep::new(m.dim()).unwrap();
                (m, rep)
            })
            .collect()
    })
}

pub fn random_spinor(rng: &mut ChaCha8Rng, n: usize) -> CVector {
    CVector::from_fn(n, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

/// Random test field of the right shape: a jet on homogeneous models, a smooth
/// trigonometric field on charts.
pub fn random_field(rng: &mut ChaCha8Rng, mf: &FrameManifold, rep: &CliffordRep) -> SpinorField {
    let s = rep.spinor_dim();
    if mf.is_homogeneous() {
        return SpinorField::Jet {
            value: random_spinor(rng, s),
            derivatives: (0..mf.dim()).map(|_| random_spinor(rng, s)).collect(),
        };
    }
    let a = random_spinor(rng, s);
    let b = random_spinor(rng, s);
    let k: Vec<f64> = (0..mf.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
    SpinorField::chart(s, move |x| {
        let phase: f64 = x.iter().zip(&k).map(|(xi, ki)| xi * ki).sum();
        &a * c(phase.cos()) + &b * C64::new(0.0, phase.sin()) + &a * c(0.3 * x[0] * x[0])
    })
}

pub fn random_point(rng: &mut ChaCha8Rng, mf: &FrameManifold) -> Vec<f64> {
    let base = mf.samples()[rng.random_range(0..mf.samples().len())].clone();
    base.iter().map(|x| x + rng.random_range(-0.3..0.3)).collect()
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Value of a random combination of the case's solutions at chart point `x`
/// (group element `exp(Σ x_i e_i)` on homogeneous models).
pub fn combination_value(case: &Case, coeffs: &[C64], x: &[f64]) -> CVector {
    let s = case.rep.spinor_dim();
    let mut out = CVector::zeros(s);
    let mut k = 0;
    if case.geo.is_homogeneous() {
        for v in &case.constants {
            out += v * coeffs[k % coeffs.len()];
            k += 1;
        }
        for iso in &case.isotypic {
            for b in &iso.solutions {
                for q in 0..iso.representation.dim() {
                    out += flowspin::zoo::isotypic_value(b, &iso.representation, q, x) * coeffs[k % coeffs.len()];
                    k += 1;
                }
            }
        }
    } else {
        for f in &case.fields {
            out += f.value_at(x) * coeffs[k % coeffs.len()];
            k += 1;
        }
    }
    out
}

pub fn combination_field(case: &Case, coeffs: &[C64]) -> SpinorField {
    let mut acc = case.fields[0].map(&(CMatrix::identity(case.rep.spinor_dim(), case.rep.spinor_dim()) * coeffs[0]));
    for (k, f) in case.fields.iter().enumerate().skip(1) {
        acc = acc.combine(c(1.0), f, coeffs[k % coeffs.len()]).unwrap();
    }
    acc
}

pub fn residual(case: &Case, psi: &SpinorField, p: TksParams) -> f64 {
    tks_residual(&case.geo, &case.rep, psi, p).unwrap().max()
}

pub mod props {
    //! Property checks shared by the proptest suite and the acceptance runner. Each
    //! returns the worst defect it saw.

    use super::*;
    use flowspin::clifford::inner;
    use flowspin::identities::thm_main_residuals;
    use flowspin::linalg::max_norm;
    use flowspin::spin::{ambient_spinor_derivative, transversal_spinor_derivative};
    use flowspin::tks::xi_flip;

    /// `X⟨φ,ψ⟩ = ⟨∇_Xφ,ψ⟩ + ⟨φ,∇_Xψ⟩` for both connections, relative to the size of the terms.
    pub fn metricity(seed: u64) -> f64 {
        let mut rng = seeded(seed);
        let ms = manifolds();
        let (mf, rep) = &ms[rng.random_range(0..ms.len())];
        let x = if mf.is_homogeneous() { mf.samples()[0].clone() } else { random_point(&mut rng, mf) };
        let geo = FlowGeometry::at_points(mf, std::slice::from_ref(&x)).unwrap();
        let phi = random_field(&mut rng, mf, rep);
        let psi = random_field(&mut rng, mf, rep);
        let mut worst: f64 = 0.0;
        for i in 0..mf.dim() {
            let lhs = {
                let d_phi = phi.frame_derivative(mf, &x, i).unwrap();
                let d_psi = psi.frame_derivative(mf, &x, i).unwrap();
                inner(&d_phi, &psi.value_at(&x)) + inner(&phi.value_at(&x), &d_psi)
            };
            let lhs = if mf.is_homogeneous() {
                lhs
            } else {
                // derivative of the scalar itself, not assembled from field derivatives
                let (plus, minus) = mf.stencil(&x, i).unwrap();
                let f = |y: &[f64]| inner(&phi.value_at(y), &psi.value_at(y));
                (f(&plus) - f(&minus)) / c(2.0 * flowspin::tolerances::FD_STEP)
            };
            let amb_phi = &ambient_spinor_derivative(&geo, rep, &phi, i).unwrap()[0];
            let amb_psi = &ambient_spinor_derivative(&geo, rep, &psi, i).unwrap()[0];
            let tr_phi = &transversal_spinor_derivative(&geo, rep, &phi, i).unwrap()[0];
            let tr_psi = &transversal_spinor_derivative(&geo, rep, &psi, i).unwrap()[0];
            let (pv, sv) = (phi.value_at(&x), psi.value_at(&x));
            let amb = inner(amb_phi, &sv) + inner(&pv, amb_psi);
            let tr = inner(tr_phi, &sv) + inner(&pv, tr_psi);
            let scale = 1.0 + lhs.norm();
            worst = worst.max((lhs - amb).norm() / scale).max((lhs - tr).norm() / scale);
        }
        worst
    }

    /// `∇_X(ξ·ψ) = ξ·∇_Xψ` for the transversal connection.
    pub fn xi_parallel(seed: u64) -> f64 {
        let mut rng = seeded(seed);
        let ms = manifolds();
        let (mf, rep) = &ms[rng.random_range(0..ms.len())];
        let x = if mf.is_homogeneous() { mf.samples()[0].clone() } else { random_point(&mut rng, mf) };
        let geo = FlowGeometry::at_points(mf, &[x]).unwrap();
        let psi = random_field(&mut rng, mf, rep);
        let flipped = psi.map(rep.gamma(0));
        let mut worst: f64 = 0.0;
        for i in 0..mf.dim() {
            let a = &transversal_spinor_derivative(&geo, rep, &flipped, i).unwrap()[0];
            let b = rep.gamma(0) * &transversal_spinor_derivative(&geo, rep, &psi, i).unwrap()[0];
            worst = worst.max(max_norm(&(a - &b)) / (1.0 + max_norm(&b)));
        }
        worst
    }

    /// Relative spread of `|ψ|` for a random combination of solutions at random points.
    pub fn constant_length(seed: u64) -> f64 {
        let mut rng = seeded(seed);
        let cs = cases();
        let case = &cs[rng.random_range(0..cs.len())];
        let coeffs: Vec<C64> = (0..8).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let points: Vec<Vec<f64>> = (0..6)
            .map(|_| {
                if case.geo.is_homogeneous() {
                    (0..case.geo.dim()).map(|_| rng.random_range(-2.0..2.0)).collect()
                } else {
                    random_point(&mut rng, &case.entry.manifold)
                }
            })
            .collect();
        let norms: Vec<f64> = points.iter().map(|x| combination_value(case, &coeffs, x).norm()).collect();
        let max = norms.iter().copied().fold(0.0, f64::max);
        let min = norms.iter().copied().fold(f64::INFINITY, f64::min);
        if max == 0.0 {
            0.0
        } else {
            (max - min) / max
        }
    }

    /// `ξ·ψ` solves the equation with `(α, −β)`.
    pub fn xi_flip_residual(seed: u64) -> f64 {
        let mut rng = seeded(seed);
        let cs = cases();
        let case = &cs[rng.random_range(0..cs.len())];
        let coeffs: Vec<C64> = (0..8).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let psi = combination_field(case, &coeffs);
        let flipped = xi_flip(&case.rep, &psi);
        let p = TksParams::new(case.params.alpha, -case.params.beta);
        residual(case, &flipped, p) / case.geo.tolerance()
    }

    /// Perturbing a solution by `εφ` makes the residual scale like `ε`. Returns the
    /// deviation of the ratio `r(1e-3)/r(1e-4)` from 10. The identity residuals
    /// carry a discretization floor on charts, so for them the change against `ε = 0`
    /// must not grow faster than linearly.
    pub fn perturbation_slope(seed: u64) -> f64 {
        let mut rng = seeded(seed);
        let cs = cases();
        let case = &cs[rng.random_range(0..cs.len())];
        let coeffs: Vec<C64> = (0..8).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let psi = combination_field(case, &coeffs);
        let phi = random_field(&mut rng, &case.entry.manifold, &case.rep);
        let at = |eps: f64| {
            let f = psi.combine(c(1.0), &phi, c(eps)).unwrap();
            let r = residual(case, &f, case.params);
            let id = thm_main_residuals(&case.geo, &case.rep, &f, case.params).unwrap().max();
            (r, id)
        };
        let (_, i0) = at(0.0);
        let (r3, i3) = at(1e-3);
        let (r4, i4) = at(1e-4);
        let mut dev = (r3 / r4 - 10.0).abs() / 10.0;
        let (s3, s4) = ((i3 - i0).abs() / 1e-3, (i4 - i0).abs() / 1e-4);
        if s4 > 1e-6 {
            dev = dev.max((s4 / s3.max(1e-300) - 1.0).max(0.0));
        }
        dev
    }
}


/// Independent closed forms: `αH ∈ π + kπδ₁ + 2kπZ` for the screw order `k`, with
/// vanishing conditions on the remaining bits.
pub fn closed_form(name: GroupName, delta: &[u8], h: f64, lo: f64, hi: f64) -> Vec<f64> {
    let (offset, period) = match name {
        GroupName::G1 => {
            if delta[0] != 0 || delta[1] != 0 {
                return vec![];
            }
            (PI * delta[2] as f64, 2.0 * PI)
        }
        GroupName::G2 => {
            if delta[1] != 0 || delta[2] != 0 {
                return vec![];
            }
            (PI + 2.0 * PI * delta[0] as f64, 4.0 * PI)
        }
        GroupName::G3 => (PI + 3.0 * PI * delta[0] as f64, 6.0 * PI),
        GroupName::G4 => {
            if delta[1] != 0 {
                return vec![];
            }
            (PI + 4.0 * PI * delta[0] as f64, 8.0 * PI)
        }
        GroupName::G5 => (PI + 6.0 * PI * delta[0] as f64, 12.0 * PI),
        _ => return vec![],
    };
    let mut out = Vec::new();
    for k in -100..=100 {
        let a = (offset + period * k as f64) / h;
        if a >= lo - 1e-9 && a <= hi + 1e-9 {
            out.push(a);
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

pub fn bits(n: usize) -> Vec<Vec<u8>> {
    (0..1u32 << n).map(|m| (0..n).map(|j| ((m >> j) & 1) as u8).collect()).collect()
}

