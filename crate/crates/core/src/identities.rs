//! Integrability identities for transversal Killing spinors: both sides evaluated
//! independently, residuals reported by name.
//!
//! Left-hand sides come from the curvature tensor of the frame; right-hand sides only
//! from `h`, `κ`, their covariant derivatives and the parameters. Divergences follow
//! the sign `div X = −Σ_i g(∇_{e_i} X, e_i)`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::clifford::{CliffordRep, SpinorValue};
use crate::error::{Error, Result};
use crate::frame::{complex_structure_3d, FlowGeometry, PointGeometry};
use crate::linalg::{c, eye, max_norm, CMatrix, C64};
use crate::spin::{SpinorField, TksParams};
use crate::tks::tks_residual;
use crate::tolerances;

/// Named residuals (and reported values) of one identity check.
#[derive(Debug, Clone, Default, Serialize)]
pub struct IdentityReport {
    pub residuals: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, f64>,
}

impl IdentityReport {
    fn bump(&mut self, name: impl Into<String>, r: f64) {
        let e = self.residuals.entry(name.into()).or_insert(0.0);
        *e = e.max(r);
    }

    pub fn max(&self) -> f64 {
        self.residuals.values().copied().fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max() <= tol
    }

    pub fn merge(&mut self, prefix: &str, other: IdentityReport) {
        for (k, v) in other.residuals {
            self.bump(format!("{prefix}.{k}"), v);
        }
        for (k, v) in other.values {
            self.values.insert(format!("{prefix}.{k}"), v);
        }
    }
}

fn vm(rep: &CliffordRep, v: &DVector<f64>) -> CMatrix {
    rep.vector_matrix(v.as_slice()).expect("frame vector length")
}

fn unit(n: usize, a: usize) -> DVector<f64> {
    let mut e = DVector::zeros(n);
    e[a] = 1.0;
    e
}

/// `∇_{e_i} κ` with the transversal connection, as a Q-vector.
fn transversal_kappa(p: &PointGeometry, i: usize) -> DVector<f64> {
    let n = p.dim();
    let dk = DVector::from_fn(n, |k, _| if k == 0 { 0.0 } else { p.dgamma[i][(0, 0, k)] });
    let mut out = dk + p.transversal_matrix(i) * &p.kappa;
    out[0] = 0.0;
    out
}

/// `div κ = Σ_i g(∇_{e_i} κ, e_i)`.
pub fn div_kappa(p: &PointGeometry) -> f64 {
    -(0..p.dim()).map(|i| p.nabla_kappa(i)[i]).sum::<f64>()
}

struct Operators {
    xi: CMatrix,
    k: CMatrix,
    omega: CMatrix,
    id: CMatrix,
}

impl Operators {
    fn new(p: &PointGeometry, rep: &CliffordRep) -> Result<Self> {
        Ok(Self {
            xi: rep.gamma(0).clone(),
            k: vm(rep, &p.kappa),
            omega: rep.two_form_matrix(&p.omega())?,
            id: eye(rep.spinor_dim()),
        })
    }
}

/// Right-hand side operator of the `Ric(ξ)` identity.
fn rhs_ric_xi(p: &PointGeometry, rep: &CliffordRep, ops: &Operators, al: C64, be: C64) -> CMatrix {
    let n = p.dim();
    let nq = (n - 1) as f64;
    let kk = p.kappa.norm_squared();
    let mut m = &ops.xi * c(p.h_norm_sq() - kk) + &ops.id * (al * be * 4.0 * nq);
    m += &ops.xi * &ops.k * (al * 2.0);
    m += &ops.k * &ops.omega;
    m += vm(rep, &(&p.h * &p.kappa)) * c(4.0);
    let dh_xi = p.nabla_h(0);
    for j in 1..n {
        let gj = rep.gamma(j);
        m -= &ops.xi * gj * vm(rep, &p.nabla_kappa(j));
        m += &ops.xi * gj * vm(rep, &dh_xi.column(j).into_owned());
        let dh_j = p.nabla_h(j);
        for k in 1..n {
            m += gj * rep.gamma(k) * vm(rep, &dh_j.column(k).into_owned()) * c(0.5);
        }
    }
    m
}

/// Right-hand side operator of the `Ric(e_a)` identity.
fn rhs_ric_z(p: &PointGeometry, rep: &CliffordRep, ops: &Operators, al: C64, be: C64, a: usize) -> CMatrix {
    let n = p.dim();
    let nq = (n - 1) as f64;
    let z = unit(n, a);
    let hz = &p.h * &z;
    let mut m = (vm(rep, &hz) + vm(rep, &z) * be) * &ops.xi * (-al * 4.0);
    m += vm(rep, &(&p.h * &hz)) * c(2.0);
    m += vm(rep, &z) * (be * be * 4.0 * (nq - 1.0));
    let dh_z = p.nabla_h(a);
    for j in 1..n {
        let xg = &ops.xi * rep.gamma(j);
        m += &xg * vm(rep, &dh_z.column(j).into_owned()) * c(0.5);
        m -= &xg * vm(rep, &(p.nabla_h(j) * &z));
    }
    m -= vm(rep, &(p.nabla_h(0) * &z));
    let gzk = p.kappa[a];
    m += (&ops.id * (-al * 2.0) + &ops.xi * &ops.omega - &ops.k) * c(gzk);
    m += vm(rep, &p.nabla_kappa(a));
    m -= vm(rep, &hz) * &ops.xi * &ops.k;
    m
}

/// Right-hand side operator of the scalar curvature identity.
fn rhs_scal(p: &PointGeometry, rep: &CliffordRep, ops: &Operators, al: C64, be: C64) -> CMatrix {
    let n = p.dim();
    let nq = (n - 1) as f64;
    let scalar = be * be * 4.0 * nq * (nq - 1.0) - p.h_norm_sq() - 2.0 * p.kappa.norm_squared();
    let mut m = &ops.id * scalar - &ops.xi * (al * be * 8.0 * nq);
    m += &ops.xi * &ops.omega * (al * 8.0);
    let dh_xi = p.nabla_h(0);
    for j in 1..n {
        let gj = rep.gamma(j);
        for k in 1..n {
            m -= &ops.xi * gj * rep.gamma(k) * vm(rep, &p.nabla_h(k).column(j).into_owned());
        }
        m += gj * vm(rep, &dh_xi.column(j).into_owned()) * c(2.0);
        m -= gj * vm(rep, &p.nabla_kappa(j)) * c(2.0);
    }
    m += &ops.k * (al * 4.0);
    m += &ops.xi * &ops.k * &ops.omega * c(2.0);
    m
}

fn check_rep(geo: &FlowGeometry, rep: &CliffordRep) -> Result<()> {
    if geo.dim() != rep.ambient_dim() {
        return Err(Error::LengthMismatch { expected: geo.dim(), got: rep.ambient_dim() });
    }
    Ok(())
}

fn values_at(geo: &FlowGeometry, psi: &SpinorField) -> Vec<SpinorValue> {
    geo.points().iter().map(|p| psi.value_at(&p.coords)).collect()
}

/// Residuals `|LHS·ψ − RHS·ψ|` of the three general identities for `Ric(ξ)`, `Ric(Z)`
/// (one entry per frame vector of Q) and `Scal`. Where `h` and `κ` vanish to first
/// order the local-product form of the scalar identity is also reported.
pub fn thm_main_residuals(
    geo: &FlowGeometry,
    rep: &CliffordRep,
    psi: &SpinorField,
    p: TksParams,
) -> Result<IdentityReport> {
    check_rep(geo, rep)?;
    let n = geo.dim();
    let nq = (n - 1) as f64;
    let mut report = IdentityReport::default();
    for (pt, v) in geo.points().iter().zip(values_at(geo, psi)) {
        rep.check_spinor(&v)?;
        let curv = pt.curvature();
        let ops = Operators::new(pt, rep)?;
        let lhs_xi = vm(rep, &curv.ricci.column(0).into_owned()) * &v;
        report.bump("ric_xi", max_norm(&(lhs_xi - rhs_ric_xi(pt, rep, &ops, p.alpha, p.beta) * &v)));
        for a in 1..n {
            let lhs = vm(rep, &curv.ricci.column(a).into_owned()) * &v;
            let r = max_norm(&(lhs - rhs_ric_z(pt, rep, &ops, p.alpha, p.beta, a) * &v));
            report.bump(format!("ric_z{a}"), r);
        }
        let lhs_s = &v * c(curv.scal);
        report.bump("scal", max_norm(&(lhs_s - rhs_scal(pt, rep, &ops, p.alpha, p.beta) * &v)));
        let flat_normal = (0..n).all(|i| pt.nabla_kappa(i).amax() <= tolerances::EXACT && pt.dh(i).amax() <= tolerances::EXACT);
        if pt.h.amax() <= tolerances::EXACT && pt.kappa.amax() <= tolerances::EXACT && flat_normal {
            let rhs = &v * (p.beta * p.beta * 4.0 * nq * (nq - 1.0)) - &ops.xi * &v * (p.alpha * p.beta * 8.0 * nq);
            report.bump("scal_local_product", max_norm(&(&v * c(curv.scal) - rhs)));
        }
    }
    report.values.insert("tks_residual".into(), tks_residual(geo, rep, psi, p)?.max());
    Ok(report)
}

fn require_3d(geo: &FlowGeometry) -> Result<()> {
    if geo.dim() != 3 {
        return Err(Error::UnsupportedDimension(geo.dim()));
    }
    Ok(())
}

fn db_q(geo: &FlowGeometry, x: &[f64]) -> Result<DVector<f64>> {
    let mf = geo.manifold();
    let b = |y: &[f64]| -> Result<DVector<f64>> {
        let b = geo.point_at(y)?.b().expect("3D");
        Ok(DVector::from_element(1, b))
    };
    let mut out = DVector::zeros(3);
    for a in 1..3 {
        out[a] = mf.frame_derivative(x, a, b)?[0];
    }
    Ok(out)
}

/// `ξ(b)`.
fn xi_b(p: &PointGeometry) -> f64 {
    p.dh(0)[(2, 1)]
}

/// Three-dimensional specializations for real `(α, β)`:
/// (i) `α κ = 0`; (ii) `dκ♭(e_1,e_2) = 2(ξ(b) − 4αβ)`;
/// (iii) `Scal = 2(4β² − b² − 4αb − div κ)`,
/// `Ric(ξ) = (2b² − div κ)ξ + J(2bκ − db|_Q)` and
/// `Ric(Z) = 2(2β² − b² − 2αb)Z + (4αβ − ξ(b))JZ + g(J(2bκ − db|_Q), Z)ξ + ∇_Zκ − g(Z,κ)κ`.
pub fn dim3_identities(geo: &FlowGeometry, rep: &CliffordRep, psi: &SpinorField, p: TksParams) -> Result<IdentityReport> {
    require_3d(geo)?;
    check_rep(geo, rep)?;
    let (al, be) = p.real_parts("the three-dimensional identities")?;
    let j = complex_structure_3d();
    let mut report = IdentityReport::default();
    for pt in geo.points() {
        let curv = pt.curvature();
        let b = pt.b().expect("3D");
        let xb = xi_b(pt);
        let dbq = db_q(geo, &pt.coords)?;
        let div = div_kappa(pt);
        report.bump("alpha_kappa", al.abs() * pt.kappa.amax());
        let dk = pt.nabla_kappa(1)[2] - pt.nabla_kappa(2)[1];
        report.bump("d_kappa", (dk - 2.0 * (xb - 4.0 * al * be)).abs());
        let scal = 2.0 * (4.0 * be * be - b * b - 4.0 * al * b - div);
        report.bump("scal", (curv.scal - scal).abs());
        let w = &j * (&pt.kappa * (2.0 * b) - &dbq);
        let mut ric_xi = w.clone();
        ric_xi[0] = 2.0 * b * b - div;
        report.bump("ric_xi", (curv.ricci.column(0) - &ric_xi).amax());
        for a in 1..3 {
            let z = unit(3, a);
            let mut rz = &z * (2.0 * (2.0 * be * be - b * b - 2.0 * al * b)) + &j * &z * (4.0 * al * be - xb);
            rz[0] += w.dot(&z);
            rz += transversal_kappa(pt, a) - &pt.kappa * pt.kappa[a];
            report.bump(format!("ric_z{a}"), (curv.ricci.column(a) - rz).amax());
        }
    }
    report.values.insert("tks_residual".into(), tks_residual(geo, rep, psi, p)?.max());
    Ok(report)
}

/// Minimal three-dimensional flows: `∇_ξ db|_Q = 0` and `div(J db|_Q) = −8αβ(3b + 2α)`.
pub fn dim3_minimal_identities(
    geo: &FlowGeometry,
    rep: &CliffordRep,
    psi: &SpinorField,
    p: TksParams,
) -> Result<IdentityReport> {
    require_3d(geo)?;
    check_rep(geo, rep)?;
    let (al, be) = p.real_parts("the minimal-flow identities")?;
    let kmax = geo.points().iter().fold(0.0_f64, |m, pt| m.max(pt.kappa.amax()));
    if kmax > geo.tolerance() {
        return Err(Error::NotMinimal(kmax));
    }
    let mf = geo.manifold();
    let j = complex_structure_3d();
    let mut report = IdentityReport::default();
    for pt in geo.points() {
        let x = &pt.coords;
        let b = pt.b().expect("3D");
        let d0 = mf.frame_derivative(x, 0, |y| db_q(geo, y))?;
        let mut nabla_xi = d0 + pt.transversal_matrix(0) * db_q(geo, x)?;
        nabla_xi[0] = 0.0;
        report.bump("nabla_xi_db", nabla_xi.amax());
        let w_at = |y: &[f64]| -> Result<DVector<f64>> { Ok(&j * db_q(geo, y)?) };
        let w = w_at(x)?;
        let mut div = 0.0;
        for i in 0..3 {
            let dw = mf.frame_derivative(x, i, w_at)?;
            div -= (dw + pt.ambient_matrix(i) * &w)[i];
        }
        report.bump("div_j_db", (div + 8.0 * al * be * (3.0 * b + 2.0 * al)).abs());
    }
    report.values.insert("tks_residual".into(), tks_residual(geo, rep, psi, p)?.max());
    Ok(report)
}

/// `Ric = λ Id + μ ξ♭⊗ξ` fit at a point, with the defect of the fit.
pub fn eta_einstein_fit(ricci: &DMatrix<f64>) -> (f64, f64, f64) {
    let n = ricci.nrows();
    let lambda = (1..n).map(|a| ricci[(a, a)]).sum::<f64>() / (n - 1) as f64;
    let mu = ricci[(0, 0)] - lambda;
    let mut model = DMatrix::identity(n, n) * lambda;
    model[(0, 0)] += mu;
    (lambda, mu, (ricci - model).amax())
}

/// Sasakian specializations for `αβ = 0`:
/// `Ric(Z)·ψ = −4α(h(Z) + βZ)·ξ·ψ + (4(2m−1)β² − 2)Z·ψ`, `Ric(ξ)·ψ = 2m ξ·ψ`,
/// `Scal ψ = 2m(4(2m−1)β² − 1)ψ + 8α ξ·Ω·ψ`, and per Ω-eigencomponent
/// `Scal ψ_r = [2m(4(2m−1)β² − 1) + (−1)^r 8α(2r − m)]ψ_r`.
///
/// Also reports `g(Ric(Z), h(Z))`, the η-Einstein constants when they exist, and, for
/// `β = 0` spinors concentrated in `Σ_0` or `Σ_m`, the forced eigenvalue of Ric on Q.
pub fn sasaki_identities(
    geo: &FlowGeometry,
    rep: &CliffordRep,
    psi: &SpinorField,
    p: TksParams,
    m: usize,
) -> Result<IdentityReport> {
    check_rep(geo, rep)?;
    if !geo.sasaki_check().is_sasakian() {
        return Err(Error::NotSasakian);
    }
    let (al, be) = p.real_parts("the Sasakian identities")?;
    if (al * be).abs() > geo.tolerance() {
        return Err(Error::InvalidParameter(format!("Sasakian identities need αβ = 0, got {}", al * be)));
    }
    let n = geo.dim();
    let mf = m as f64;
    let mut report = IdentityReport::default();
    let mut fits = Vec::new();
    for (pt, v) in geo.points().iter().zip(values_at(geo, psi)) {
        let curv = pt.curvature();
        let ops = Operators::new(pt, rep)?;
        let projectors = rep.omega_eigenprojectors(&pt.omega(), m)?;
        for a in 1..n {
            let z = unit(n, a);
            let hz = &pt.h * &z;
            let lhs = vm(rep, &curv.ricci.column(a).into_owned()) * &v;
            let rhs = vm(rep, &(&hz + &z * be)) * &ops.xi * &v * c(-4.0 * al)
                + vm(rep, &z) * &v * c(4.0 * (2.0 * mf - 1.0) * be * be - 2.0);
            report.bump("ric_z", max_norm(&(lhs - rhs)));
            report.bump("ric_z_dot_hz", curv.ricci.column(a).dot(&hz).abs());
        }
        let lhs = vm(rep, &curv.ricci.column(0).into_owned()) * &v;
        report.bump("ric_xi", max_norm(&(lhs - &ops.xi * &v * c(2.0 * mf))));
        let base = 2.0 * mf * (4.0 * (2.0 * mf - 1.0) * be * be - 1.0);
        let rhs = &v * c(base) + &ops.xi * &ops.omega * &v * c(8.0 * al);
        report.bump("scal", max_norm(&(&v * c(curv.scal) - rhs)));
        for (r, proj) in projectors.iter().enumerate() {
            let vr = proj * &v;
            let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
            let coeff = base + sign * 8.0 * al * (2.0 * r as f64 - mf);
            report.bump(format!("scal_sigma{r}"), max_norm(&(&vr * c(curv.scal) - &vr * c(coeff))));
        }
        if be == 0.0 && max_norm(&v) > 0.0 {
            let scale = 1.0 + max_norm(&v);
            let forced = [(0usize, -2.0 - 4.0 * al), (m, -2.0 + 4.0 * if m.is_multiple_of(2) { al } else { -al })];
            for (r, lam) in forced {
                if max_norm(&(&projectors[r] * &v - &v)) <= tolerances::SPECTRAL * scale {
                    let mut target = DMatrix::identity(n, n) * lam;
                    target[(0, 0)] = curv.ricci[(0, 0)];
                    let defect = (1..n).map(|a| (curv.ricci.column(a) - target.column(a)).amax()).fold(0.0, f64::max);
                    report.bump(format!("ric_q_sigma{r}"), defect);
                }
            }
        }
        fits.push(eta_einstein_fit(&curv.ricci));
    }
    let (l0, m0, _) = fits[0];
    let uniform = fits.iter().all(|(l, u, d)| {
        *d <= tolerances::SPECTRAL && (l - l0).abs() <= geo.tolerance() && (u - m0).abs() <= geo.tolerance()
    });
    if uniform {
        report.values.insert("lambda".into(), l0);
        report.values.insert("mu".into(), m0);
    }
    report.values.insert("tks_residual".into(), tks_residual(geo, rep, psi, p)?.max());
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    LocalProduct,
    SasakianUpToHomothety,
    Neither,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EtaEinsteinEquivalence {
    pub eta_einstein: bool,
    pub b_constant: bool,
    pub branch: Branch,
    pub b: f64,
}

impl EtaEinsteinEquivalence {
    /// The three statements agree.
    pub fn consistent(&self) -> bool {
        let structured = self.branch != Branch::Neither;
        self.eta_einstein == self.b_constant && self.b_constant == structured
    }
}

/// Evaluates, independently, whether a minimal 3D flow is η-Einstein, whether `b` is
/// constant, and whether it is a local product (`h = 0`) or Sasakian after a homothety
/// (`b` constant nonzero, `∇h = 0`).
pub fn eta_einstein_equiv_3d(geo: &FlowGeometry) -> Result<EtaEinsteinEquivalence> {
    require_3d(geo)?;
    let tol = geo.tolerance();
    let kmax = geo.points().iter().fold(0.0_f64, |m, pt| m.max(pt.kappa.amax()));
    if kmax > tol {
        return Err(Error::NotMinimal(kmax));
    }
    let fits: Vec<_> = geo.points().iter().map(|pt| eta_einstein_fit(&pt.curvature().ricci)).collect();
    let (l0, m0, _) = fits[0];
    let eta_einstein = fits
        .iter()
        .all(|(l, u, d)| *d <= tol && (l - l0).abs() <= tol && (u - m0).abs() <= tol);
    let b0 = geo.point(0).b().expect("3D");
    let mut b_constant = true;
    for pt in geo.points() {
        b_constant &= (pt.b().expect("3D") - b0).abs() <= tol;
        b_constant &= db_q(geo, &pt.coords)?.amax() <= tol;
        b_constant &= xi_b(pt).abs() <= tol;
    }
    let h_zero = geo.points().iter().all(|pt| pt.h.amax() <= tol);
    let h_parallel = geo.points().iter().all(|pt| (0..3).all(|i| pt.nabla_h(i).amax() <= tol));
    let branch = if h_zero {
        Branch::LocalProduct
    } else if h_parallel && geo.points().iter().all(|pt| (pt.b().expect("3D").abs() - b0.abs()).abs() <= tol) {
        Branch::SasakianUpToHomothety
    } else {
        Branch::Neither
    };
    Ok(EtaEinsteinEquivalence { eta_einstein, b_constant, branch, b: b0 })
}
