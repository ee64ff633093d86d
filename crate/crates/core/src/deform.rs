//! D-homothetic deformations `ḡ_t = t² g|_{ℝξ} + t g|_Q` and the transport of
//! transversal Killing spinors along them.
//!
//! The deformed frame is `ē_0 = e_0/t`, `ē_a = e_a/√t`. Spinor components are kept
//! as they are; every rescaling lives in the frame.

use crate::clifford::CliffordRep;
use crate::error::{Error, Result};
use crate::frame::{Chart, FlowGeometry, FrameKind, FrameManifold, PointGeometry, Tensor3};
use crate::linalg::{c, max_norm};
use crate::spin::{ambient_spinor_derivative, SpinorField, TksParams};
use crate::tks::tks_residual;

/// Frame scale factors `(1/t, 1/√t, …)`.
pub fn scale_factors(dim: usize, t: f64) -> Vec<f64> {
    let mut s = vec![1.0 / t.sqrt(); dim];
    s[0] = 1.0 / t;
    s
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("deformation parameter t must be positive, got {t}")));
    }
    Ok(())
}

/// The deformed flow. Post-construction it checks `h̄ = h`, `κ̄ = κ/t` and that the
/// transversal connection is unchanged, at every sample point.
pub fn d_homothety(mf: &FrameManifold, t: f64) -> Result<FrameManifold> {
    check_t(t)?;
    let n = mf.dim();
    let s = scale_factors(n, t);
    let name = format!("{}@t={}", mf.name(), t);
    let deformed = match mf.kind() {
        FrameKind::Homogeneous(h) => {
            let c = &h.structure;
            let cbar = Tensor3::from_fn(n, |i, j, k| c[(i, j, k)] * s[i] * s[j] / s[k]);
            let reps = h.representations.iter().map(|r| r.rescaled(&s)).collect();
            FrameManifold::homogeneous_with(name, cbar, reps)?
        }
        FrameKind::Chart(ch) => {
            let scale = ch.scale.iter().zip(&s).map(|(a, b)| a * b).collect();
            FrameManifold::from_parts(
                name,
                FrameKind::Chart(Chart { recipe: ch.recipe.clone(), scale, samples: ch.samples.clone() }),
            )?
        }
    };
    check_deformed_tensors(mf, &deformed, t)?;
    Ok(deformed)
}

fn check_deformed_tensors(before: &FrameManifold, after: &FrameManifold, t: f64) -> Result<()> {
    let g0 = FlowGeometry::new(before)?;
    let g1 = FlowGeometry::new(after)?;
    let s = scale_factors(before.dim(), t);
    let tol = g0.tolerance();
    for (p, q) in g0.points().iter().zip(g1.points()) {
        let scale = 1.0 + p.h.amax() + p.kappa.amax();
        let dh = (&p.h - &q.h).amax();
        if dh > tol * scale {
            return Err(Error::DeformationMismatch(format!("O'Neill tensor changed by {dh:.3e}")));
        }
        // κ/t expressed in the rescaled frame
        let dk = (&p.kappa / t.sqrt() - &q.kappa).amax();
        if dk > tol * scale {
            return Err(Error::DeformationMismatch(format!("mean curvature off by {dk:.3e}")));
        }
        for (i, si) in s.iter().enumerate() {
            let dm = (p.transversal_matrix(i) * *si - q.transversal_matrix(i)).amax();
            if dm > tol * (1.0 + p.transversal_matrix(i).amax()) {
                return Err(Error::DeformationMismatch(format!(
                    "transversal connection along e{i} changed by {dm:.3e}"
                )));
            }
        }
    }
    Ok(())
}

/// Transported spinor on the deformed frame: identical components, frame derivatives
/// picked up by the rescaled frame.
pub fn transport_field(psi: &SpinorField, dim: usize, t: f64) -> SpinorField {
    match psi {
        SpinorField::Jet { value, derivatives } => {
            let s = scale_factors(dim, t);
            SpinorField::Jet {
                value: value.clone(),
                derivatives: derivatives.iter().zip(&s).map(|(d, si)| d * c(*si)).collect(),
            }
        }
        other => other.clone(),
    }
}

/// `(α, β) ↦ (α/t, β/√t)`.
pub fn transport_params(p: TksParams, t: f64) -> TksParams {
    TksParams::new(p.alpha / t, p.beta / t.sqrt())
}

#[derive(Debug, Clone)]
pub struct Transported {
    pub manifold: FrameManifold,
    pub spinor: SpinorField,
    pub params: TksParams,
    /// Residual on the deformed manifold.
    pub residual: f64,
}

/// Carry a verified TKS through the deformation. Fails if the input is not a TKS or
/// the transported spinor misses the transported equation.
pub fn transport_tks(
    geo: &FlowGeometry,
    rep: &CliffordRep,
    psi: &SpinorField,
    p: TksParams,
    t: f64,
) -> Result<Transported> {
    check_t(t)?;
    let tol = geo.tolerance();
    let r_in = tks_residual(geo, rep, psi, p)?.max();
    if r_in > tol {
        return Err(Error::NotKilling(r_in));
    }
    let manifold = d_homothety(geo.manifold(), t)?;
    let spinor = transport_field(psi, geo.dim(), t);
    let params = transport_params(p, t);
    let residual = tks_residual(&FlowGeometry::new(&manifold)?, rep, &spinor, params)?.max();
    if residual > tol {
        return Err(Error::DeformationMismatch(format!("transported spinor has residual {residual:.3e}")));
    }
    Ok(Transported { manifold, spinor, params, residual })
}

/// Eigenbundle selector for the Sasakian bridge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Eigenbundle {
    /// `Σ_0`, Ω-eigenvalue `−im`.
    Bottom,
    /// `Σ_m`, Ω-eigenvalue `im`.
    Top,
}

#[derive(Debug, Clone)]
pub struct BridgeReport {
    pub t: f64,
    /// Killing number `c` of `∇^M_X φ = c X·φ`.
    pub killing_number: f64,
    pub killing_residual: f64,
    pub deformed: FrameManifold,
}

/// Deform so that an `(α, 0)`-TKS in `Σ_0` (or `Σ_m`) becomes a classical Killing
/// spinor, and measure `max |∇^M_X φ − c X·φ|` on the deformed manifold.
pub fn sasaki_killing_bridge(
    geo: &FlowGeometry,
    rep: &CliffordRep,
    psi: &SpinorField,
    alpha: f64,
    which: Eigenbundle,
    m: usize,
) -> Result<BridgeReport> {
    if !geo.sasaki_check().is_sasakian() {
        return Err(Error::NotSasakian);
    }
    let sign_m = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    let (t, killing_number, r) = match which {
        Eigenbundle::Bottom if alpha < 0.0 => (-2.0 * alpha / (m as f64 + 1.0), -0.5, 0),
        Eigenbundle::Top if sign_m * alpha > 0.0 => (2.0 * sign_m * alpha / (m as f64 + 1.0), 0.5 * sign_m, m),
        _ => {
            return Err(Error::InvalidParameter(format!(
                "alpha = {alpha} has the wrong sign for the requested eigenbundle"
            )))
        }
    };
    let omega = geo.point(0).omega();
    let projectors = rep.omega_eigenprojectors(&omega, m)?;
    let mut defect: f64 = 0.0;
    for pt in geo.points() {
        let v = psi.value_at(&pt.coords);
        defect = defect.max(max_norm(&(&projectors[r] * &v - &v)) / (1.0 + max_norm(&v)));
    }
    if defect > geo.tolerance() {
        return Err(Error::WrongEigenbundle(defect));
    }
    let moved = transport_tks(geo, rep, psi, TksParams::real(alpha, 0.0), t)?;
    let deformed_geo = FlowGeometry::new(&moved.manifold)?;
    let killing_residual = killing_residual(&deformed_geo, rep, &moved.spinor, killing_number)?;
    Ok(BridgeReport { t, killing_number, killing_residual, deformed: moved.manifold })
}

/// `max |∇^M_{e_i} φ − c e_i·φ|` over frame directions and sample points.
pub fn killing_residual(geo: &FlowGeometry, rep: &CliffordRep, psi: &SpinorField, cnum: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for i in 0..geo.dim() {
        let d = ambient_spinor_derivative(geo, rep, psi, i)?;
        for (pt, di) in geo.points().iter().zip(d) {
            let v = psi.value_at(&pt.coords);
            worst = worst.max(max_norm(&(di - rep.gamma(i) * v * c(cnum))));
        }
    }
    Ok(worst)
}

/// Largest difference between the derived tensors of two flows sampled at the same points.
pub fn derived_tensor_distance(a: &FrameManifold, b: &FrameManifold) -> Result<f64> {
    let ga = FlowGeometry::new(a)?;
    let gb = FlowGeometry::new(b)?;
    let dist = |p: &PointGeometry, q: &PointGeometry| {
        let mut d = p.structure.max_abs_diff(&q.structure);
        d = d.max(p.gamma.max_abs_diff(&q.gamma));
        d = d.max((&p.h - &q.h).amax());
        d.max((&p.kappa - &q.kappa).amax())
    };
    Ok(ga.points().iter().zip(gb.points()).fold(0.0, |acc, (p, q)| acc.max(dist(p, q))))
}
