//! Transversal Killing spinors: residuals, kernels on homogeneous models, parameter
//! scans, explicit flat solutions and the circle quantization rule.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::clifford::{CliffordRep, SpinorValue};
use crate::error::{Error, Result};
use crate::frame::{adapted_basis, FlowGeometry, FrameManifold, FrameRepresentation};
use crate::linalg::{self, c, eye, max_norm, nullspace, vstack, CMatrix, CVector, C64, I};
use crate::spin::{transversal_at, transversal_operator, SpinorField, TksParams};
use crate::tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TksResidual {
    pub r_xi: f64,
    pub r_q: f64,
}

impl TksResidual {
    pub fn max(&self) -> f64 {
        self.r_xi.max(self.r_q)
    }
}

/// `r_ξ = max |∇_ξψ − αξ·ψ|`, `r_Q = max |∇_Zψ − βξ·Z·ψ|` over samples and `Z = e_1..e_n`.
pub fn tks_residual(geo: &FlowGeometry, rep: &CliffordRep, psi: &SpinorField, p: TksParams) -> Result<TksResidual> {
    let points: Vec<_> = geo.points().iter().map(|pt| pt.coords.clone()).collect();
    tks_residual_at(geo, rep, psi, p, &points)
}

/// Residual at arbitrary chart points (sample set for homogeneous models).
pub fn tks_residual_at(
    geo: &FlowGeometry,
    rep: &CliffordRep,
    psi: &SpinorField,
    p: TksParams,
    points: &[Vec<f64>],
) -> Result<TksResidual> {
    let n = geo.dim();
    let xi = rep.gamma(0);
    let mut res = TksResidual { r_xi: 0.0, r_q: 0.0 };
    for x in points {
        let pt = if geo.is_homogeneous() { geo.point(0).clone() } else { geo.point_at(x)? };
        let v = psi.value_at(x);
        let d0 = transversal_at(geo.manifold(), &pt, rep, psi, 0)?;
        res.r_xi = res.r_xi.max(max_norm(&(d0 - xi * &v * p.alpha)));
        for a in 1..n {
            let da = transversal_at(geo.manifold(), &pt, rep, psi, a)?;
            let rhs = xi * rep.gamma(a) * &v * p.beta;
            res.r_q = res.r_q.max(max_norm(&(da - rhs)));
        }
    }
    Ok(res)
}

/// Stacked operators whose joint kernel on constant components is the TKS space.
fn killing_blocks(geo: &FlowGeometry, rep: &CliffordRep, p: TksParams) -> Result<Vec<CMatrix>> {
    let pt = geo.point(0);
    let xi = rep.gamma(0);
    (0..geo.dim())
        .map(|i| {
            let t = transversal_operator(pt, rep, i)?;
            Ok(if i == 0 { t - xi * p.alpha } else { t - xi * rep.gamma(i) * p.beta })
        })
        .collect()
}

fn require_homogeneous(geo: &FlowGeometry, rep: &CliffordRep) -> Result<()> {
    if !geo.is_homogeneous() {
        return Err(Error::WrongKind { expected: "homogeneous" });
    }
    if geo.dim() != rep.ambient_dim() {
        return Err(Error::LengthMismatch { expected: geo.dim(), got: rep.ambient_dim() });
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct ConstantKernel {
    pub params: TksParams,
    pub basis: Vec<SpinorValue>,
    pub singular_values: Vec<f64>,
    /// Largest TKS residual over the basis.
    pub max_residual: f64,
}

impl ConstantKernel {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Joint kernel of the Killing system on constant-component spinors.
pub fn solve_constant_frame(geo: &FlowGeometry, rep: &CliffordRep, p: TksParams) -> Result<ConstantKernel> {
    require_homogeneous(geo, rep)?;
    let system = vstack(&killing_blocks(geo, rep, p)?);
    let ns = nullspace(&system, tolerances::KERNEL_RELATIVE);
    let mut max_residual: f64 = 0.0;
    for v in &ns.basis {
        let r = tks_residual(geo, rep, &SpinorField::Constant(v.clone()), p)?;
        max_residual = max_residual.max(r.max());
    }
    Ok(ConstantKernel { params: p, basis: ns.basis, singular_values: ns.singular_values, max_residual })
}

/// Solutions of the form `x ↦ B ρ(x) u` for one irreducible frame representation `ρ`.
#[derive(Debug, Clone)]
pub struct IsotypicKernel {
    pub representation: FrameRepresentation,
    /// Basis of admissible `B` (spinor_dim × rep_dim).
    pub solutions: Vec<CMatrix>,
}

impl IsotypicKernel {
    /// Each `B` contributes `dim ρ` independent matrix-coefficient fields.
    pub fn dim(&self) -> usize {
        self.representation.dim() * self.solutions.len()
    }

    pub fn fields(&self) -> Vec<SpinorField> {
        let d = self.representation.dim();
        let mut out = Vec::new();
        for b in &self.solutions {
            for q in 0..d {
                out.push(SpinorField::Jet {
                    value: b.column(q).into_owned(),
                    derivatives: self
                        .representation
                        .generators()
                        .iter()
                        .map(|l| (b * l).column(q).into_owned())
                        .collect(),
                });
            }
        }
        out
    }
}

/// TKS space on a homogeneous model: constant components plus every registered
/// matrix-coefficient sector.
#[derive(Debug, Clone)]
pub struct HomogeneousKernel {
    pub constant: ConstantKernel,
    pub isotypic: Vec<IsotypicKernel>,
}

impl HomogeneousKernel {
    pub fn dim(&self) -> usize {
        self.constant.dim() + self.isotypic.iter().map(IsotypicKernel::dim).sum::<usize>()
    }

    pub fn params(&self) -> TksParams {
        self.constant.params
    }

    pub fn fields(&self) -> Vec<SpinorField> {
        let mut out: Vec<SpinorField> = self.constant.basis.iter().cloned().map(SpinorField::Constant).collect();
        for k in &self.isotypic {
            out.extend(k.fields());
        }
        out
    }
}

/// Solve `B L_i + A_i B = 0` for all frame directions.
fn solve_isotypic(blocks: &[CMatrix], rho: &FrameRepresentation) -> IsotypicKernel {
    let s = blocks[0].nrows();
    let d = rho.dim();
    let rows: Vec<CMatrix> = blocks
        .iter()
        .zip(rho.generators())
        .map(|(a, l)| l.transpose().kronecker(&eye(s)) + eye(d).kronecker(a))
        .collect();
    let ns = nullspace(&vstack(&rows), tolerances::KERNEL_RELATIVE);
    IsotypicKernel {
        representation: rho.clone(),
        solutions: ns.basis.iter().map(|v| CMatrix::from_column_slice(s, d, v.as_slice())).collect(),
    }
}

pub fn solve_homogeneous(geo: &FlowGeometry, rep: &CliffordRep, p: TksParams) -> Result<HomogeneousKernel> {
    let constant = solve_constant_frame(geo, rep, p)?;
    let blocks = killing_blocks(geo, rep, p)?;
    let isotypic = geo.manifold().representations().iter().map(|rho| solve_isotypic(&blocks, rho)).collect();
    Ok(HomogeneousKernel { constant, isotypic })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub alpha: f64,
    pub beta: f64,
    pub kernel_dim: usize,
}

/// `{-2, -1.75, …, 2}`.
pub fn default_grid() -> Vec<f64> {
    (-8..=8).map(|k| k as f64 / 4.0).collect()
}

/// Kernel dimension at every grid point, in row-major (alpha outer) order.
pub fn scan_params(geo: &FlowGeometry, rep: &CliffordRep, alphas: &[f64], betas: &[f64]) -> Result<Vec<ScanRow>> {
    require_homogeneous(geo, rep)?;
    let grid: Vec<(f64, f64)> = alphas.iter().flat_map(|a| betas.iter().map(move |b| (*a, *b))).collect();
    grid.par_iter()
        .map(|&(alpha, beta)| {
            let k = solve_homogeneous(geo, rep, TksParams::real(alpha, beta))?;
            Ok(ScanRow { alpha, beta, kernel_dim: k.dim() })
        })
        .collect()
}

pub fn write_scan_csv<W: Write>(rows: &[ScanRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Unsupported(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Unsupported(e.to_string()))
}

/// `ψ(x) = e^{−iα⟨x,ξ̄⟩} ψ₊ + e^{iα⟨x,ξ̄⟩} ψ₋` on flat space, in the frame adapted to ξ̄.
/// The inputs are projected onto `Σ±` first.
pub fn flat_solution(
    rep: &CliffordRep,
    alpha: C64,
    xi_bar: &[f64],
    psi_plus: &SpinorValue,
    psi_minus: &SpinorValue,
) -> Result<SpinorField> {
    if xi_bar.len() != rep.ambient_dim() {
        return Err(Error::LengthMismatch { expected: rep.ambient_dim(), got: xi_bar.len() });
    }
    adapted_basis(xi_bar)?;
    rep.check_spinor(psi_plus)?;
    rep.check_spinor(psi_minus)?;
    let (pp, _) = rep.xi_split(psi_plus);
    let (_, pm) = rep.xi_split(psi_minus);
    let xi = xi_bar.to_vec();
    let phase = move |x: &[f64]| -> C64 { I * alpha * x.iter().zip(&xi).map(|(a, b)| a * b).sum::<f64>() };
    let (vp, vm, ph) = (pp.clone(), pm.clone(), phase.clone());
    let xi_g = xi_bar.to_vec();
    Ok(SpinorField::chart_with_gradient(
        rep.spinor_dim(),
        move |x| &vp * (-ph(x)).exp() + &vm * ph(x).exp(),
        move |x| {
            let (ep, em) = ((-phase(x)).exp(), phase(x).exp());
            xi_g.iter()
                .map(|xm| &pp * (-I * alpha * *xm * ep) + &pm * (I * alpha * *xm * em))
                .collect()
        },
    ))
}

/// `α ∈ (πδ + 2πZ)/L` inside `[lo, hi]`, sorted.
pub fn circle_alpha_set(length: f64, delta: u8, lo: f64, hi: f64) -> Result<Vec<f64>> {
    if !(length > 0.0) {
        return Err(Error::InvalidParameter(format!("circle length must be positive, got {length}")));
    }
    if delta > 1 {
        return Err(Error::InvalidParameter(format!("delta must be 0 or 1, got {delta}")));
    }
    if lo > hi {
        return Ok(Vec::new());
    }
    let pi = std::f64::consts::PI;
    let offset = pi * delta as f64;
    let slack = tolerances::CONGRUENCE * (1.0 + lo.abs().max(hi.abs()));
    let k_lo = ((lo * length - offset) / (2.0 * pi)).floor() as i64 - 1;
    let k_hi = ((hi * length - offset) / (2.0 * pi)).ceil() as i64 + 1;
    Ok((k_lo..=k_hi)
        .map(|k| (offset + 2.0 * pi * k as f64) / length)
        .filter(|a| *a >= lo - slack && *a <= hi + slack)
        .collect())
}

/// `ξ·ψ`.
pub fn xi_flip(rep: &CliffordRep, psi: &SpinorField) -> SpinorField {
    psi.map(rep.gamma(0))
}

/// A finite family of TKS at fixed parameters, used where no global kernel solve exists.
#[derive(Debug, Clone)]
pub struct SpinorFamily {
    pub params: TksParams,
    pub members: Vec<SpinorField>,
}

impl SpinorFamily {
    fn sampled(&self, mf: &FrameManifold, points: &[Vec<f64>]) -> Result<Vec<CVector>> {
        self.members
            .iter()
            .map(|m| {
                let mut parts = Vec::new();
                for x in points {
                    parts.extend(m.value_at(x).iter().copied());
                    if mf.is_homogeneous() {
                        for i in 0..mf.dim() {
                            parts.extend(m.frame_derivative(mf, x, i)?.iter().copied());
                        }
                    }
                }
                Ok(CVector::from_vec(parts))
            })
            .collect()
    }

    /// Dimension of the span, judged from values at the sample points.
    pub fn rank(&self, mf: &FrameManifold) -> Result<usize> {
        Ok(linalg::rank(&self.sampled(mf, &mf.samples())?, tolerances::KERNEL_RELATIVE))
    }

    pub fn max_residual(&self, geo: &FlowGeometry, rep: &CliffordRep) -> Result<f64> {
        self.members
            .iter()
            .try_fold(0.0_f64, |acc, m| Ok(acc.max(tks_residual(geo, rep, m, self.params)?.max())))
    }

    /// Combinations that satisfy the deck condition `ψ(t + L) = (−1)^δ ψ(t)` of a
    /// circle quotient; unchanged when the manifold has no quotient.
    pub fn descend(&self, mf: &FrameManifold) -> Result<SpinorFamily> {
        let Some(q) = mf.circle_quotient() else {
            return Ok(self.clone());
        };
        if self.members.is_empty() {
            return Ok(self.clone());
        }
        let sign = if q.delta == 1 { -1.0 } else { 1.0 };
        let samples = mf.samples();
        let shifted: Vec<Vec<f64>> = samples
            .iter()
            .map(|x| {
                let mut y = x.clone();
                y[0] += q.length;
                y
            })
            .collect();
        let at = self.sampled(mf, &samples)?;
        let at_shift = self.sampled(mf, &shifted)?;
        let cols: Vec<CVector> = at_shift.iter().zip(&at).map(|(s, a)| s - a * c(sign)).collect();
        let system = CMatrix::from_columns(&cols);
        let scale = at.iter().fold(0.0_f64, |m, v| m.max(max_norm(v)));
        let mut ns = nullspace(&system, tolerances::KERNEL_RELATIVE);
        if system.iter().all(|z| z.norm() <= tolerances::KERNEL_RELATIVE * scale) {
            ns.basis = (0..self.members.len())
                .map(|k| {
                    let mut e = CVector::zeros(self.members.len());
                    e[k] = c(1.0);
                    e
                })
                .collect();
        }
        let members = ns
            .basis
            .iter()
            .map(|coef| {
                let mut acc = self.members[0].map(&(eye(self.members[0].spinor_dim()) * coef[0]));
                for (k, m) in self.members.iter().enumerate().skip(1) {
                    acc = acc.combine(c(1.0), m, coef[k])?;
                }
                Ok(acc)
            })
            .collect::<Result<_>>()?;
        Ok(SpinorFamily { params: self.params, members })
    }
}

/// Largest relative spread of `|ψ|` over the given points.
pub fn length_variation(psi: &SpinorField, points: &[Vec<f64>]) -> f64 {
    let norms: Vec<f64> = points.iter().map(|x| psi.value_at(x).norm()).collect();
    let max = norms.iter().copied().fold(0.0, f64::max);
    let min = norms.iter().copied().fold(f64::INFINITY, f64::min);
    if max == 0.0 {
        0.0
    } else {
        (max - min) / max
    }
}
