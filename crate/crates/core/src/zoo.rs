//! Catalog of explicit flows with known transversal Killing spinor data.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::clifford::CliffordRep;
use crate::deform::d_homothety;
use crate::error::{Error, Result};
use crate::frame::{ChartRecipe, CircleQuotient, FrameManifold, FrameRepresentation, Tensor3};
use crate::linalg::{expm, nullspace, CMatrix, CVector, C64, I};
use crate::spin::{SpinorField, TksParams};
use crate::tks::{flat_solution, SpinorFamily};
use crate::tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpectedDim {
    Exact(usize),
    Nonzero,
}

impl ExpectedDim {
    pub fn matches(&self, dim: usize) -> bool {
        match self {
            ExpectedDim::Exact(d) => *d == dim,
            ExpectedDim::Nonzero => dim > 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectedFact {
    pub alpha: f64,
    pub beta: f64,
    pub kernel_dim: ExpectedDim,
    #[serde(default)]
    pub provenance: String,
}

fn fact(alpha: f64, beta: f64, kernel_dim: ExpectedDim, provenance: &str) -> ExpectedFact {
    ExpectedFact { alpha, beta, kernel_dim, provenance: provenance.into() }
}

/// How solutions are produced for an entry.
#[derive(Debug, Clone)]
pub enum Witness {
    /// Kernel solve on the homogeneous model.
    Kernel,
    /// Exponential solutions on Euclidean space along `xi`.
    Flat { xi: Vec<f64> },
    /// Lifts of the Killing spinors of `S²(radius)`.
    SphereProduct { radius: f64 },
    /// No closed-form solutions known.
    Unknown,
}

#[derive(Debug, Clone)]
pub struct ZooEntry {
    pub manifold: FrameManifold,
    pub expected: Vec<ExpectedFact>,
    pub notes: String,
    pub witness: Witness,
    /// Complex dimension `m` of the transversal Kähler structure when Sasakian.
    pub sasaki_m: Option<usize>,
}

impl ZooEntry {
    /// Explicit solutions at `p` for chart entries; `None` for kernel-backed entries or
    /// parameters without a known closed form.
    pub fn witnesses(&self, rep: &CliffordRep, p: TksParams) -> Result<Option<SpinorFamily>> {
        match &self.witness {
            Witness::Kernel | Witness::Unknown => Ok(None),
            Witness::Flat { xi } => {
                if p.beta != C64::new(0.0, 0.0) {
                    return Ok(None);
                }
                let (pp, pm) = rep.xi_projectors();
                let zero = CVector::zeros(rep.spinor_dim());
                let id = crate::linalg::eye(rep.spinor_dim());
                let mut members = Vec::new();
                for v in nullspace(&(&id - &pp), tolerances::KERNEL_RELATIVE).basis {
                    members.push(flat_solution(rep, p.alpha, xi, &v, &zero)?);
                }
                for v in nullspace(&(&id - &pm), tolerances::KERNEL_RELATIVE).basis {
                    members.push(flat_solution(rep, p.alpha, xi, &zero, &v)?);
                }
                Ok(Some(SpinorFamily { params: p, members }))
            }
            Witness::SphereProduct { radius } => {
                let s = 2.0 * radius * p.beta;
                let sign = if (s - C64::new(1.0, 0.0)).norm() < 1e-12 {
                    1.0
                } else if (s + C64::new(1.0, 0.0)).norm() < 1e-12 {
                    -1.0
                } else {
                    return Ok(None);
                };
                if p.alpha.norm() > 0.0 {
                    return Ok(None);
                }
                let members = (0..rep.spinor_dim())
                    .map(|k| {
                        let mut chi = CVector::zeros(rep.spinor_dim());
                        chi[k] = C64::new(1.0, 0.0);
                        sphere_killing_lift(rep, sign, chi)
                    })
                    .collect();
                Ok(Some(SpinorFamily { params: p, members }))
            }
        }
    }
}

/// `ψ(t,θ,φ) = exp(sθ/2 · e_2·) exp(−φ/2 · ξ·) χ₀` with analytic gradient; a
/// `(0, s/(2R))`-TKS on `ℝ × S²(R)`.
pub fn sphere_killing_lift(rep: &CliffordRep, s: f64, chi: CVector) -> SpinorField {
    let g2 = rep.gamma(2).clone();
    let g0 = rep.gamma(0).clone();
    let value = {
        let (g2, g0, chi) = (g2.clone(), g0.clone(), chi.clone());
        move |x: &[f64]| rotor(&g2, s * x[1] / 2.0) * rotor(&g0, -x[2] / 2.0) * &chi
    };
    let gradient = move |x: &[f64]| {
        let a = rotor(&g2, s * x[1] / 2.0);
        let b = rotor(&g0, -x[2] / 2.0);
        let v = &b * &chi;
        vec![
            CVector::zeros(chi.len()),
            &g2 * &a * &v * C64::new(s / 2.0, 0.0),
            &a * &g0 * &v * C64::new(-0.5, 0.0),
        ]
    };
    SpinorField::chart_with_gradient(rep.spinor_dim(), value, gradient)
}

/// `exp(x γ) = cos x + sin x · γ` for `γ² = −1`.
fn rotor(g: &CMatrix, x: f64) -> CMatrix {
    CMatrix::identity(g.nrows(), g.ncols()) * C64::new(x.cos(), 0.0) + g * C64::new(x.sin(), 0.0)
}

#[derive(Debug, Clone, Serialize)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: f64,
    pub constraint: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct CatalogItem {
    pub name: &'static str,
    pub kind: &'static str,
    pub params: Vec<ParamSpec>,
    pub summary: &'static str,
}

const fn spec(name: &'static str, default: f64, constraint: &'static str) -> ParamSpec {
    ParamSpec { name, default, constraint }
}

pub fn list_catalog() -> Vec<CatalogItem> {
    vec![
        CatalogItem {
            name: "flat_r3",
            kind: "chart",
            params: vec![
                spec("xi_x", 0.0, "flow direction, normalized"),
                spec("xi_y", 0.0, "flow direction, normalized"),
                spec("xi_z", 1.0, "flow direction, normalized"),
            ],
            summary: "Euclidean space with a parallel flow",
        },
        CatalogItem { name: "round_s3", kind: "homogeneous", params: vec![], summary: "Hopf flow on the unit sphere" },
        CatalogItem {
            name: "berger_s3",
            kind: "homogeneous",
            params: vec![spec("t", 2.0, "t > 0")],
            summary: "D-homothetic deformation of round_s3",
        },
        CatalogItem {
            name: "heisenberg",
            kind: "homogeneous",
            params: vec![],
            summary: "Heisenberg group, central flow with b = 1",
        },
        CatalogItem {
            name: "s1_x_s2",
            kind: "chart",
            params: vec![
                spec("L", 2.0 * PI, "circle length, L > 0"),
                spec("delta", 0.0, "spin structure on the circle, 0 or 1"),
                spec("radius", 1.0, "sphere radius, > 0"),
            ],
            summary: "product S¹(L) × S²(radius), flow along the circle",
        },
        CatalogItem {
            name: "r_x_s2",
            kind: "chart",
            params: vec![spec("radius", 1.0, "sphere radius, > 0")],
            summary: "product ℝ × S²(radius)",
        },
    ]
}

pub type ZooParams = BTreeMap<String, f64>;

fn resolve(name: &str, given: &ZooParams) -> Result<BTreeMap<&'static str, f64>> {
    let item = list_catalog()
        .into_iter()
        .find(|c| c.name == name)
        .ok_or_else(|| Error::UnknownManifold(name.into()))?;
    for k in given.keys() {
        if !item.params.iter().any(|p| p.name == k) {
            return Err(Error::InvalidParameter(format!("{name} has no parameter '{k}'")));
        }
    }
    Ok(item.params.iter().map(|p| (p.name, *given.get(p.name).unwrap_or(&p.default))).collect())
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}

/// `[e_i, e_j] = −2 ε_ijk e_k`; with this orientation `h = J`, i.e. `b = 1`.
pub fn s3_structure() -> Tensor3 {
    let mut c = Tensor3::zeros(3);
    for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        c[(i, j, k)] = -2.0;
        c[(j, i, k)] = 2.0;
    }
    c
}

/// `[e_1, e_2] = −2ξ`, so `b = 1`.
pub fn heisenberg_structure() -> Tensor3 {
    let mut c = Tensor3::zeros(3);
    c[(1, 2, 0)] = -2.0;
    c[(2, 1, 0)] = 2.0;
    c
}

/// Spin-`j` matrices `(J_x, J_y, J_z)` with `[J_x, J_y] = iJ_z`, dimension `2j + 1 = d`.
pub fn su2_spin(d: usize) -> [CMatrix; 3] {
    let j = (d as f64 - 1.0) / 2.0;
    let mut jp = CMatrix::zeros(d, d);
    let mut jz = CMatrix::zeros(d, d);
    for k in 0..d {
        let mz = j - k as f64;
        jz[(k, k)] = C64::new(mz, 0.0);
        if k > 0 {
            // J₊|m⟩ = √(j(j+1) − m(m+1)) |m+1⟩, basis ordered by decreasing m
            jp[(k - 1, k)] = C64::new((j * (j + 1.0) - mz * (mz + 1.0)).sqrt(), 0.0);
        }
    }
    let jm = jp.adjoint();
    let jx = (&jp + &jm) * C64::new(0.5, 0.0);
    let jy = (&jp - &jm) * C64::new(0.0, -0.5);
    [jx, jy, jz]
}

/// Matrix-coefficient model of dimension `d` on `S³ = SU(2)`: `L_i = −2iJ_i`.
pub fn s3_representation(d: usize) -> Result<FrameRepresentation> {
    let js = su2_spin(d);
    let gens = js.iter().map(|j| j * (-I * 2.0)).collect();
    FrameRepresentation::new(gens, &s3_structure())
}

/// Irreducible models of dimensions 2, 3, 4 used for the round sphere.
pub const S3_REP_DIMS: [usize; 3] = [2, 3, 4];

pub fn round_s3() -> Result<FrameManifold> {
    let reps = S3_REP_DIMS.iter().map(|d| s3_representation(*d)).collect::<Result<_>>()?;
    FrameManifold::homogeneous_with("round_s3", s3_structure(), reps)
}

pub fn build(name: &str, params: &ZooParams) -> Result<ZooEntry> {
    let p = resolve(name, params)?;
    match name {
        "flat_r3" => {
            let v = [p["xi_x"], p["xi_y"], p["xi_z"]];
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !(norm > 0.0) {
                return Err(Error::InvalidParameter("flow direction must be nonzero".into()));
            }
            let xi: Vec<f64> = v.iter().map(|x| x / norm).collect();
            let manifold = FrameManifold::chart("flat_r3", ChartRecipe::Flat { xi: xi.clone() })?;
            let src = "explicit exponential solutions, simply connected model";
            Ok(ZooEntry {
                manifold,
                expected: vec![
                    fact(0.0, 0.0, ExpectedDim::Exact(2), src),
                    fact(1.0, 0.0, ExpectedDim::Exact(2), src),
                    fact(-1.5, 0.0, ExpectedDim::Exact(2), src),
                    fact(PI, 0.0, ExpectedDim::Exact(2), src),
                ],
                notes: "every (α, 0) admits the two-dimensional family e^{∓iα⟨x,ξ⟩}ψ±; flat quotients \
                        select α through the bieberbach module"
                    .into(),
                witness: Witness::Flat { xi },
                sasaki_m: None,
            })
        }
        "round_s3" => Ok(ZooEntry {
            manifold: round_s3()?,
            expected: vec![
                fact(0.0, 1.0, ExpectedDim::Exact(2), "Hopf fibration over CP¹, basic Killing spinors"),
                fact(0.0, -1.0, ExpectedDim::Exact(2), "Hopf fibration over CP¹, basic Killing spinors"),
                fact(-1.0, 0.0, ExpectedDim::Exact(2), "restrictions of −½-Killing spinors"),
                fact(1.0, 0.0, ExpectedDim::Exact(0), "no ((m+1)/2, 0) solution on the round sphere"),
            ],
            notes: "lens spaces Z_k\\S³ share this local frame data and carry nonzero (0,±1) solutions; \
                    equivariance under Z_k is not modelled"
                .into(),
            witness: Witness::Kernel,
            sasaki_m: Some(1),
        }),
        "berger_s3" => {
            let t = positive("t", p["t"])?;
            let manifold = d_homothety(&round_s3()?, t)?.rename("berger_s3");
            let src = "transported from round_s3 by (α, β) ↦ (α/t, β/√t)";
            Ok(ZooEntry {
                manifold,
                expected: vec![
                    fact(0.0, 1.0 / t.sqrt(), ExpectedDim::Exact(2), src),
                    fact(0.0, -1.0 / t.sqrt(), ExpectedDim::Exact(2), src),
                    fact(-1.0 / t, 0.0, ExpectedDim::Exact(2), src),
                ],
                notes: format!("Berger sphere, t = {t}"),
                witness: Witness::Kernel,
                sasaki_m: Some(1),
            })
        }
        "heisenberg" => Ok(ZooEntry {
            manifold: FrameManifold::homogeneous("heisenberg", heisenberg_structure())?,
            expected: vec![
                fact(0.0, 0.0, ExpectedDim::Exact(2), "transversally parallel spinors lifted from the torus"),
                fact(1.0, 0.0, ExpectedDim::Exact(0), "only (0,0) occurs"),
                fact(0.0, 1.0, ExpectedDim::Exact(0), "only (0,0) occurs"),
            ],
            notes: "Ric = −2 Id + 4 ξ♭⊗ξ; constant-component spinors only".into(),
            witness: Witness::Kernel,
            sasaki_m: Some(1),
        }),
        "s1_x_s2" | "r_x_s2" => {
            let radius = positive("radius", p["radius"])?;
            let circle = if name == "s1_x_s2" {
                let length = positive("L", p["L"])?;
                let delta = p["delta"];
                if delta != 0.0 && delta != 1.0 {
                    return Err(Error::InvalidParameter(format!("delta must be 0 or 1, got {delta}")));
                }
                Some(CircleQuotient { length, delta: delta as u8 })
            } else {
                None
            };
            let manifold = FrameManifold::chart(name, ChartRecipe::ProductSphere { radius, circle })?;
            let beta = 1.0 / (2.0 * radius);
            let dim = match circle {
                Some(CircleQuotient { delta: 1, .. }) => ExpectedDim::Exact(0),
                _ => ExpectedDim::Exact(2),
            };
            let src = "lifted Killing spinors of S², basic along the flow";
            Ok(ZooEntry {
                manifold,
                expected: vec![fact(0.0, beta, dim, src), fact(0.0, -beta, dim, src)],
                notes: "S² has no global frame; solutions are checked at sample points of a chart away \
                        from the poles"
                    .into(),
                witness: Witness::SphereProduct { radius },
                sasaki_m: None,
            })
        }
        _ => Err(Error::UnknownManifold(name.into())),
    }
}

/// `|B ρ(exp Σ x_i e_i) e_q|` for isotypic solutions; `ρ(exp X) = exp(Σ x_i L_i)`.
pub fn isotypic_value(b: &CMatrix, rho: &FrameRepresentation, q: usize, x: &[f64]) -> CVector {
    let d = rho.dim();
    let mut gen = CMatrix::zeros(d, d);
    for (l, xi) in rho.generators().iter().zip(x) {
        gen += l * C64::new(*xi, 0.0);
    }
    b * expm(&gen).column(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;

    #[test]
    fn spin_matrices_commute_correctly() {
        for d in 1..=5 {
            let [x, y, z] = su2_spin(d);
            assert!(max_abs(&(&x * &y - &y * &x - &z * I)) < 1e-12, "d = {d}");
        }
    }

    #[test]
    fn s3_models_satisfy_bracket_relation() {
        for d in S3_REP_DIMS {
            assert_eq!(s3_representation(d).unwrap().dim(), d);
        }
    }

    #[test]
    fn catalog_contents() {
        let names: Vec<_> = list_catalog().iter().map(|c| c.name).collect();
        assert!(names.contains(&"round_s3"));
        assert!(!names.contains(&"psl2r_tilde"));
        let berger = list_catalog().into_iter().find(|c| c.name == "berger_s3").unwrap();
        assert_eq!(berger.params[0].name, "t");
    }

    #[test]
    fn unknown_and_bad_params() {
        assert!(matches!(build("nosuch", &ZooParams::new()), Err(Error::UnknownManifold(_))));
        let mut p = ZooParams::new();
        p.insert("t".into(), -1.0);
        assert!(build("berger_s3", &p).is_err());
        p.insert("q".into(), 1.0);
        assert!(build("round_s3", &p).is_err());
    }
}
