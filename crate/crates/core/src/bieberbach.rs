//! Orientable three-dimensional Bieberbach groups, their spin lifts and the
//! equivariance conditions for flat transversal Killing spinors.
//!
//! The spinor module is the one of [`CliffordRep::new(3)`], with the canonical basis
//! of ℝ³ acting through `E_k = Σ_a R[k,a] γ_a`, where `R` is the oriented frame whose
//! first column is the flow direction `ξ̄`. Thus `ξ̄·` is `γ_0` and `Σ±` are the
//! usual half-spaces.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, Matrix3, Vector3};
use serde::Serialize;

use crate::clifford::{CliffordRep, SpinorValue};
use crate::error::{Error, Result};
use crate::frame::adapted_basis;
use crate::linalg::{c, eye, max_abs, max_norm, vstack, CMatrix, CVector, C64};
use crate::tks::flat_solution;
use crate::tolerances;

/// `x ↦ r x + t`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineIsometry {
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

impl AffineIsometry {
    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Result<Self> {
        let orth = (rotation.transpose() * rotation - Matrix3::identity()).amax();
        let det = rotation.determinant();
        if orth > tolerances::EXACT || (det - 1.0).abs() > tolerances::EXACT {
            return Err(Error::InvalidParameter(format!(
                "rotation part is not in SO(3) (orthogonality defect {orth:.3e}, det {det})"
            )));
        }
        Ok(Self { rotation, translation })
    }

    pub fn translation(t: Vector3<f64>) -> Self {
        Self { rotation: Matrix3::identity(), translation: t }
    }

    pub fn apply(&self, x: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * x + self.translation
    }

    pub fn apply_inverse(&self, x: &Vector3<f64>) -> Vector3<f64> {
        self.rotation.transpose() * (x - self.translation)
    }
}

/// Rotation by `angle` about a coordinate axis (0, 1, 2), counterclockwise.
pub fn axis_rotation(axis: usize, angle: f64) -> Matrix3<f64> {
    let (c, s) = (angle.cos(), angle.sin());
    let (i, j) = ((axis + 1) % 3, (axis + 2) % 3);
    let mut r = Matrix3::identity();
    r[(i, i)] = c;
    r[(j, j)] = c;
    r[(j, i)] = s;
    r[(i, j)] = -s;
    r
}

/// `w + x e₂e₃ + y e₃e₁ + z e₁e₂` in the even Clifford algebra of ℝ³.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpinElement {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl SpinElement {
    pub const ONE: SpinElement = SpinElement { w: 1.0, x: 0.0, y: 0.0, z: 0.0 };

    pub fn scalar(w: f64) -> Self {
        Self { w, x: 0.0, y: 0.0, z: 0.0 }
    }

    /// `e^{iπδ}`, i.e. `±1`.
    pub fn sign(delta: u8) -> Self {
        Self::scalar(if delta.is_multiple_of(2) { 1.0 } else { -1.0 })
    }

    pub fn scaled(self, s: f64) -> Self {
        Self { w: self.w * s, x: self.x * s, y: self.y * s, z: self.z * s }
    }

    pub fn norm(&self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Rotation `Ad(q)`, from the quaternion formula.
    pub fn rotation(&self) -> Matrix3<f64> {
        let SpinElement { w, x, y, z } = *self;
        Matrix3::new(
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        )
    }

    /// Spinor matrix given the Clifford images of the canonical basis.
    pub fn matrix(&self, e: &[CMatrix; 3]) -> CMatrix {
        let s = e[0].nrows();
        eye(s) * c(self.w) + &e[1] * &e[2] * c(self.x) + &e[2] * &e[0] * c(self.y) + &e[0] * &e[1] * c(self.z)
    }
}

/// Group labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum GroupName {
    G1,
    G2,
    G3,
    G4,
    G5,
    G6,
    /// Only the identity; every section descends.
    Trivial,
}

impl GroupName {
    pub const ALL: [GroupName; 6] = [GroupName::G1, GroupName::G2, GroupName::G3, GroupName::G4, GroupName::G5, GroupName::G6];

    /// Number of spin-structure labels.
    pub fn delta_count(self) -> usize {
        match self {
            GroupName::G1 | GroupName::G2 => 3,
            GroupName::G4 => 2,
            GroupName::G3 | GroupName::G5 => 1,
            GroupName::G6 | GroupName::Trivial => 0,
        }
    }

    /// Parameters used by the standard generators.
    pub fn parameter_names(self) -> &'static [&'static str] {
        match self {
            GroupName::G1 | GroupName::Trivial => &[],
            GroupName::G2 => &["H", "L", "S", "T"],
            GroupName::G3 | GroupName::G4 | GroupName::G5 => &["H", "L"],
            GroupName::G6 => &["H", "L", "S"],
        }
    }
}

impl fmt::Display for GroupName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GroupName::G1 => "G1",
            GroupName::G2 => "G2",
            GroupName::G3 => "G3",
            GroupName::G4 => "G4",
            GroupName::G5 => "G5",
            GroupName::G6 => "G6",
            GroupName::Trivial => "trivial",
        };
        f.write_str(s)
    }
}

impl FromStr for GroupName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "G1" => GroupName::G1,
            "G2" => GroupName::G2,
            "G3" => GroupName::G3,
            "G4" => GroupName::G4,
            "G5" => GroupName::G5,
            "G6" => GroupName::G6,
            "TRIVIAL" => GroupName::Trivial,
            _ => return Err(Error::InvalidParameter(format!("unknown group '{s}' (expected G1..G6 or trivial)"))),
        })
    }
}

#[derive(Debug, Clone)]
pub struct Generator {
    pub label: String,
    pub isometry: AffineIsometry,
}

#[derive(Debug, Clone)]
pub struct BieberbachGroup {
    pub name: GroupName,
    pub parameters: BTreeMap<String, f64>,
    pub generators: Vec<Generator>,
}

fn gen(label: &str, isometry: AffineIsometry) -> Generator {
    Generator { label: label.into(), isometry }
}

fn param(params: &BTreeMap<String, f64>, key: &str, default: f64, positive: bool) -> Result<f64> {
    let v = *params.get(key).unwrap_or(&default);
    if !v.is_finite() || (positive && v <= 0.0) {
        return Err(Error::InvalidParameter(format!("group parameter {key} must be {}, got {v}", if positive { "positive" } else { "finite" })));
    }
    Ok(v)
}

impl BieberbachGroup {
    /// Torus group on an arbitrary lattice basis.
    pub fn g1(a: [Vector3<f64>; 3]) -> Result<Self> {
        let m = Matrix3::from_columns(&a);
        if m.determinant().abs() < tolerances::EXACT {
            return Err(Error::InvalidParameter("G1 lattice vectors are linearly dependent".into()));
        }
        Ok(Self {
            name: GroupName::G1,
            parameters: BTreeMap::new(),
            generators: (0..3).map(|j| gen(&format!("a{}", j + 1), AffineIsometry::translation(a[j]))).collect(),
        })
    }

    pub fn trivial() -> Self {
        Self { name: GroupName::Trivial, parameters: BTreeMap::new(), generators: Vec::new() }
    }

    /// Standard generators; missing parameters default to 1 (and `T` to 0). G1 uses the
    /// unit-cube lattice.
    pub fn standard(name: GroupName, params: &BTreeMap<String, f64>) -> Result<Self> {
        for k in params.keys() {
            if !name.parameter_names().contains(&k.as_str()) {
                return Err(Error::InvalidParameter(format!("{name} has no parameter '{k}'")));
            }
        }
        if name == GroupName::G1 {
            return Self::g1([Vector3::x(), Vector3::y(), Vector3::z()]);
        }
        if name == GroupName::Trivial {
            return Ok(Self::trivial());
        }
        let h = param(params, "H", 1.0, true)?;
        let l = param(params, "L", 1.0, true)?;
        let a1 = Vector3::new(0.0, 0.0, h);
        let a2 = Vector3::new(l, 0.0, 0.0);
        let r3 = 3f64.sqrt();
        let (a3, k) = match name {
            GroupName::G2 => {
                let s = param(params, "S", 1.0, true)?;
                (Vector3::new(param(params, "T", 0.0, false)?, s, 0.0), 2.0)
            }
            GroupName::G3 => (Vector3::new(-l / 2.0, l * r3 / 2.0, 0.0), 3.0),
            GroupName::G4 => (Vector3::new(0.0, l, 0.0), 4.0),
            GroupName::G5 => (Vector3::new(l / 2.0, l * r3 / 2.0, 0.0), 6.0),
            GroupName::G6 => (Vector3::new(0.0, param(params, "S", 1.0, true)?, 0.0), 2.0),
            GroupName::G1 | GroupName::Trivial => unreachable!(),
        };
        let mut generators = vec![
            gen("a1", AffineIsometry::translation(a1)),
            gen("a2", AffineIsometry::translation(a2)),
            gen("a3", AffineIsometry::translation(a3)),
        ];
        let screw_label = format!("(A,a1/{k})");
        generators.push(gen(&screw_label, AffineIsometry::new(axis_rotation(2, 2.0 * PI / k), a1 / k)?));
        if name == GroupName::G6 {
            generators.push(gen("(B,(a2+a3)/2)", AffineIsometry::new(axis_rotation(0, PI), (a2 + a3) / 2.0)?));
            generators.push(gen("(C,(a1+a2+a3)/2)", AffineIsometry::new(axis_rotation(1, PI), (a1 + a2 + a3) / 2.0)?));
        }
        let parameters = name
            .parameter_names()
            .iter()
            .map(|n| (n.to_string(), *params.get(*n).unwrap_or(if *n == "T" { &0.0 } else { &1.0 })))
            .collect();
        Ok(Self { name, parameters, generators })
    }
}

/// Spin lift on the generators, in generator order.
#[derive(Debug, Clone, Serialize)]
pub struct SpinLift {
    pub elements: Vec<SpinElement>,
    pub delta_bits: Vec<u8>,
}

fn check_delta(name: GroupName, delta: &[u8]) -> Result<Vec<u8>> {
    let n = name.delta_count();
    if delta.iter().any(|d| *d > 1) {
        return Err(Error::InvalidParameter("delta bits must be 0 or 1".into()));
    }
    if delta.len() == n {
        return Ok(delta.to_vec());
    }
    if delta.len() == 3 && delta[n.min(3)..].iter().all(|d| *d == 0) {
        return Ok(delta[..n].to_vec());
    }
    Err(Error::InvalidParameter(format!("{name} takes {n} delta bits, got {}", delta.len())))
}

/// Lifts of the standard generators; Ad-compatibility with the rotation parts is
/// checked on every generator.
pub fn lift_generators(group: &BieberbachGroup, delta: &[u8]) -> Result<SpinLift> {
    let d = check_delta(group.name, delta)?;
    let r3 = 3f64.sqrt();
    let s = SpinElement::sign;
    let screw = |delta: u8, w: f64, z: f64| SpinElement { w, x: 0.0, y: 0.0, z }.scaled(s(delta).w);
    let elements = match group.name {
        GroupName::Trivial => Vec::new(),
        GroupName::G1 => {
            if group.generators.len() != 3 {
                return Err(Error::InvalidParameter("G1 needs three lattice generators".into()));
            }
            vec![s(d[0]), s(d[1]), s(d[2])]
        }
        GroupName::G2 => vec![s(1), s(d[1]), s(d[2]), screw(d[0], 0.0, 1.0)],
        GroupName::G3 => vec![s(1).scaled(s(d[0]).w), s(0), s(0), screw(d[0], 0.5, r3 / 2.0)],
        GroupName::G4 => {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            vec![s(1), s(d[1]), s(d[1]), screw(d[0], h, h)]
        }
        GroupName::G5 => vec![s(1), s(0), s(0), screw(d[0], r3 / 2.0, 0.5)],
        GroupName::G6 => {
            return Err(Error::Unsupported("G6 carries no flow, so no lift is tabulated for it".into()));
        }
    };
    let lift = SpinLift { elements, delta_bits: d };
    check_lift(group, &lift)?;
    Ok(lift)
}

/// `Ad(ε(γ)) = r(γ)` on every generator, read off from the spinor matrices.
pub fn check_lift(group: &BieberbachGroup, lift: &SpinLift) -> Result<()> {
    if lift.elements.len() != group.generators.len() {
        return Err(Error::LengthMismatch { expected: group.generators.len(), got: lift.elements.len() });
    }
    let rep = CliffordRep::new(3)?;
    let e = canonical_images(&rep, &[0.0, 0.0, 1.0])?;
    for (g, el) in group.generators.iter().zip(&lift.elements) {
        let defect = (adjoint(&el.matrix(&e), &e) - g.isometry.rotation).amax();
        if defect > tolerances::SPECTRAL {
            return Err(Error::LiftMismatch { generator: g.label.clone(), defect });
        }
    }
    Ok(())
}

/// Clifford images of the canonical basis with `ξ̄·` represented by `γ_0`.
pub fn canonical_images(rep: &CliffordRep, xi_bar: &[f64]) -> Result<[CMatrix; 3]> {
    let r = adapted_basis(xi_bar)?;
    let img = |k: usize| (0..3).fold(CMatrix::zeros(2, 2), |acc, a| acc + rep.gamma(a) * c(r[(k, a)]));
    Ok([img(0), img(1), img(2)])
}

/// `Ad(u)` read off from spinor matrices: `r_lk = −Re tr(E_l u E_k u⁻¹)/S`.
pub fn adjoint(u: &CMatrix, e: &[CMatrix; 3]) -> Matrix3<f64> {
    let inv = u.clone().try_inverse().expect("spin element is invertible");
    let s = u.nrows() as f64;
    Matrix3::from_fn(|l, k| -(&e[l] * u * &e[k] * &inv).trace().re / s)
}

/// Common fixed space of the rotation parts.
#[derive(Debug, Clone)]
pub struct FixedSpace {
    pub basis: Vec<Vector3<f64>>,
}

impl FixedSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Unit vectors: the pair `±v` for a line, the basis for larger spaces.
    pub fn unit_directions(&self) -> Vec<Vector3<f64>> {
        match self.dim() {
            1 => vec![self.basis[0], -self.basis[0]],
            _ => self.basis.clone(),
        }
    }

    pub fn contains(&self, v: &Vector3<f64>) -> bool {
        let proj: Vector3<f64> = self.basis.iter().map(|b| b * b.dot(v)).sum();
        (proj - v).amax() <= tolerances::SPECTRAL
    }
}

pub fn invariant_xi(group: &BieberbachGroup) -> FixedSpace {
    let rows: Vec<DMatrix<f64>> = group
        .generators
        .iter()
        .map(|g| DMatrix::from_iterator(3, 3, (g.isometry.rotation - Matrix3::identity()).iter().copied()))
        .collect();
    if rows.iter().all(|r| r.amax() <= tolerances::EXACT) {
        return FixedSpace { basis: vec![Vector3::x(), Vector3::y(), Vector3::z()] };
    }
    let mut stacked = DMatrix::zeros(3 * rows.len(), 3);
    for (i, r) in rows.iter().enumerate() {
        stacked.view_mut((3 * i, 0), (3, 3)).copy_from(r);
    }
    let svd = stacked.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let basis = (0..3)
        .filter(|&i| svd.singular_values.get(i).copied().unwrap_or(0.0) <= tolerances::SPECTRAL)
        .map(|i| {
            let mut v = Vector3::new(vt[(i, 0)], vt[(i, 1)], vt[(i, 2)]);
            let lead = v.iter().copied().fold(0.0_f64, |m, x| if x.abs() > m.abs() { x } else { m });
            if lead < 0.0 {
                v = -v;
            }
            v.normalize()
        })
        .collect();
    FixedSpace { basis }
}

/// One admissible `α` with a basis of `(ψ̄₊, ψ̄₋)` pairs.
#[derive(Debug, Clone, Serialize)]
pub struct AlphaSolution {
    pub alpha: f64,
    pub dim: usize,
    #[serde(skip)]
    pub basis: Vec<(SpinorValue, SpinorValue)>,
}

fn check_xi(group: &BieberbachGroup, xi: &Vector3<f64>) -> Result<()> {
    let defect = group
        .generators
        .iter()
        .map(|g| (g.isometry.rotation * xi - xi).amax())
        .fold(0.0, f64::max);
    if defect > tolerances::SPECTRAL {
        return Err(Error::NonInvariantXi(defect));
    }
    Ok(())
}

#[derive(Clone)]
struct Setup {
    units: Vec<CMatrix>,
    taus: Vec<f64>,
    p_plus: CMatrix,
    p_minus: CMatrix,
    commute: bool,
}

fn setup(group: &BieberbachGroup, lift: &SpinLift, xi: &Vector3<f64>) -> Result<(CliffordRep, Setup)> {
    if lift.elements.len() != group.generators.len() {
        return Err(Error::LengthMismatch { expected: group.generators.len(), got: lift.elements.len() });
    }
    check_xi(group, xi)?;
    let rep = CliffordRep::new(3)?;
    let e = canonical_images(&rep, xi.as_slice())?;
    let units: Vec<CMatrix> = lift.elements.iter().map(|el| el.matrix(&e)).collect();
    let taus = group.generators.iter().map(|g| g.isometry.translation.dot(xi)).collect();
    let (p_plus, p_minus) = rep.xi_projectors();
    let xi_m = rep.gamma(0);
    let commute = units.iter().all(|u| max_abs(&(xi_m * u - u * xi_m)) <= tolerances::SPECTRAL);
    Ok((rep, Setup { units, taus, p_plus, p_minus, commute }))
}

/// Joint solutions of `ψ̄± = e^{±iατ(γ)} ε(γ) ψ̄±` over all generators.
fn joint_space(s: &Setup, alpha: f64) -> Vec<CVector> {
    if s.units.is_empty() {
        return (0..2).map(|k| CVector::from_fn(2, |i, _| c(if i == k { 1.0 } else { 0.0 }))).collect();
    }
    let blocks: Vec<CMatrix> = s
        .units
        .iter()
        .zip(&s.taus)
        .map(|(u, tau)| {
            let ph = C64::from_polar(1.0, alpha * tau);
            u * (&s.p_plus * ph + &s.p_minus * ph.conj()) - eye(2)
        })
        .collect();
    let m = vstack(&blocks);
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.expect("requested");
    (0..2)
        .filter(|&i| svd.singular_values.get(i).copied().unwrap_or(0.0) <= tolerances::SPECTRAL)
        .map(|i| vt.row(i).adjoint())
        .collect()
}

/// Admissible real `α` in `[lo, hi]` with the dimension of the solution space.
///
/// Candidates come from the phase progression of the generator with the largest
/// `|⟨t(γ), ξ̄⟩|` in each of `Σ±`; each candidate is then validated by the joint
/// nullity of all generator conditions. `α = 0` uses fixed points of the lift on the
/// whole spinor space.
pub fn admissible_alphas(
    group: &BieberbachGroup,
    lift: &SpinLift,
    xi_bar: &Vector3<f64>,
    lo: f64,
    hi: f64,
) -> Result<Vec<AlphaSolution>> {
    let (rep, s) = setup(group, lift, xi_bar)?;
    let mut out: Vec<AlphaSolution> = Vec::new();
    let mut push = |alpha: f64, basis: Vec<CVector>| {
        if basis.is_empty() || out.iter().any(|a| (a.alpha - alpha).abs() <= tolerances::CONGRUENCE * (1.0 + alpha.abs())) {
            return;
        }
        let basis: Vec<_> = basis.iter().map(|v| rep.xi_split(v)).collect();
        out.push(AlphaSolution { alpha, dim: basis.len(), basis });
    };
    if lo <= 0.0 && 0.0 <= hi {
        push(0.0, fixed_spinors(&s));
    }
    if !s.commute {
        return Ok(sorted(out));
    }
    let (k, tau) = s
        .taus
        .iter()
        .copied()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .ok_or_else(|| Error::Unsupported("no generator constrains α".into()))?;
    if tau.abs() <= tolerances::EXACT {
        return Err(Error::Unsupported("no generator translates along ξ̄, so α is unconstrained".into()));
    }
    let u = &s.units[k];
    for (proj, sign) in [(&s.p_plus, 1.0), (&s.p_minus, -1.0)] {
        // eigenvalue of u on the one-dimensional half space
        let trace = (proj * u).trace();
        if trace.norm() < 0.5 {
            continue;
        }
        let phase = trace.arg();
        // sign·α·τ + phase ∈ 2πZ
        let base = -sign * phase / tau;
        let step = 2.0 * PI / tau.abs();
        let k_lo = ((lo - base) / step).floor() as i64 - 1;
        let k_hi = ((hi - base) / step).ceil() as i64 + 1;
        for j in k_lo..=k_hi {
            let alpha = base + step * j as f64;
            let slack = tolerances::CONGRUENCE * (1.0 + alpha.abs());
            if alpha < lo - slack || alpha > hi + slack || alpha.abs() <= slack {
                continue;
            }
            push(alpha, joint_space(&s, alpha));
        }
    }
    Ok(sorted(out))
}

/// Spinors fixed by every lift (the `α = 0` solutions).
fn fixed_spinors(s: &Setup) -> Vec<CVector> {
    joint_space(&Setup { taus: vec![0.0; s.taus.len()], ..s.clone() }, 0.0)
}

fn sorted(mut v: Vec<AlphaSolution>) -> Vec<AlphaSolution> {
    v.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
    v
}

/// `max_{γ, x} |ψ̄_x − ε(γ) ψ̄_{γ⁻¹x}|` for the flat solution built from `ψ̄±`.
pub fn equivariance_residual(
    group: &BieberbachGroup,
    lift: &SpinLift,
    xi_bar: &Vector3<f64>,
    alpha: f64,
    psi_plus: &SpinorValue,
    psi_minus: &SpinorValue,
    samples: &[Vector3<f64>],
) -> Result<f64> {
    let (rep, s) = setup(group, lift, xi_bar)?;
    let field = flat_solution(&rep, c(alpha), xi_bar.as_slice(), psi_plus, psi_minus)?;
    let mut worst: f64 = 0.0;
    for (g, u) in group.generators.iter().zip(&s.units) {
        for x in samples {
            let here = field.value_at(x.as_slice());
            let back = g.isometry.apply_inverse(x);
            worst = worst.max(max_norm(&(here - u * field.value_at(back.as_slice()))));
        }
    }
    Ok(worst)
}
