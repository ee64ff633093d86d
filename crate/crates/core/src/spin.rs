//! Spinor fields in the frame trivialization and the three spinor connections:
//! Levi-Civita `∇^M`, the transversal connection `∇` and the modified connection `∇̃`.

use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;

use crate::clifford::{CliffordRep, SpinorValue};
use crate::error::{Error, Result};
use crate::frame::{FlowGeometry, FrameManifold, PointGeometry};
use crate::linalg::{c, CMatrix, CVector, C64};
use crate::tolerances;

pub type ValueFn = Arc<dyn Fn(&[f64]) -> CVector + Send + Sync>;
/// Coordinate partial derivatives `∂_μ ψ`, one vector per coordinate.
pub type GradientFn = Arc<dyn Fn(&[f64]) -> Vec<CVector> + Send + Sync>;

/// Spinor field in the frame trivialization.
#[derive(Clone)]
pub enum SpinorField {
    /// Constant components; every frame derivative vanishes.
    Constant(SpinorValue),
    /// Value and frame derivatives `e_i(ψ)` at the base point of a homogeneous model.
    /// Homogeneity propagates them to every point.
    Jet { value: SpinorValue, derivatives: Vec<SpinorValue> },
    /// Function of chart coordinates with an optional analytic gradient.
    Chart { dim: usize, value: ValueFn, gradient: Option<GradientFn> },
}

impl fmt::Debug for SpinorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpinorField::Constant(v) => f.debug_tuple("Constant").field(&v.as_slice()).finish(),
            SpinorField::Jet { value, .. } => f.debug_struct("Jet").field("value", &value.as_slice()).finish(),
            SpinorField::Chart { gradient, .. } => {
                f.debug_struct("Chart").field("analytic_gradient", &gradient.is_some()).finish()
            }
        }
    }
}

impl SpinorField {
    pub fn chart(dim: usize, value: impl Fn(&[f64]) -> CVector + Send + Sync + 'static) -> Self {
        SpinorField::Chart { dim, value: Arc::new(value), gradient: None }
    }

    pub fn chart_with_gradient(
        dim: usize,
        value: impl Fn(&[f64]) -> CVector + Send + Sync + 'static,
        gradient: impl Fn(&[f64]) -> Vec<CVector> + Send + Sync + 'static,
    ) -> Self {
        SpinorField::Chart { dim, value: Arc::new(value), gradient: Some(Arc::new(gradient)) }
    }

    pub fn value_at(&self, x: &[f64]) -> SpinorValue {
        match self {
            SpinorField::Constant(v) | SpinorField::Jet { value: v, .. } => v.clone(),
            SpinorField::Chart { value, .. } => value(x),
        }
    }

    /// `e_i(ψ)` at chart point `x`.
    pub fn frame_derivative(&self, mf: &FrameManifold, x: &[f64], i: usize) -> Result<SpinorValue> {
        match (self, mf.is_homogeneous()) {
            (SpinorField::Constant(v), _) => Ok(CVector::zeros(v.len())),
            (SpinorField::Jet { derivatives, .. }, true) => derivatives
                .get(i)
                .cloned()
                .ok_or(Error::LengthMismatch { expected: mf.dim(), got: derivatives.len() }),
            (SpinorField::Jet { .. }, false) => Err(Error::FieldMismatch("chart")),
            (SpinorField::Chart { .. }, true) => Err(Error::FieldMismatch("homogeneous")),
            (SpinorField::Chart { value, gradient, .. }, false) => {
                if let Some(grad) = gradient {
                    let e = mf.frame_at(x)?;
                    let partials = grad(x);
                    let mut out = CVector::zeros(partials[0].len());
                    for (mu, p) in partials.iter().enumerate() {
                        out += p * c(e[(mu, i)]);
                    }
                    Ok(out)
                } else {
                    let (plus, minus) = mf.stencil(x, i)?;
                    Ok((value(&plus) - value(&minus)) / c(2.0 * tolerances::FD_STEP))
                }
            }
        }
    }

    /// Pointwise application of a constant matrix (Clifford multiplication by frame
    /// tensors with constant components, projections).
    pub fn map(&self, m: &CMatrix) -> SpinorField {
        match self {
            SpinorField::Constant(v) => SpinorField::Constant(m * v),
            SpinorField::Jet { value, derivatives } => SpinorField::Jet {
                value: m * value,
                derivatives: derivatives.iter().map(|d| m * d).collect(),
            },
            SpinorField::Chart { value, gradient, .. } => {
                let (m1, m2) = (m.clone(), m.clone());
                let value = value.clone();
                let gradient = gradient.clone();
                SpinorField::Chart {
                    dim: m.nrows(),
                    value: Arc::new(move |x| &m1 * value(x)),
                    gradient: gradient.map(|g| -> GradientFn {
                        Arc::new(move |x| g(x).iter().map(|p| &m2 * p).collect())
                    }),
                }
            }
        }
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: C64, other: &SpinorField, b: C64) -> Result<SpinorField> {
        use SpinorField::*;
        Ok(match (self, other) {
            (Constant(u), Constant(v)) => Constant(u * a + v * b),
            (Constant(_) | Jet { .. }, Constant(_) | Jet { .. }) => {
                let (u, du) = self.jet_parts(other)?;
                let (v, dv) = other.jet_parts(self)?;
                Jet {
                    value: u * a + v * b,
                    derivatives: du.iter().zip(&dv).map(|(x, y)| x * a + y * b).collect(),
                }
            }
            _ => {
                let (f, g) = (self.clone(), other.clone());
                let (f2, g2) = (self.clone(), other.clone());
                let analytic = self.has_gradient() && other.has_gradient();
                let dim = self.spinor_dim();
                let value = move |x: &[f64]| f.value_at(x) * a + g.value_at(x) * b;
                if analytic {
                    SpinorField::chart_with_gradient(dim, value, move |x: &[f64]| {
                        let gf = f2.coordinate_gradient(x);
                        let gg = g2.coordinate_gradient(x);
                        gf.iter().zip(&gg).map(|(p, q)| p * a + q * b).collect()
                    })
                } else {
                    SpinorField::chart(dim, value)
                }
            }
        })
    }

    fn jet_parts(&self, other: &SpinorField) -> Result<(SpinorValue, Vec<SpinorValue>)> {
        match self {
            SpinorField::Jet { value, derivatives } => Ok((value.clone(), derivatives.clone())),
            SpinorField::Constant(v) => {
                let n = match other {
                    SpinorField::Jet { derivatives, .. } => derivatives.len(),
                    _ => 0,
                };
                Ok((v.clone(), vec![CVector::zeros(v.len()); n]))
            }
            SpinorField::Chart { .. } => Err(Error::FieldMismatch("homogeneous")),
        }
    }

    fn has_gradient(&self) -> bool {
        match self {
            SpinorField::Constant(_) => true,
            SpinorField::Chart { gradient, .. } => gradient.is_some(),
            SpinorField::Jet { .. } => false,
        }
    }

    fn coordinate_gradient(&self, x: &[f64]) -> Vec<CVector> {
        match self {
            SpinorField::Constant(v) => vec![CVector::zeros(v.len()); x.len()],
            SpinorField::Chart { gradient: Some(g), .. } => g(x),
            _ => unreachable!("checked by has_gradient"),
        }
    }

    pub fn spinor_dim(&self) -> usize {
        match self {
            SpinorField::Constant(v) | SpinorField::Jet { value: v, .. } => v.len(),
            SpinorField::Chart { dim, .. } => *dim,
        }
    }
}

/// Parameters `(α, β)` of the transversal Killing equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TksParams {
    pub alpha: C64,
    pub beta: C64,
}

impl TksParams {
    pub fn new(alpha: C64, beta: C64) -> Self {
        Self { alpha, beta }
    }

    pub fn real(alpha: f64, beta: f64) -> Self {
        Self { alpha: c(alpha), beta: c(beta) }
    }

    pub fn is_real(&self) -> bool {
        self.alpha.im == 0.0 && self.beta.im == 0.0
    }

    /// Real parts, or an error naming the consumer that needs them.
    pub fn real_parts(&self, consumer: &'static str) -> Result<(f64, f64)> {
        if self.is_real() {
            Ok((self.alpha.re, self.beta.re))
        } else {
            Err(Error::ComplexParameters(consumer))
        }
    }
}

fn q_vector(h: &nalgebra::DMatrix<f64>, col: usize) -> Vec<f64> {
    h.column(col).iter().copied().collect()
}

/// `¼ Σ_{j,k} Γ(i,j,k) γ_j γ_k`, so that `∇^M_{e_i} ψ = e_i(ψ) + A_i ψ`.
pub fn ambient_operator(p: &PointGeometry, rep: &CliffordRep, i: usize) -> CMatrix {
    let n = p.dim();
    let mut m = CMatrix::zeros(rep.spinor_dim(), rep.spinor_dim());
    for j in 0..n {
        for k in 0..n {
            let g = p.gamma[(i, j, k)];
            if g != 0.0 && j != k {
                m += rep.gamma(j) * rep.gamma(k) * c(0.25 * g);
            }
        }
    }
    m
}

/// Operator of the transversal connection via the restriction formulas:
/// `∇_ξ = ∇^M_ξ − ½Ω· − ½ξ·κ·`, `∇_Z = ∇^M_Z − ½ξ·h(Z)·`.
pub fn transversal_operator(p: &PointGeometry, rep: &CliffordRep, i: usize) -> Result<CMatrix> {
    let a = ambient_operator(p, rep, i);
    let xi = rep.gamma(0);
    if i == 0 {
        let omega = rep.two_form_matrix(&p.omega())?;
        let kappa = rep.vector_matrix(p.kappa.as_slice())?;
        Ok(a - omega * c(0.5) - xi * kappa * c(0.5))
    } else {
        let hz = rep.vector_matrix(&q_vector(&p.h, i))?;
        Ok(a - xi * hz * c(0.5))
    }
}

/// Spin lift of the transversal connection on Q: `¼ Σ_{a,b ∈ Q} T(i,a,b) γ_a γ_b`.
/// Agrees with [`transversal_operator`]; kept as an independent route.
pub fn transversal_operator_lifted(p: &PointGeometry, rep: &CliffordRep, i: usize) -> CMatrix {
    let n = p.dim();
    let t = p.transversal_matrix(i);
    let mut m = CMatrix::zeros(rep.spinor_dim(), rep.spinor_dim());
    for a in 1..n {
        for b in 1..n {
            if a != b && t[(b, a)] != 0.0 {
                m += rep.gamma(a) * rep.gamma(b) * c(0.25 * t[(b, a)]);
            }
        }
    }
    m
}

fn check_dims(geo: &FlowGeometry, rep: &CliffordRep, x: usize) -> Result<()> {
    if geo.dim() != rep.ambient_dim() {
        return Err(Error::LengthMismatch { expected: geo.dim(), got: rep.ambient_dim() });
    }
    if x >= geo.dim() {
        return Err(Error::LengthMismatch { expected: geo.dim(), got: x + 1 });
    }
    Ok(())
}

/// `∇^M_{e_x} ψ` at every sample point.
pub fn ambient_spinor_derivative(
    geo: &FlowGeometry,
    rep: &CliffordRep,
    psi: &SpinorField,
    x: usize,
) -> Result<Vec<SpinorValue>> {
    check_dims(geo, rep, x)?;
    geo.points()
        .iter()
        .map(|p| {
            let v = psi.value_at(&p.coords);
            rep.check_spinor(&v)?;
            Ok(psi.frame_derivative(geo.manifold(), &p.coords, x)? + ambient_operator(p, rep, x) * v)
        })
        .collect()
}

/// `∇_{e_x} ψ` at every sample point.
pub fn transversal_spinor_derivative(
    geo: &FlowGeometry,
    rep: &CliffordRep,
    psi: &SpinorField,
    x: usize,
) -> Result<Vec<SpinorValue>> {
    check_dims(geo, rep, x)?;
    geo.points().iter().map(|p| transversal_at(geo.manifold(), p, rep, psi, x)).collect()
}

pub(crate) fn transversal_at(
    mf: &FrameManifold,
    p: &PointGeometry,
    rep: &CliffordRep,
    psi: &SpinorField,
    x: usize,
) -> Result<SpinorValue> {
    let v = psi.value_at(&p.coords);
    rep.check_spinor(&v)?;
    Ok(psi.frame_derivative(mf, &p.coords, x)? + transversal_operator(p, rep, x)? * v)
}

/// `∇̃_X φ = ∇_X φ − α g(X,ξ) ξ·φ − β ξ·X·φ − β g(X,ξ) φ` at every sample point.
pub fn modified_connection(
    geo: &FlowGeometry,
    rep: &CliffordRep,
    psi: &SpinorField,
    x: usize,
    params: TksParams,
) -> Result<Vec<SpinorValue>> {
    let mut e = vec![0.0; geo.dim()];
    e[x] = 1.0;
    let xv = rep.vector_matrix(&e)?;
    let xi = rep.gamma(0);
    let along_xi = if x == 0 { 1.0 } else { 0.0 };
    let correction = xi * c(along_xi) * params.alpha
        + xi * &xv * params.beta
        + crate::linalg::eye(rep.spinor_dim()) * params.beta * c(along_xi);
    let nabla = transversal_spinor_derivative(geo, rep, psi, x)?;
    Ok(geo
        .points()
        .iter()
        .zip(nabla)
        .map(|(p, d)| d - &correction * psi.value_at(&p.coords))
        .collect())
}

/// `ξ·Z·` for a Q-vector given by frame components.
pub fn xi_clifford(rep: &CliffordRep, z: &DVector<f64>) -> Result<CMatrix> {
    Ok(rep.gamma(0) * rep.vector_matrix(z.as_slice())?)
}
