//! Riemannian flows in a global orthonormal frame `(e_0 = ξ, e_1, …, e_n)` and the
//! tensors derived from the frame: Levi-Civita coefficients, O'Neill tensor `h`,
//! mean curvature `κ`, the 2-form `Ω`, curvature, and the transversal connection.

use std::fmt;
use std::ops::{Index, IndexMut};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::clifford::TwoForm;
use crate::error::{Error, Result};
use crate::linalg::{max_abs, CMatrix};
use crate::tolerances;

/// Dense real array with three frame indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n * n] }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize, usize) -> f64) -> Self {
        let mut t = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    t[(i, j, k)] = f(i, j, k);
                }
            }
        }
        t
    }

    /// Build from nested `[i][j][k]` arrays.
    pub fn from_nested(nested: &[Vec<Vec<f64>>]) -> Result<Self> {
        let n = nested.len();
        let mut t = Self::zeros(n);
        for (i, plane) in nested.iter().enumerate() {
            if plane.len() != n {
                return Err(Error::LengthMismatch { expected: n, got: plane.len() });
            }
            for (j, row) in plane.iter().enumerate() {
                if row.len() != n {
                    return Err(Error::LengthMismatch { expected: n, got: row.len() });
                }
                for (k, v) in row.iter().enumerate() {
                    t[(i, j, k)] = *v;
                }
            }
        }
        Ok(t)
    }

    pub fn to_nested(&self) -> Vec<Vec<Vec<f64>>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| (0..self.n).map(|k| self[(i, j, k)]).collect()).collect())
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, a| acc.max(a.abs()))
    }

    fn combine(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        Self { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| f(*a, *b)).collect() }
    }
}

impl Index<(usize, usize, usize)> for Tensor3 {
    type Output = f64;
    fn index(&self, (i, j, k): (usize, usize, usize)) -> &f64 {
        &self.data[(i * self.n + j) * self.n + k]
    }
}

impl IndexMut<(usize, usize, usize)> for Tensor3 {
    fn index_mut(&mut self, (i, j, k): (usize, usize, usize)) -> &mut f64 {
        &mut self.data[(i * self.n + j) * self.n + k]
    }
}

/// Checks `c(i,j,k) = -c(j,i,k)` and, optionally, the Jacobi identity.
pub fn validate_structure(c: &Tensor3, jacobi: bool) -> Result<()> {
    let n = c.dim();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if (c[(i, j, k)] + c[(j, i, k)]).abs() > tolerances::EXACT {
                    return Err(Error::InvalidStructure(format!(
                        "antisymmetry at [e{i},e{j}] component {k}"
                    )));
                }
            }
        }
    }
    if jacobi {
        let scale = 1.0 + c.max_abs() * c.max_abs();
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    for out in 0..n {
                        let s: f64 = (0..n)
                            .map(|m| {
                                c[(i, j, m)] * c[(m, l, out)]
                                    + c[(j, l, m)] * c[(m, i, out)]
                                    + c[(l, i, m)] * c[(m, j, out)]
                            })
                            .sum();
                        if s.abs() > tolerances::JACOBI * scale {
                            return Err(Error::InvalidStructure(format!(
                                "Jacobi identity on (e{i},e{j},e{l}): defect {s:.3e}"
                            )));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Koszul formula on an orthonormal frame:
/// `Γ(i,j,k) = g(∇_{e_i} e_j, e_k) = ½(c(i,j,k) − c(j,k,i) + c(k,i,j))`.
pub fn levi_civita(c: &Tensor3) -> Tensor3 {
    Tensor3::from_fn(c.dim(), |i, j, k| 0.5 * (c[(i, j, k)] - c[(j, k, i)] + c[(k, i, j)]))
}

/// Matrices `L_i` with `e_i(ρ) = L_i ρ`, i.e. an anti-representation of the frame
/// algebra: `L_j L_i − L_i L_j = Σ_k c(i,j,k) L_k`.
///
/// On a homogeneous model, spinor fields whose components are matrix coefficients of
/// such a representation have frame derivatives given by constant matrices, so the
/// Killing equations stay finite-dimensional.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameRepresentation {
    generators: Vec<CMatrix>,
}

impl FrameRepresentation {
    pub fn new(generators: Vec<CMatrix>, c: &Tensor3) -> Result<Self> {
        let n = c.dim();
        if generators.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: generators.len() });
        }
        let d = generators[0].nrows();
        for g in &generators {
            if g.nrows() != d || g.ncols() != d {
                return Err(Error::InvalidStructure("representation matrices must be square of equal size".into()));
            }
        }
        for i in 0..n {
            for j in 0..n {
                let lhs = &generators[j] * &generators[i] - &generators[i] * &generators[j];
                let mut rhs = CMatrix::zeros(d, d);
                for (k, g) in generators.iter().enumerate() {
                    rhs += g * crate::linalg::c(c[(i, j, k)]);
                }
                let defect = max_abs(&(lhs - rhs));
                if defect > 1e-10 {
                    return Err(Error::InvalidStructure(format!(
                        "representation fails the bracket relation on (e{i},e{j}): {defect:.3e}"
                    )));
                }
            }
        }
        Ok(Self { generators })
    }

    pub fn dim(&self) -> usize {
        self.generators[0].nrows()
    }

    pub fn generators(&self) -> &[CMatrix] {
        &self.generators
    }

    pub fn generator(&self, i: usize) -> &CMatrix {
        &self.generators[i]
    }

    /// Representation of the frame rescaled by `e_i -> s_i e_i`.
    pub fn rescaled(&self, scale: &[f64]) -> Self {
        Self {
            generators: self
                .generators
                .iter()
                .zip(scale)
                .map(|(g, s)| g * crate::linalg::c(*s))
                .collect(),
        }
    }
}

/// Coordinate description of a frame on an open chart.
pub trait ChartFields: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;
    /// Column `i` holds the coordinate components of `E_i` at `x`.
    fn frame(&self, x: &[f64]) -> DMatrix<f64>;
    /// Analytic structure functions, if known.
    fn brackets(&self, _x: &[f64]) -> Option<Tensor3> {
        None
    }
    fn default_samples(&self) -> Vec<Vec<f64>>;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleQuotient {
    pub length: f64,
    /// Spin structure along the circle: 0 trivial, 1 nontrivial.
    pub delta: u8,
}

/// Built-in chart frames.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "recipe", rename_all = "snake_case")]
pub enum ChartRecipe {
    /// Euclidean space with a constant flow direction; frame columns are an
    /// oriented orthonormal basis with first vector `xi`.
    Flat { xi: Vec<f64> },
    /// `ℝ × S²(radius)` in coordinates `(t, θ, φ)`, flow `∂_t`, optionally quotiented
    /// by `t -> t + length`.
    ProductSphere {
        radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        circle: Option<CircleQuotient>,
    },
    /// Warped product `ℝ ×_f ℝ²`, coordinates `(t, x, y)`, `g = f(x)² dt² + dx² + dy²`
    /// with `f = cosh(λx)`; the flow is geodesic only at `x = 0`.
    Warped { lambda: f64 },
    #[serde(skip)]
    Custom(Arc<dyn ChartFields>),
}

/// Oriented orthonormal basis of ℝⁿ whose first column is the unit vector `v`.
pub fn adapted_basis(v: &[f64]) -> Result<DMatrix<f64>> {
    let n = v.len();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!("xi must be a unit vector (norm {norm})")));
    }
    let mut cols: Vec<DVector<f64>> = vec![DVector::from_column_slice(v)];
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|a, b| v[*a].abs().total_cmp(&v[*b].abs()));
    for k in order {
        if cols.len() == n {
            break;
        }
        let mut w = DVector::zeros(n);
        w[k] = 1.0;
        for col in &cols {
            w -= col * col.dot(&w);
        }
        let wn = w.norm();
        if wn > 1e-6 {
            cols.push(w / wn);
        }
    }
    let mut m = DMatrix::from_columns(&cols);
    if m.determinant() < 0.0 {
        let last = n - 1;
        let flipped = -m.column(last);
        m.set_column(last, &flipped);
    }
    Ok(m)
}

impl ChartRecipe {
    fn validate(&self) -> Result<()> {
        match self {
            ChartRecipe::Flat { xi } => {
                if !(2..=7).contains(&xi.len()) {
                    return Err(Error::UnsupportedDimension(xi.len()));
                }
                adapted_basis(xi).map(|_| ())
            }
            ChartRecipe::ProductSphere { radius, circle } => {
                if !(*radius > 0.0) {
                    return Err(Error::InvalidParameter(format!("radius must be positive, got {radius}")));
                }
                if let Some(q) = circle {
                    if !(q.length > 0.0) || q.delta > 1 {
                        return Err(Error::InvalidParameter(format!(
                            "circle quotient needs length > 0 and delta in {{0,1}}, got {q:?}"
                        )));
                    }
                }
                Ok(())
            }
            ChartRecipe::Warped { lambda } => {
                if !lambda.is_finite() {
                    return Err(Error::InvalidParameter("lambda must be finite".into()));
                }
                Ok(())
            }
            ChartRecipe::Custom(_) => Ok(()),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ChartRecipe::Flat { xi } => xi.len(),
            ChartRecipe::ProductSphere { .. } | ChartRecipe::Warped { .. } => 3,
            ChartRecipe::Custom(f) => f.dim(),
        }
    }

    pub fn frame(&self, x: &[f64]) -> DMatrix<f64> {
        match self {
            ChartRecipe::Flat { xi } => adapted_basis(xi).expect("validated"),
            ChartRecipe::ProductSphere { radius, .. } => {
                let mut m = DMatrix::zeros(3, 3);
                m[(0, 0)] = 1.0;
                m[(1, 1)] = 1.0 / radius;
                m[(2, 2)] = 1.0 / (radius * x[1].sin());
                m
            }
            ChartRecipe::Warped { lambda } => {
                let mut m = DMatrix::identity(3, 3);
                m[(0, 0)] = 1.0 / (lambda * x[1]).cosh();
                m
            }
            ChartRecipe::Custom(f) => f.frame(x),
        }
    }

    pub fn brackets(&self, x: &[f64]) -> Option<Tensor3> {
        match self {
            ChartRecipe::Flat { xi } => Some(Tensor3::zeros(xi.len())),
            ChartRecipe::ProductSphere { radius, .. } => {
                let mut c = Tensor3::zeros(3);
                let cot = x[1].cos() / x[1].sin();
                c[(1, 2, 2)] = -cot / radius;
                c[(2, 1, 2)] = cot / radius;
                Some(c)
            }
            ChartRecipe::Warped { lambda } => {
                let mut c = Tensor3::zeros(3);
                let k = lambda * (lambda * x[1]).tanh();
                c[(1, 0, 0)] = -k;
                c[(0, 1, 0)] = k;
                Some(c)
            }
            ChartRecipe::Custom(f) => f.brackets(x),
        }
    }

    pub fn default_samples(&self) -> Vec<Vec<f64>> {
        match self {
            ChartRecipe::Flat { xi } => {
                let n = xi.len();
                (0..6)
                    .map(|s| (0..n).map(|k| ((s * n + k) as f64 * 0.754_877_666).fract() * 4.0 - 2.0).collect())
                    .collect()
            }
            ChartRecipe::ProductSphere { .. } => {
                let mut pts = Vec::new();
                for (a, t) in [0.0, 0.9, 2.3].iter().enumerate() {
                    for (b, th) in [0.45, 1.2, 1.9, 2.7].iter().enumerate() {
                        let ph = 0.3 + 1.7 * (a * 4 + b) as f64;
                        pts.push(vec![*t, *th, ph % std::f64::consts::TAU]);
                    }
                }
                pts
            }
            ChartRecipe::Warped { .. } => vec![
                vec![0.0, -1.1, 0.4],
                vec![0.7, -0.3, -0.8],
                vec![1.3, 0.0, 0.0],
                vec![-0.5, 0.6, 1.2],
                vec![2.1, 1.4, -0.2],
            ],
            ChartRecipe::Custom(f) => f.default_samples(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Homogeneous {
    pub structure: Tensor3,
    pub representations: Vec<FrameRepresentation>,
}

#[derive(Debug, Clone)]
pub struct Chart {
    pub recipe: ChartRecipe,
    /// Frame rescaling `E_i -> scale_i E_i` applied on top of the recipe.
    pub scale: Vec<f64>,
    pub samples: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub enum FrameKind {
    Homogeneous(Homogeneous),
    Chart(Chart),
}

#[derive(Debug, Clone)]
pub struct FrameManifold {
    name: String,
    dim: usize,
    kind: FrameKind,
}

impl FrameManifold {
    /// Left-invariant frame with constant structure constants.
    pub fn homogeneous(name: impl Into<String>, structure: Tensor3) -> Result<Self> {
        Self::homogeneous_with(name, structure, Vec::new())
    }

    pub fn homogeneous_with(
        name: impl Into<String>,
        structure: Tensor3,
        representations: Vec<FrameRepresentation>,
    ) -> Result<Self> {
        let dim = structure.dim();
        if !(2..=7).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        validate_structure(&structure, true)?;
        for r in &representations {
            FrameRepresentation::new(r.generators.clone(), &structure)?;
        }
        Ok(Self {
            name: name.into(),
            dim,
            kind: FrameKind::Homogeneous(Homogeneous { structure, representations }),
        })
    }

    pub fn chart(name: impl Into<String>, recipe: ChartRecipe) -> Result<Self> {
        recipe.validate()?;
        let dim = recipe.dim();
        let samples = recipe.default_samples();
        Ok(Self {
            name: name.into(),
            dim,
            kind: FrameKind::Chart(Chart { recipe, scale: vec![1.0; dim], samples }),
        })
    }

    pub fn with_samples(mut self, samples: Vec<Vec<f64>>) -> Result<Self> {
        match &mut self.kind {
            FrameKind::Chart(ch) => {
                if let Some(bad) = samples.iter().find(|s| s.len() != self.dim) {
                    return Err(Error::LengthMismatch { expected: self.dim, got: bad.len() });
                }
                ch.samples = samples;
                Ok(self)
            }
            FrameKind::Homogeneous(_) => Err(Error::WrongKind { expected: "chart" }),
        }
    }

    pub(crate) fn from_parts(name: String, kind: FrameKind) -> Result<Self> {
        let dim = match &kind {
            FrameKind::Homogeneous(h) => h.structure.dim(),
            FrameKind::Chart(c) => c.recipe.dim(),
        };
        match &kind {
            FrameKind::Homogeneous(h) => {
                validate_structure(&h.structure, true)?;
                for r in &h.representations {
                    FrameRepresentation::new(r.generators.clone(), &h.structure)?;
                }
            }
            FrameKind::Chart(c) => {
                c.recipe.validate()?;
                if c.scale.len() != dim {
                    return Err(Error::LengthMismatch { expected: dim, got: c.scale.len() });
                }
                if c.scale.iter().any(|s| !(*s > 0.0)) {
                    return Err(Error::InvalidParameter("frame scale factors must be positive".into()));
                }
            }
        }
        Ok(Self { name, dim, kind })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rename(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &FrameKind {
        &self.kind
    }

    pub fn is_homogeneous(&self) -> bool {
        matches!(self.kind, FrameKind::Homogeneous(_))
    }

    pub fn representations(&self) -> &[FrameRepresentation] {
        match &self.kind {
            FrameKind::Homogeneous(h) => &h.representations,
            FrameKind::Chart(_) => &[],
        }
    }

    pub fn samples(&self) -> Vec<Vec<f64>> {
        match &self.kind {
            FrameKind::Homogeneous(_) => vec![vec![0.0; self.dim]],
            FrameKind::Chart(c) => c.samples.clone(),
        }
    }

    pub fn circle_quotient(&self) -> Option<CircleQuotient> {
        match &self.kind {
            FrameKind::Chart(Chart { recipe: ChartRecipe::ProductSphere { circle, .. }, .. }) => *circle,
            _ => None,
        }
    }

    /// Coordinate components of the frame at `x` (chart kind only).
    pub fn frame_at(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        match &self.kind {
            FrameKind::Chart(ch) => {
                let mut m = ch.recipe.frame(x);
                for (i, s) in ch.scale.iter().enumerate() {
                    let col = m.column(i) * *s;
                    m.set_column(i, &col);
                }
                Ok(m)
            }
            FrameKind::Homogeneous(_) => Err(Error::WrongKind { expected: "chart" }),
        }
    }

    /// Structure functions at `x`: `[e_i, e_j] = Σ_k c(i,j,k) e_k`.
    pub fn structure_at(&self, x: &[f64]) -> Result<Tensor3> {
        match &self.kind {
            FrameKind::Homogeneous(h) => Ok(h.structure.clone()),
            FrameKind::Chart(ch) => {
                if let Some(base) = ch.recipe.brackets(x) {
                    let s = &ch.scale;
                    Ok(Tensor3::from_fn(self.dim, |i, j, k| base[(i, j, k)] * s[i] * s[j] / s[k]))
                } else {
                    self.brackets_by_differences(x)
                }
            }
        }
    }

    fn brackets_by_differences(&self, x: &[f64]) -> Result<Tensor3> {
        let n = self.dim;
        let e = self.frame_at(x)?;
        let inv = e.clone().try_inverse().ok_or_else(|| Error::InvalidStructure("degenerate frame".into()))?;
        // column j of D_i = E_i(E_j) in coordinates
        let derivs: Vec<DMatrix<f64>> = (0..n)
            .map(|i| {
                let v = e.column(i).into_owned();
                let plus: Vec<f64> = x.iter().zip(v.iter()).map(|(a, b)| a + tolerances::FD_STEP * b).collect();
                let minus: Vec<f64> = x.iter().zip(v.iter()).map(|(a, b)| a - tolerances::FD_STEP * b).collect();
                Ok((self.frame_at(&plus)? - self.frame_at(&minus)?) / (2.0 * tolerances::FD_STEP))
            })
            .collect::<Result<_>>()?;
        let mut c = Tensor3::zeros(n);
        for i in 0..n {
            for j in (i + 1)..n {
                let bracket = derivs[i].column(j) - derivs[j].column(i);
                let comps = &inv * bracket;
                for k in 0..n {
                    c[(i, j, k)] = comps[k];
                    c[(j, i, k)] = -comps[k];
                }
            }
        }
        Ok(c)
    }

    /// `x ± step·E_i(x)`, the stencil points for a derivative along `E_i`.
    pub fn stencil(&self, x: &[f64], i: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let e = self.frame_at(x)?;
        let plus = x.iter().enumerate().map(|(m, a)| a + tolerances::FD_STEP * e[(m, i)]).collect();
        let minus = x.iter().enumerate().map(|(m, a)| a - tolerances::FD_STEP * e[(m, i)]).collect();
        Ok((plus, minus))
    }

    /// Derivative along `E_i` at `x` of a vector-valued function of the coordinates,
    /// by central differences. Zero on homogeneous models, where every frame tensor is
    /// constant.
    pub fn frame_derivative<F>(&self, x: &[f64], i: usize, f: F) -> Result<DVector<f64>>
    where
        F: Fn(&[f64]) -> Result<DVector<f64>>,
    {
        if self.is_homogeneous() {
            return Ok(DVector::zeros(f(x)?.len()));
        }
        let (plus, minus) = self.stencil(x, i)?;
        Ok((f(&plus)? - f(&minus)?) / (2.0 * tolerances::FD_STEP))
    }
}

/// Geometry of the flow at one point.
#[derive(Debug, Clone)]
pub struct PointGeometry {
    pub coords: Vec<f64>,
    pub structure: Tensor3,
    pub gamma: Tensor3,
    /// `dgamma[i] = e_i(Γ)`.
    pub dgamma: Vec<Tensor3>,
    /// `h(e_b) = Σ_a h[(a,b)] e_a`; row and column 0 vanish.
    pub h: DMatrix<f64>,
    /// Frame components of `κ`; component 0 vanishes.
    pub kappa: DVector<f64>,
}

impl PointGeometry {
    fn at(mf: &FrameManifold, x: &[f64]) -> Result<Self> {
        let n = mf.dim();
        let structure = mf.structure_at(x)?;
        let gamma = levi_civita(&structure);
        let dgamma = if mf.is_homogeneous() {
            vec![Tensor3::zeros(n); n]
        } else {
            (0..n)
                .map(|i| {
                    let (plus, minus) = mf.stencil(x, i)?;
                    let gp = levi_civita(&mf.structure_at(&plus)?);
                    let gm = levi_civita(&mf.structure_at(&minus)?);
                    Ok(gp.combine(&gm, |a, b| (a - b) / (2.0 * tolerances::FD_STEP)))
                })
                .collect::<Result<_>>()?
        };
        let mut h = DMatrix::zeros(n, n);
        let mut kappa = DVector::zeros(n);
        for a in 1..n {
            kappa[a] = gamma[(0, 0, a)];
            for b in 1..n {
                h[(a, b)] = gamma[(b, 0, a)];
            }
        }
        let skew = (&h + h.transpose()).amax();
        let scale = 1.0 + h.amax();
        if skew > tolerances::FLOW * scale {
            return Err(Error::FlowViolation(skew));
        }
        Ok(Self { coords: x.to_vec(), structure, gamma, dgamma, h, kappa })
    }

    pub fn dim(&self) -> usize {
        self.gamma.dim()
    }

    /// `Ω(e_a, e_b) = g(h(e_a), e_b)`, antisymmetrized.
    pub fn omega(&self) -> TwoForm {
        let n = self.dim();
        let w = DMatrix::from_fn(n, n, |a, b| 0.5 * (self.h[(b, a)] - self.h[(a, b)]));
        TwoForm::new(w).expect("antisymmetric by construction")
    }

    /// `b` with `h = bJ` (3D only).
    pub fn b(&self) -> Option<f64> {
        (self.dim() == 3).then(|| self.h[(2, 1)])
    }

    /// `e_i(h)` as an N×N matrix.
    pub fn dh(&self, i: usize) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |a, b| if a == 0 || b == 0 { 0.0 } else { self.dgamma[i][(b, 0, a)] })
    }

    /// Transversal connection on Q as a matrix: `∇_{e_i} e_a = Σ_b M[(b,a)] e_b`.
    pub fn transversal_matrix(&self, i: usize) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |b, a| {
            if a == 0 || b == 0 {
                0.0
            } else if i == 0 {
                self.gamma[(0, a, b)] - self.h[(b, a)]
            } else {
                self.gamma[(i, a, b)]
            }
        })
    }

    /// Levi-Civita connection as a matrix: `∇^M_{e_i} e_j = Σ_k M[(k,j)] e_k`.
    pub fn ambient_matrix(&self, i: usize) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |k, j| self.gamma[(i, j, k)])
    }

    /// `(∇_{e_i} h)` with the transversal connection.
    pub fn nabla_h(&self, i: usize) -> DMatrix<f64> {
        let m = self.transversal_matrix(i);
        self.dh(i) + &m * &self.h - &self.h * &m
    }

    /// `∇^M_{e_i} κ` in frame components.
    pub fn nabla_kappa(&self, i: usize) -> DVector<f64> {
        let n = self.dim();
        let dk = DVector::from_fn(n, |k, _| self.dgamma[i][(0, 0, k)]);
        dk + self.ambient_matrix(i) * &self.kappa
    }

    /// `div^M κ`.
    pub fn div_kappa(&self) -> f64 {
        (0..self.dim()).map(|i| self.nabla_kappa(i)[i]).sum()
    }

    /// `div^M ξ = Σ_i Γ(i,0,i)`.
    pub fn div_xi(&self) -> f64 {
        (0..self.dim()).map(|i| self.gamma[(i, 0, i)]).sum()
    }

    pub fn h_norm_sq(&self) -> f64 {
        self.h.norm_squared()
    }

    pub fn curvature(&self) -> Curvature {
        Curvature::from_point(self)
    }
}

/// Riemann, Ricci and scalar curvature at a point.
#[derive(Debug, Clone)]
pub struct Curvature {
    n: usize,
    /// `r[l,k,i,j] = g(R(e_i,e_j)e_k, e_l)`.
    riemann: Vec<f64>,
    /// `Ric(e_j) = Σ_k ricci[(k,j)] e_k` (symmetric).
    pub ricci: DMatrix<f64>,
    pub scal: f64,
}

impl Curvature {
    fn from_point(p: &PointGeometry) -> Self {
        let n = p.dim();
        let g = &p.gamma;
        let c = &p.structure;
        let mut riemann = vec![0.0; n * n * n * n];
        for l in 0..n {
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let mut r = p.dgamma[i][(j, k, l)] - p.dgamma[j][(i, k, l)];
                        for m in 0..n {
                            r += g[(j, k, m)] * g[(i, m, l)] - g[(i, k, m)] * g[(j, m, l)]
                                - c[(i, j, m)] * g[(m, k, l)];
                        }
                        riemann[((l * n + k) * n + i) * n + j] = r;
                    }
                }
            }
        }
        let ricci = DMatrix::from_fn(n, n, |k, j| {
            (0..n).map(|i| riemann[((i * n + k) * n + i) * n + j]).sum()
        });
        let scal = ricci.trace();
        Self { n, riemann, ricci, scal }
    }

    pub fn riemann(&self, l: usize, k: usize, i: usize, j: usize) -> f64 {
        let n = self.n;
        self.riemann[((l * n + k) * n + i) * n + j]
    }

    pub fn ric(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.ricci * v
    }

    /// Largest first-Bianchi defect.
    pub fn bianchi_defect(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for l in 0..n {
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let s = self.riemann(l, k, i, j) + self.riemann(l, i, j, k) + self.riemann(l, j, k, i);
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    pub fn ricci_asymmetry(&self) -> f64 {
        (&self.ricci - self.ricci.transpose()).amax()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SasakiReport {
    pub is_minimal: bool,
    pub is_almost_hermitian: bool,
    pub is_h_parallel: bool,
}

impl SasakiReport {
    pub fn is_sasakian(&self) -> bool {
        self.is_minimal && self.is_almost_hermitian && self.is_h_parallel
    }
}

/// Flow tensors at every sample point of a frame manifold.
#[derive(Debug, Clone)]
pub struct FlowGeometry {
    manifold: FrameManifold,
    points: Vec<PointGeometry>,
}

impl FlowGeometry {
    /// Errors with a flow violation if `h` fails skew-symmetry anywhere.
    pub fn new(mf: &FrameManifold) -> Result<Self> {
        Self::at_points(mf, &mf.samples())
    }

    pub fn at_points(mf: &FrameManifold, samples: &[Vec<f64>]) -> Result<Self> {
        let points = samples.iter().map(|x| PointGeometry::at(mf, x)).collect::<Result<_>>()?;
        Ok(Self { manifold: mf.clone(), points })
    }

    pub fn manifold(&self) -> &FrameManifold {
        &self.manifold
    }

    pub fn dim(&self) -> usize {
        self.manifold.dim()
    }

    pub fn points(&self) -> &[PointGeometry] {
        &self.points
    }

    pub fn point(&self, idx: usize) -> &PointGeometry {
        &self.points[idx]
    }

    pub fn is_homogeneous(&self) -> bool {
        self.manifold.is_homogeneous()
    }

    pub fn tolerance(&self) -> f64 {
        if self.is_homogeneous() {
            tolerances::HOMOGENEOUS
        } else {
            tolerances::CHART
        }
    }

    /// Geometry at an arbitrary chart point.
    pub fn point_at(&self, x: &[f64]) -> Result<PointGeometry> {
        PointGeometry::at(&self.manifold, x)
    }

    pub fn oneill_tensor(&self) -> Vec<DMatrix<f64>> {
        self.points.iter().map(|p| p.h.clone()).collect()
    }

    pub fn mean_curvature(&self) -> Vec<DVector<f64>> {
        self.points.iter().map(|p| p.kappa.clone()).collect()
    }

    pub fn curvature(&self) -> Vec<Curvature> {
        self.points.iter().map(PointGeometry::curvature).collect()
    }

    /// `∇_{e_x} Z` at sample point `idx` for a Q-valued field given by its frame components.
    pub fn transversal_derivative<F>(&self, idx: usize, x: usize, z: F) -> Result<DVector<f64>>
    where
        F: Fn(&[f64]) -> DVector<f64>,
    {
        let p = &self.points[idx];
        let z0 = z(&p.coords);
        if z0.len() != self.dim() {
            return Err(Error::LengthMismatch { expected: self.dim(), got: z0.len() });
        }
        if z0[0].abs() > tolerances::EXACT * (1.0 + z0.amax()) {
            return Err(Error::NotTransversal(z0[0]));
        }
        let dz = self.manifold.frame_derivative(&p.coords, x, |y| Ok(z(y)))?;
        let mut out = dz + p.transversal_matrix(x) * z0;
        out[0] = 0.0;
        Ok(out)
    }

    pub fn sasaki_check(&self) -> SasakiReport {
        let n = self.dim();
        let tol = tolerances::HOMOGENEOUS.max(if self.is_homogeneous() { 0.0 } else { tolerances::CHART });
        let mut minimal = true;
        let mut hermitian = n % 2 == 1;
        let mut parallel = true;
        for p in &self.points {
            minimal &= p.kappa.amax() <= tol;
            let mut q_id = DMatrix::identity(n, n);
            q_id[(0, 0)] = 0.0;
            hermitian &= (&p.h * &p.h + q_id).amax() <= tol;
            parallel &= (0..n).all(|i| p.nabla_h(i).amax() <= tol);
        }
        SasakiReport { is_minimal: minimal, is_almost_hermitian: hermitian, is_h_parallel: parallel }
    }

    /// Largest `|(∇_X J)|` over sample points and frame directions (3D only).
    pub fn nabla_j_defect(&self) -> Option<f64> {
        if self.dim() != 3 {
            return None;
        }
        let j = complex_structure_3d();
        Some(self.points.iter().fold(0.0, |acc, p| {
            (0..3).fold(acc, |acc, i| {
                let m = p.transversal_matrix(i);
                acc.max((&m * &j - &j * &m).amax())
            })
        }))
    }
}

/// `J e_1 = e_2`, `J e_2 = −e_1` embedded in frame indices (row/column 0 vanish).
pub fn complex_structure_3d() -> DMatrix<f64> {
    let mut j = DMatrix::zeros(3, 3);
    j[(2, 1)] = 1.0;
    j[(1, 2)] = -1.0;
    j
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3_cyclic_plus() -> Tensor3 {
        // [e_1,e_2] = 2e_3 cyclically, indices 0,1,2 ↔ e_1,e_2,e_3
        let mut c = Tensor3::zeros(3);
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            c[(i, j, k)] = 2.0;
            c[(j, i, k)] = -2.0;
        }
        c
    }

    #[test]
    fn abelian_is_flat() {
        assert_eq!(levi_civita(&Tensor3::zeros(4)), Tensor3::zeros(4));
    }

    #[test]
    fn bi_invariant_s3_connection() {
        let g = levi_civita(&s3_cyclic_plus());
        // ∇_{e1} e2 = e3
        assert_eq!(g[(0, 1, 2)], 1.0);
        assert_eq!(g[(0, 1, 0)], 0.0);
        assert_eq!(g[(0, 1, 1)], 0.0);
    }

    #[test]
    fn heisenberg_hand_koszul() {
        // indices: 0 = ξ, 1 = e1, 2 = e2 with [e1,e2] = 2ξ
        let mut c = Tensor3::zeros(3);
        c[(1, 2, 0)] = 2.0;
        c[(2, 1, 0)] = -2.0;
        let g = levi_civita(&c);
        assert_eq!((g[(1, 2, 0)], g[(1, 2, 1)], g[(1, 2, 2)]), (1.0, 0.0, 0.0));
        assert_eq!((g[(1, 0, 0)], g[(1, 0, 1)], g[(1, 0, 2)]), (0.0, 0.0, -1.0));
        assert_eq!((g[(0, 0, 1)], g[(0, 0, 2)]), (0.0, 0.0));
        let mf = FrameManifold::homogeneous("heis", c).unwrap();
        let geo = FlowGeometry::new(&mf).unwrap();
        assert_eq!(geo.point(0).b(), Some(-1.0));
    }

    #[test]
    fn metricity_and_torsion() {
        let c = s3_cyclic_plus();
        let g = levi_civita(&c);
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    assert_eq!(g[(i, j, k)], -g[(i, k, j)]);
                    assert_eq!(g[(i, j, k)] - g[(j, i, k)], c[(i, j, k)]);
                }
            }
        }
    }

    #[test]
    fn jacobi_violation_rejected() {
        validate_structure(&s3_cyclic_plus(), true).unwrap();
        // [e0,e1] = e1, [e1,e2] = e0 is not a Lie algebra
        let mut c = Tensor3::zeros(3);
        c[(0, 1, 1)] = 1.0;
        c[(1, 0, 1)] = -1.0;
        c[(1, 2, 0)] = 1.0;
        c[(2, 1, 0)] = -1.0;
        assert!(validate_structure(&c, true).is_err());
    }

    #[test]
    fn non_flow_rejected() {
        // [e1, ξ] = e1 stretches Q along the flow: h symmetric
        let mut c = Tensor3::zeros(3);
        c[(1, 0, 1)] = 1.0;
        c[(0, 1, 1)] = -1.0;
        let mf = FrameManifold::homogeneous("bad", c).unwrap();
        assert!(matches!(FlowGeometry::new(&mf), Err(Error::FlowViolation(_))));
    }

    #[test]
    fn adapted_basis_is_oriented() {
        for v in [vec![0.0, 0.0, 1.0], vec![0.6, 0.0, 0.8], vec![1.0, 0.0, 0.0]] {
            let m = adapted_basis(&v).unwrap();
            assert!((m.determinant() - 1.0).abs() < 1e-12);
            assert!((m.transpose() * &m - DMatrix::identity(3, 3)).amax() < 1e-12);
            assert_eq!(m.column(0).iter().copied().collect::<Vec<_>>(), v);
        }
    }

    #[test]
    fn sphere_chart_brackets_match_differences() {
        let mf = FrameManifold::chart("s2", ChartRecipe::ProductSphere { radius: 1.3, circle: None }).unwrap();
        let x = [0.2, 1.1, 0.5];
        let analytic = mf.structure_at(&x).unwrap();
        let numeric = mf.brackets_by_differences(&x).unwrap();
        assert!(analytic.max_abs_diff(&numeric) < 1e-7);
    }
}
