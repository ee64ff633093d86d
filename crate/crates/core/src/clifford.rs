//! Complex matrix representations of Cl(N), 2 <= N <= 7, and the Clifford actions
//! of vectors and 2-forms on spinors.
//!
//! Generators are skew-Hermitian with `γ_j² = -1`; `γ_0` represents the flow field ξ.
//! For odd N the complex volume element `i^{⌊(N+1)/2⌋} γ_0⋯γ_{N-1}` acts as the identity.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{c, eye, max_abs, CMatrix, CVector, C64, I};
use crate::tolerances;

/// Spinor components in the frame trivialization.
pub type SpinorValue = CVector;

/// Hermitian inner product `Σ a_i conj(b_i)`.
pub fn inner(a: &SpinorValue, b: &SpinorValue) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum()
}

/// Real antisymmetric 2-form in frame indices.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoForm {
    entries: DMatrix<f64>,
}

impl TwoForm {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let n = entries.nrows();
        if entries.ncols() != n {
            return Err(Error::LengthMismatch { expected: n, got: entries.ncols() });
        }
        for j in 0..n {
            for k in j..n {
                if entries[(j, k)] != -entries[(k, j)] {
                    return Err(Error::NotAntisymmetric(j, k));
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn zero(n: usize) -> Self {
        Self { entries: DMatrix::zeros(n, n) }
    }

    /// `e_j ∧ e_k`.
    pub fn wedge(n: usize, j: usize, k: usize) -> Self {
        let mut entries = DMatrix::zeros(n, n);
        if j != k {
            entries[(j, k)] = 1.0;
            entries[(k, j)] = -1.0;
        }
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }
}

/// Whether the last generator was negated to pin the volume convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VolumeSign {
    AsConstructed,
    LastFlipped,
}

#[derive(Debug, Clone)]
pub struct CliffordRep {
    ambient_dim: usize,
    spinor_dim: usize,
    generators: Vec<CMatrix>,
    volume_sign: VolumeSign,
}

fn pauli() -> [CMatrix; 3] {
    let z = c(0.0);
    [
        CMatrix::from_row_slice(2, 2, &[z, c(1.0), c(1.0), z]),
        CMatrix::from_row_slice(2, 2, &[z, -I, I, z]),
        CMatrix::from_row_slice(2, 2, &[c(1.0), z, z, c(-1.0)]),
    ]
}

fn kron_chain(factors: &[&CMatrix]) -> CMatrix {
    factors.iter().fold(eye(1), |acc, f| acc.kronecker(f))
}

impl CliffordRep {
    /// Jordan-Wigner construction: Hermitian Γ's from Pauli tensor products, γ = iΓ.
    pub fn new(ambient_dim: usize) -> Result<Self> {
        if !(2..=7).contains(&ambient_dim) {
            return Err(Error::UnsupportedDimension(ambient_dim));
        }
        let [s1, s2, s3] = pauli();
        let id2 = eye(2);
        let k = ambient_dim / 2;
        let mut hermitian = Vec::with_capacity(ambient_dim);
        for p in 0..k {
            for s in [&s1, &s2] {
                let mut factors: Vec<&CMatrix> = vec![&s3; p];
                factors.push(s);
                factors.extend(std::iter::repeat_n(&id2, k - p - 1));
                hermitian.push(kron_chain(&factors));
            }
        }
        if ambient_dim % 2 == 1 {
            hermitian.push(kron_chain(&vec![&s3; k]));
        }
        let generators: Vec<CMatrix> = hermitian.into_iter().map(|g| g * I).collect();
        let mut rep = Self {
            ambient_dim,
            spinor_dim: 1 << k,
            generators,
            volume_sign: VolumeSign::AsConstructed,
        };
        if ambient_dim % 2 == 1 {
            let omega = rep.volume_element();
            if (omega[(0, 0)] + c(1.0)).norm() < 0.5 {
                let last = ambient_dim - 1;
                rep.generators[last] = -rep.generators[last].clone();
                rep.volume_sign = VolumeSign::LastFlipped;
            }
        }
        Ok(rep)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn spinor_dim(&self) -> usize {
        self.spinor_dim
    }

    pub fn volume_sign(&self) -> VolumeSign {
        self.volume_sign
    }

    pub fn gamma(&self, j: usize) -> &CMatrix {
        &self.generators[j]
    }

    pub fn generators(&self) -> &[CMatrix] {
        &self.generators
    }

    /// `i^{⌊(N+1)/2⌋} γ_0 ⋯ γ_{N-1}`.
    pub fn volume_element(&self) -> CMatrix {
        let product = self.generators.iter().fold(eye(self.spinor_dim), |acc, g| acc * g);
        let power = self.ambient_dim.div_ceil(2);
        product * I.powu(power as u32)
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.ambient_dim {
            return Err(Error::LengthMismatch { expected: self.ambient_dim, got: len });
        }
        Ok(())
    }

    /// Matrix of Clifford multiplication by `Σ v_j e_j`.
    pub fn vector_matrix(&self, v: &[f64]) -> Result<CMatrix> {
        self.check_len(v.len())?;
        let mut m = CMatrix::zeros(self.spinor_dim, self.spinor_dim);
        for (g, &vj) in self.generators.iter().zip(v) {
            if vj != 0.0 {
                m += g * c(vj);
            }
        }
        Ok(m)
    }

    pub fn vector_action(&self, v: &[f64], s: &SpinorValue) -> Result<SpinorValue> {
        self.check_spinor(s)?;
        Ok(self.vector_matrix(v)? * s)
    }

    /// Matrix of `Σ_{j<k} w_jk γ_j γ_k`.
    pub fn two_form_matrix(&self, w: &TwoForm) -> Result<CMatrix> {
        self.check_len(w.dim())?;
        let n = self.ambient_dim;
        let mut m = CMatrix::zeros(self.spinor_dim, self.spinor_dim);
        for j in 0..n {
            for k in (j + 1)..n {
                let wjk = w.entries()[(j, k)];
                if wjk != 0.0 {
                    m += &self.generators[j] * &self.generators[k] * c(wjk);
                }
            }
        }
        Ok(m)
    }

    pub fn two_form_action(&self, w: &TwoForm, s: &SpinorValue) -> Result<SpinorValue> {
        self.check_spinor(s)?;
        Ok(self.two_form_matrix(w)? * s)
    }

    pub fn check_spinor(&self, s: &SpinorValue) -> Result<()> {
        if s.len() != self.spinor_dim {
            return Err(Error::LengthMismatch { expected: self.spinor_dim, got: s.len() });
        }
        Ok(())
    }

    /// Orthogonal projectors onto `Σ± = ker(iξ· ∓ 1)`.
    pub fn xi_projectors(&self) -> (CMatrix, CMatrix) {
        let id = eye(self.spinor_dim);
        let ixi = &self.generators[0] * I;
        ((&id + &ixi) * c(0.5), (&id - &ixi) * c(0.5))
    }

    pub fn xi_split(&self, s: &SpinorValue) -> (SpinorValue, SpinorValue) {
        let (p, m) = self.xi_projectors();
        (&p * s, &m * s)
    }

    /// Eigenprojectors of a transversal Kähler form, eigenvalue `i(2r - m)` for `r = 0..=m`.
    pub fn omega_eigenprojectors(&self, kaehler: &TwoForm, m: usize) -> Result<Vec<CMatrix>> {
        let a = self.two_form_matrix(kaehler)?;
        let lambdas: Vec<C64> = (0..=m).map(|r| I * (2.0 * r as f64 - m as f64)).collect();
        let id = eye(self.spinor_dim);
        let annihilator = lambdas.iter().fold(id.clone(), |acc, l| acc * (&a - &id * *l));
        let scale = (1.0 + max_abs(&a)).powi(m as i32 + 1);
        let defect = max_abs(&annihilator) / scale;
        if defect > tolerances::SPECTRAL {
            return Err(Error::SpectrumMismatch { m, defect });
        }
        Ok((0..=m)
            .map(|r| {
                lambdas.iter().enumerate().filter(|(s, _)| *s != r).fold(id.clone(), |acc, (_, ls)| {
                    acc * ((&a - &id * *ls) / (lambdas[r] - ls))
                })
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimension_range() {
        assert!(CliffordRep::new(1).is_err());
        assert!(CliffordRep::new(8).is_err());
        for n in 2..=7 {
            assert_eq!(CliffordRep::new(n).unwrap().spinor_dim(), 1 << (n / 2));
        }
    }

    #[test]
    fn dim_three_volume_convention() {
        let rep = CliffordRep::new(3).unwrap();
        let prod = -(rep.gamma(0) * rep.gamma(1) * rep.gamma(2));
        assert!(max_abs(&(prod - eye(2))) < 1e-15);
        // quaternion relations that follow from it
        assert!(max_abs(&(rep.gamma(0) * rep.gamma(1) - rep.gamma(2))) < 1e-15);
        assert!(max_abs(&(rep.gamma(1) * rep.gamma(2) - rep.gamma(0))) < 1e-15);
        assert!(max_abs(&(rep.gamma(2) * rep.gamma(0) - rep.gamma(1))) < 1e-15);
    }

    #[test]
    fn dim_five_volume() {
        let rep = CliffordRep::new(5).unwrap();
        assert_eq!(rep.spinor_dim(), 4);
        assert!(max_abs(&(rep.volume_element() - eye(4))) < 1e-15);
    }

    #[test]
    fn deterministic() {
        let a = CliffordRep::new(6).unwrap();
        let b = CliffordRep::new(6).unwrap();
        assert_eq!(a.generators(), b.generators());
    }

    #[test]
    fn wedge_12_acts_as_xi_in_dim_three() {
        let rep = CliffordRep::new(3).unwrap();
        let m = rep.two_form_matrix(&TwoForm::wedge(3, 1, 2)).unwrap();
        assert!(max_abs(&(m - rep.gamma(0))) < 1e-15);
    }

    #[test]
    fn rejects_non_antisymmetric() {
        let mut e = DMatrix::zeros(3, 3);
        e[(0, 1)] = 1.0;
        assert!(matches!(TwoForm::new(e), Err(Error::NotAntisymmetric(0, 1))));
    }

    #[test]
    fn split_eigenvector() {
        let rep = CliffordRep::new(3).unwrap();
        let (p, _) = rep.xi_projectors();
        let s = p.column(0).into_owned();
        let s = if s.norm() > 0.1 { s } else { p.column(1).into_owned() };
        let (sp, sm) = rep.xi_split(&s);
        assert!((sp - &s).norm() < 1e-15);
        assert!(sm.norm() < 1e-15);
    }

    #[test]
    fn s5_kaehler_spectrum() {
        let rep = CliffordRep::new(5).unwrap();
        let mut w = DMatrix::zeros(5, 5);
        w[(1, 2)] = 1.0;
        w[(2, 1)] = -1.0;
        w[(3, 4)] = 1.0;
        w[(4, 3)] = -1.0;
        let w = TwoForm::new(w).unwrap();
        let ps = rep.omega_eigenprojectors(&w, 2).unwrap();
        let ranks: Vec<usize> = ps.iter().map(|p| p.trace().re.round() as usize).collect();
        assert_eq!(ranks, vec![1, 2, 1]);
        assert!(rep.omega_eigenprojectors(&w, 1).is_err());
    }
}
