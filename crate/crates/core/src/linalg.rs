//! Small dense complex linear algebra helpers.

use nalgebra::{Complex, DMatrix, DVector};

use crate::tolerances;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn eye(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn real_matrix(m: &DMatrix<f64>) -> CMatrix {
    m.map(c)
}

/// Largest absolute entry.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Max-norm of a complex vector.
pub fn max_norm(v: &CVector) -> f64 {
    v.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Result of a singular-value nullspace extraction.
#[derive(Debug, Clone)]
pub struct Nullspace {
    /// Orthonormal basis of the numerical kernel.
    pub basis: Vec<CVector>,
    /// All singular values, descending.
    pub singular_values: Vec<f64>,
    pub threshold: f64,
}

/// Numerical kernel of `a`: right singular vectors whose singular value is below
/// `relative * sigma_max` (with an absolute floor for the zero matrix).
pub fn nullspace(a: &CMatrix, relative: f64) -> Nullspace {
    let cols = a.ncols();
    if cols == 0 {
        return Nullspace { basis: Vec::new(), singular_values: Vec::new(), threshold: 0.0 };
    }
    // Pad so the SVD returns a full right factor.
    let padded = if a.nrows() < cols {
        let mut p = CMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (a.nrows(), cols)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sigma: Vec<f64> = svd.singular_values.iter().copied().collect();
    let sigma_max = sigma.iter().copied().fold(0.0, f64::max);
    let threshold = (relative * sigma_max).max(tolerances::KERNEL_ABSOLUTE);
    let basis = sigma
        .iter()
        .enumerate()
        .filter(|(_, s)| **s <= threshold)
        .map(|(k, _)| v_t.row(k).adjoint())
        .collect();
    let mut singular_values = sigma;
    singular_values.sort_by(|x, y| y.total_cmp(x));
    Nullspace { basis, singular_values, threshold }
}

/// Numerical rank of a family of vectors.
pub fn rank(vectors: &[CVector], relative: f64) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let m = CMatrix::from_columns(vectors);
    let sigma = m.singular_values();
    let top = sigma.iter().copied().fold(0.0, f64::max);
    if top <= tolerances::KERNEL_ABSOLUTE {
        return 0;
    }
    sigma.iter().filter(|s| **s > relative * top).count()
}

/// Stack matrices vertically (all must share the column count).
pub fn vstack(blocks: &[CMatrix]) -> CMatrix {
    let cols = blocks.first().map_or(0, |b| b.ncols());
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMatrix::zeros(rows, cols);
    let mut r = 0;
    for b in blocks {
        out.view_mut((r, 0), (b.nrows(), cols)).copy_from(b);
        r += b.nrows();
    }
    out
}

/// Matrix exponential by scaling and squaring with a Taylor core.
pub fn expm(a: &CMatrix) -> CMatrix {
    let norm = max_abs(a) * a.nrows() as f64;
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let x = a * c(scale);
    let n = a.nrows();
    let mut term = eye(n);
    let mut sum = eye(n);
    for k in 1..=18 {
        term = &term * &x * c(1.0 / k as f64);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nullspace_of_rank_one() {
        let a = CMatrix::from_row_slice(2, 2, &[c(1.0), c(1.0), c(1.0), c(1.0)]);
        let k = nullspace(&a, 1e-8);
        assert_eq!(k.basis.len(), 1);
        assert!(max_norm(&(&a * &k.basis[0])) < 1e-14);
    }

    #[test]
    fn nullspace_of_zero_is_everything() {
        let k = nullspace(&CMatrix::zeros(4, 3), 1e-8);
        assert_eq!(k.basis.len(), 3);
    }

    #[test]
    fn wide_matrix_gets_full_right_factor() {
        let a = CMatrix::from_row_slice(1, 3, &[c(1.0), c(0.0), c(0.0)]);
        assert_eq!(nullspace(&a, 1e-8).basis.len(), 2);
    }

    #[test]
    fn expm_of_rotation_generator() {
        let t = 0.7;
        let a = CMatrix::from_row_slice(2, 2, &[c(0.0), c(-t), c(t), c(0.0)]);
        let e = expm(&a);
        assert!((e[(0, 0)] - c(t.cos())).norm() < 1e-14);
        assert!((e[(1, 0)] - c(t.sin())).norm() < 1e-14);
    }
}
