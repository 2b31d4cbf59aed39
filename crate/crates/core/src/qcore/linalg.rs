//! Small dense complex matrix helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ONE: C64 = C64::new(1.0, 0.0);
pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// Builds a matrix from real row-major entries.
pub fn real_matrix(rows: usize, cols: usize, entries: &[f64]) -> CMatrix {
    CMatrix::from_row_iterator(rows, cols, entries.iter().map(|&x| real(x)))
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b + b * a
}

/// Largest singular value.
pub fn op_norm(a: &CMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.singular_values().iter().cloned().fold(0.0, f64::max)
}

/// Frobenius norm: an upper bound on [`op_norm`] that avoids a singular value decomposition,
/// used for residuals of large dense identities.
pub fn frobenius_norm(a: &CMatrix) -> f64 {
    a.norm()
}

pub fn hermiticity_residual(a: &CMatrix) -> f64 {
    op_norm(&(a - a.adjoint()))
}

pub fn is_identity(a: &CMatrix, tol: f64) -> bool {
    a.is_square() && (a - identity(a.nrows())).iter().all(|z| z.norm() <= tol)
}

/// Applies a real function to a Hermitian matrix through its eigendecomposition.
pub fn hermitian_function(a: &CMatrix, f: impl Fn(f64) -> C64) -> CMatrix {
    let herm = (a + a.adjoint()) * real(0.5);
    let eig = herm.symmetric_eigen();
    let vecs = &eig.eigenvectors;
    let diag = CVector::from_iterator(eig.eigenvalues.len(), eig.eigenvalues.iter().map(|&l| f(l)));
    vecs * CMatrix::from_diagonal(&diag) * vecs.adjoint()
}

/// `exp(i t A)` for Hermitian `A`.
pub fn exp_i_hermitian(a: &CMatrix, t: f64) -> CMatrix {
    hermitian_function(a, |l| C64::from_polar(1.0, l * t))
}

pub fn cos_hermitian(a: &CMatrix, t: f64) -> CMatrix {
    hermitian_function(a, |l| real((l * t).cos()))
}

pub fn sin_hermitian(a: &CMatrix, t: f64) -> CMatrix {
    hermitian_function(a, |l| real((l * t).sin()))
}

pub fn normalize(v: &CVector) -> CVector {
    let n = v.norm();
    v / real(n)
}

/// `|<a|b>|^2` for normalized vectors.
pub fn fidelity(a: &CVector, b: &CVector) -> f64 {
    let ov = a.dotc(b);
    ov.norm_sqr() / (a.norm_squared() * b.norm_squared())
}

/// Orthonormalizes `vectors`, dropping those whose residual norm falls below `drop_tol`.
/// Returns the basis and the residual norms seen (one per input).
pub fn gram_schmidt(vectors: &[CVector], drop_tol: f64) -> (Vec<CVector>, Vec<f64>) {
    let mut basis: Vec<CVector> = Vec::new();
    let mut residuals = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let p = b.dotc(&w);
                w -= b * p;
            }
        }
        let n = w.norm();
        residuals.push(n);
        if n > drop_tol {
            basis.push(w / real(n));
        }
    }
    (basis, residuals)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    let herm = (a + a.adjoint()) * real(0.5);
    let mut vals: Vec<f64> = herm.symmetric_eigen().eigenvalues.iter().cloned().collect();
    vals.sort_by(|x, y| x.total_cmp(y));
    vals
}
