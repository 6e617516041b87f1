//! Dense Hermitian eigen-solves backed by faer.

use faer::{Mat, Side};
use ndarray::Array2;
use num_complex::Complex64 as C64;

use super::AlgebraError;

fn to_faer(a: &Array2<C64>) -> Mat<C64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[[i, j]])
}

/// Eigenvalues (ascending) of a Hermitian matrix. Only the lower triangle is
/// read.
pub fn hermitian_eigenvalues(a: &Array2<C64>) -> Result<Vec<f64>, AlgebraError> {
    to_faer(a)
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| AlgebraError::Eigen(format!("{e:?}")))
}

/// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues and the
/// matching eigenvectors as columns.
pub fn hermitian_eigh(a: &Array2<C64>) -> Result<(Vec<f64>, Array2<C64>), AlgebraError> {
    let evd = to_faer(a)
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| AlgebraError::Eigen(format!("{e:?}")))?;
    let s = evd.S();
    let u = evd.U();
    let n = a.nrows();
    let values = (0..n).map(|k| s[k].re).collect();
    let vectors = Array2::from_shape_fn((n, n), |(i, j)| u[(i, j)]);
    Ok((values, vectors))
}

/// `exp(X)` for anti-Hermitian `X`, via the eigen-decomposition of `iX`.
pub fn expm_antihermitian(x: &Array2<C64>) -> Result<Array2<C64>, AlgebraError> {
    let i = C64::new(0.0, 1.0);
    let k = x.mapv(|v| i * v);
    let (vals, vecs) = hermitian_eigh(&k)?;
    // X = -i K, exp(X) = V diag(exp(-i λ)) V†
    let phases: Vec<C64> = vals.iter().map(|&l| (-i * l).exp()).collect();
    let n = x.nrows();
    let mut scaled = vecs.clone();
    for j in 0..n {
        for r in 0..n {
            scaled[[r, j]] *= phases[j];
        }
    }
    let vh = vecs.t().mapv(|v| v.conj());
    Ok(scaled.dot(&vh))
}

/// Singular values of a general complex matrix, descending.
pub fn singular_values(a: &Array2<C64>) -> Result<Vec<f64>, AlgebraError> {
    to_faer(a)
        .singular_values()
        .map_err(|e| AlgebraError::Eigen(format!("{e:?}")))
}
