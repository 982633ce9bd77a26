//! Dense complex linear algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// Largest entrywise modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Spectral decomposition of a Hermitian matrix, eigenvalues ascending.
///
/// The input is symmetrized first so that round-off asymmetry never leaks
/// into the eigenvectors. Column `k` of the returned matrix is the
/// eigenvector for eigenvalue `k`.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = hermitian_part(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), order.len(), |r, k| eig.eigenvectors[(r, order[k])]);
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut values: Vec<f64> = hermitian_part(m).symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).first().copied().unwrap_or(0.0)
}

/// Applies `f` to the spectrum of a Hermitian matrix.
pub fn hermitian_function(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (values, vectors) = hermitian_eigen(m);
    let diag = CMatrix::from_diagonal(&CVector::from_iterator(
        values.len(),
        values.iter().map(|&v| c(f(v), 0.0)),
    ));
    &vectors * diag * vectors.adjoint()
}

/// Square root with negative eigenvalues clipped to zero.
pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    hermitian_function(m, |v| v.max(0.0).sqrt())
}

pub fn psd_inv_sqrt(m: &CMatrix) -> CMatrix {
    hermitian_function(m, |v| 1.0 / v.max(0.0).sqrt())
}

pub fn trace_re(m: &CMatrix) -> f64 {
    m.trace().re
}

/// `Tr[a b]` for Hermitian arguments (real part only).
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.transpose().iter())
        .map(|(x, y)| (x * y).re)
        .sum()
}

/// `<v|m|v>` real part.
pub fn expectation(m: &CMatrix, v: &CVector) -> f64 {
    v.dotc(&(m * v)).re
}

pub fn projector(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_reconstructs_hermitian_input() {
        let m = CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(3.0, 0.0)]);
        let (values, vectors) = hermitian_eigen(&m);
        assert!(values[0] <= values[1]);
        let diag = CMatrix::from_diagonal(&CVector::from_iterator(2, values.iter().map(|&v| c(v, 0.0))));
        let back = &vectors * diag * vectors.adjoint();
        assert!(max_abs(&(back - m)) < 1e-12);
    }

    #[test]
    fn sqrt_squares_back() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0.7, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.3, 0.0)]);
        let r = psd_sqrt(&m);
        assert!(max_abs(&(&r * &r - &m)) < 1e-12);
        let ri = psd_inv_sqrt(&m);
        assert!(max_abs(&(&ri * &m * &ri - identity(2))) < 1e-12);
    }

    #[test]
    fn trace_product_matches_full_product() {
        let a = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.1, 0.3), c(0.1, -0.3), c(0.5, 0.0)]);
        let b = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(-0.2, 0.1), c(-0.2, -0.1), c(0.0, 0.0)]);
        assert!((trace_product(&a, &b) - (&a * &b).trace().re).abs() < 1e-15);
    }
}
