use super::{hermitian_deviation, TAU_HERM};
use crate::{CMatrix, Complex64, Error, Result};
use nalgebra::linalg::SymmetricEigen;

/// Eigen-decomposition of a Hermitian matrix, eigenvalues descending.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `eigenvalues`.
    pub eigenvectors: CMatrix,
}

impl Spectrum {
    /// `V diag(lambda) V^dagger`.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.eigenvectors.nrows();
        let mut out = CMatrix::zeros(n, n);
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            let v = self.eigenvectors.column(j);
            out += &v * v.adjoint() * Complex64::new(l, 0.0);
        }
        out
    }

    /// Number of eigenvalues strictly above `tol`.
    pub fn count_above(&self, tol: f64) -> usize {
        self.eigenvalues.iter().filter(|&&l| l > tol).count()
    }
}

/// Spectrum of a Hermitian matrix; rejects inputs farther than `TAU_HERM`
/// (relative to the largest entry, at least absolute) from Hermitian.
pub fn hermitian_spectrum(m: &CMatrix) -> Result<Spectrum> {
    let scale = m.iter().map(|z| z.norm()).fold(1.0f64, f64::max);
    let dev = hermitian_deviation(m);
    if dev > TAU_HERM * scale {
        return Err(Error::NotHermitian(dev));
    }
    let sym = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = CMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Number of values above `rel_tol * max(values)`; zero for an all-zero list.
pub fn numerical_rank(values: &[f64], rel_tol: f64) -> usize {
    let max = values.iter().copied().fold(0.0f64, f64::max);
    if max <= 0.0 {
        return 0;
    }
    values.iter().filter(|&&v| v > rel_tol * max).count()
}

/// Default relative rank threshold for a matrix of the given side.
pub fn default_rank_tolerance(side: usize) -> f64 {
    1e-8 * side.max(1) as f64
}

/// Kronecker product.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::random_haar_unitary;

    #[test]
    fn identity_spectrum() {
        let m = CMatrix::identity(4, 4) * Complex64::new(0.25, 0.0);
        let s = hermitian_spectrum(&m).unwrap();
        assert!(s.eigenvalues.iter().all(|&l| (l - 0.25).abs() < 1e-15));
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = CMatrix::identity(2, 2);
        m[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(matches!(hermitian_spectrum(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn reconstruction_and_order() {
        let u = random_haar_unitary(5, 3);
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(
            [0.1, 0.5, -0.2, 0.3, 0.0].iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        ));
        let h = &u * d * u.adjoint();
        let s = hermitian_spectrum(&h).unwrap();
        assert!(s.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        assert!((s.reconstruct() - &h).norm() < 1e-12);
        let gram = s.eigenvectors.adjoint() * &s.eigenvectors;
        assert!((gram - CMatrix::identity(5, 5)).norm() < 1e-12);
    }

    #[test]
    fn rank_helpers() {
        assert_eq!(numerical_rank(&[1.0, 1e-3, 1e-12], 1e-8), 2);
        assert_eq!(numerical_rank(&[0.0, 0.0], 1e-8), 0);
        assert_eq!(numerical_rank(&[], 1e-8), 0);
    }
}
