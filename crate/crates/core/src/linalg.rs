//! Small dense helpers shared by the statistics and portfolio modules.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Ratio `λ_min / λ_max` at or below which a covariance matrix is treated as singular.
pub(crate) const SINGULAR_RATIO: f64 = 1e-10;

/// Eigendecomposition of a symmetric covariance, rejecting (near-)singular input.
pub(crate) fn well_conditioned_eigen(cov: &DMatrix<f64>) -> Result<SymmetricEigen<f64, nalgebra::Dyn>> {
    let eig = SymmetricEigen::new(cov.clone());
    let min = eig.eigenvalues.min();
    let max = eig.eigenvalues.max();
    if !(max > 0.0) || min <= SINGULAR_RATIO * max {
        return Err(Error::SingularCovariance {
            min_eigenvalue: min,
            max_eigenvalue: max,
        });
    }
    Ok(eig)
}

/// Symmetric inverse square root `Σ^{-1/2} = V Λ^{-1/2} Vᵀ`.
pub(crate) fn inverse_sqrt(cov: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = well_conditioned_eigen(cov)?;
    let scaled = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()));
    let v = &eig.eigenvectors;
    let root = v * scaled * v.transpose();
    // symmetrize away rounding
    Ok((&root + root.transpose()) * 0.5)
}

/// Neumaier-compensated sum in iteration order.
pub(crate) fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut compensation = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            compensation += (sum - t) + v;
        } else {
            compensation += (v - t) + sum;
        }
        sum = t;
    }
    sum + compensation
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        assert_eq!(compensated_sum([1.0, 1e100, 1.0, -1e100]), 2.0);
        assert_eq!(compensated_sum(std::iter::repeat_n(1e-5, 100_000)), 1.0);
    }
}
