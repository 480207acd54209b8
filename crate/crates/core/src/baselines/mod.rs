//! Gaussian baselines: an EKF on `(θ, x, y)` and an EKF on SE(2).

pub mod ekf;
pub mod lgekf;
pub mod se2;

use nalgebra::{Matrix2, Matrix3, SymmetricEigen};

use crate::error::{Error, Result};
use crate::model::NoiseParams;

pub use ekf::{ekf_step, EkfBelief};
pub use lgekf::{lgekf_step, Se2Belief};
pub use se2::{right_jacobian, se2_exp, se2_log, Se2};

/// Eigenvalue floor applied after every covariance update.
pub const EIGEN_FLOOR: f64 = 1e-12;

/// A bearing/distance measurement of the landmark.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BearingRange {
    pub bearing: f64,
    pub range: f64,
}

/// Measurement covariance `diag(1/κ_b, σ_r²)`.
pub(crate) fn measurement_cov(n: &NoiseParams) -> Matrix2<f64> {
    Matrix2::new(1.0 / n.kappa_b, 0.0, 0.0, n.sigma_r2)
}

/// Symmetrizes and floors the spectrum at [`EIGEN_FLOOR`].
pub(crate) fn condition(p: Matrix3<f64>) -> Result<Matrix3<f64>> {
    let sym = (p + p.transpose()) * 0.5;
    if sym.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("covariance became non-finite".into()));
    }
    let eig = SymmetricEigen::new(sym);
    if eig.eigenvalues.iter().all(|l| *l >= EIGEN_FLOOR) {
        return Ok(sym);
    }
    let floored = eig.eigenvalues.map(|l| l.max(EIGEN_FLOOR));
    let q = eig.eigenvectors;
    let out = q * Matrix3::from_diagonal(&floored) * q.transpose();
    Ok((out + out.transpose()) * 0.5)
}

pub(crate) fn invert_innovation(s: &Matrix2<f64>) -> Result<Matrix2<f64>> {
    s.try_inverse()
        .filter(|inv| inv.iter().all(|v| v.is_finite()))
        .ok_or_else(|| Error::Numerical("singular innovation covariance".into()))
}
