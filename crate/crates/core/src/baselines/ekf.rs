//! Extended Kalman filter on the flat state `(θ, x, y)`.

use nalgebra::{Matrix2, Matrix2x3, Matrix3, Matrix3x2, Vector2, Vector3};

use super::{condition, invert_innovation, measurement_cov, BearingRange};
use crate::circstats::wrap_angle;
use crate::error::{domain, Error, Result};
use crate::model::{Landmark, NoiseParams, OdometryInput};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EkfBelief {
    /// `(θ, x, y)`.
    pub mean: Vector3<f64>,
    pub cov: Matrix3<f64>,
}

impl EkfBelief {
    pub fn new(theta: f64, x: f64, y: f64, cov: Matrix3<f64>) -> Result<Self> {
        Ok(Self {
            mean: Vector3::new(wrap_angle(theta), x, y),
            cov: condition(cov)?,
        })
    }
}

/// Unicycle mean dynamics, forward-Euler in the pre-step heading.
pub fn motion_model(mean: &Vector3<f64>, u: &OdometryInput) -> Vector3<f64> {
    let (s, c) = mean[0].sin_cos();
    Vector3::new(
        wrap_angle(mean[0] + u.omega * u.dt),
        mean[1] + u.v * c * u.dt,
        mean[2] + u.v * s * u.dt,
    )
}

/// `∂f/∂(θ, x, y)`.
#[rustfmt::skip]
pub fn motion_jacobian(mean: &Vector3<f64>, u: &OdometryInput) -> Matrix3<f64> {
    let (s, c) = mean[0].sin_cos();
    Matrix3::new(
        1.0, 0.0, 0.0,
        -u.v * s * u.dt, 1.0, 0.0,
        u.v * c * u.dt, 0.0, 1.0,
    )
}

/// `∂f/∂(n_ω, n_v)`.
pub fn noise_jacobian(mean: &Vector3<f64>, u: &OdometryInput) -> Matrix3x2<f64> {
    let (s, c) = mean[0].sin_cos();
    Matrix3x2::new(u.dt, 0.0, 0.0, c * u.dt, 0.0, s * u.dt)
}

/// Predicted `(bearing, range)` of the landmark.
pub fn observation_model(mean: &Vector3<f64>, lm: &Landmark) -> Result<Vector2<f64>> {
    let (dx, dy) = (lm.x - mean[1], lm.y - mean[2]);
    let r = dx.hypot(dy);
    if !(r > 0.0) {
        return Err(Error::Geometry("EKF estimate coincides with the landmark".into()));
    }
    Ok(Vector2::new(wrap_angle(dy.atan2(dx) - mean[0]), r))
}

#[rustfmt::skip]
pub fn observation_jacobian(mean: &Vector3<f64>, lm: &Landmark) -> Result<Matrix2x3<f64>> {
    let (dx, dy) = (lm.x - mean[1], lm.y - mean[2]);
    let q = dx * dx + dy * dy;
    if !(q > 0.0) {
        return Err(Error::Geometry("EKF estimate coincides with the landmark".into()));
    }
    let r = q.sqrt();
    Ok(Matrix2x3::new(
        -1.0, dy / q, -dx / q,
        0.0, -dx / r, -dy / r,
    ))
}

pub fn ekf_predict(b: &EkfBelief, u: &OdometryInput, n: &NoiseParams) -> Result<EkfBelief> {
    if !(u.dt > 0.0) {
        return domain("time step must be > 0");
    }
    let f = motion_jacobian(&b.mean, u);
    let g = noise_jacobian(&b.mean, u);
    let q = g * Matrix2::new(n.sigma_omega2, 0.0, 0.0, n.sigma_v2) * g.transpose();
    Ok(EkfBelief {
        mean: motion_model(&b.mean, u),
        cov: condition(f * b.cov * f.transpose() + q)?,
    })
}

pub fn ekf_update(b: &EkfBelief, z: &BearingRange, lm: &Landmark, n: &NoiseParams) -> Result<EkfBelief> {
    let h = observation_jacobian(&b.mean, lm)?;
    let pred = observation_model(&b.mean, lm)?;
    let innov = Vector2::new(wrap_angle(z.bearing - pred[0]), z.range - pred[1]);
    let r = measurement_cov(n);
    let s = h * b.cov * h.transpose() + r;
    let k = b.cov * h.transpose() * invert_innovation(&s)?;
    let mut mean = b.mean + k * innov;
    mean[0] = wrap_angle(mean[0]);
    let ikh = Matrix3::identity() - k * h;
    let cov = ikh * b.cov * ikh.transpose() + k * r * k.transpose();
    Ok(EkfBelief {
        mean,
        cov: condition(cov)?,
    })
}

/// One predict step followed by an optional bearing/distance update.
pub fn ekf_step(
    b: &EkfBelief,
    u: &OdometryInput,
    obs: Option<&BearingRange>,
    lm: &Landmark,
    n: &NoiseParams,
) -> Result<EkfBelief> {
    let pred = ekf_predict(b, u, n)?;
    match obs {
        Some(z) => ekf_update(&pred, z, lm, n),
        None => Ok(pred),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn noise() -> NoiseParams {
        NoiseParams {
            sigma_omega2: 10.0,
            sigma_v2: 1e-4,
            kappa_nu_theta: 1.0,
            sigma2_ox: 1.0,
            sigma2_oy: 1.0,
            kappa_b: 500.0,
            sigma_r2: 1e-4,
        }
    }

    #[test]
    fn zero_noise_prediction_is_exact_dynamics() {
        let n = NoiseParams {
            sigma_omega2: 0.0,
            sigma_v2: 0.0,
            ..noise()
        };
        let u = OdometryInput::new(0.2, 0.1, 0.02).unwrap();
        let mut b = EkfBelief::new(0.0, 0.0, 0.0, Matrix3::identity() * 1e-12).unwrap();
        let (mut th, mut x, mut y) = (0.0f64, 0.0f64, 0.0f64);
        for _ in 0..200 {
            b = ekf_predict(&b, &u, &n).unwrap();
            x += 0.1 * th.cos() * 0.02;
            y += 0.1 * th.sin() * 0.02;
            th = wrap_angle(th + 0.2 * 0.02);
        }
        assert!((b.mean - Vector3::new(th, x, y)).abs().max() < 1e-12);
    }

    #[test]
    fn jacobians_match_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let lm = Landmark::new(2.0, 3.0);
        let u = OdometryInput::new(0.2, 0.1, 0.02).unwrap();
        let h = 1e-6;
        for _ in 0..100 {
            let m = Vector3::new(
                rng.random_range(-3.0..3.0),
                rng.random_range(-1.5..1.5),
                rng.random_range(-1.5..1.5),
            );
            let f = motion_jacobian(&m, &u);
            let hj = observation_jacobian(&m, &lm).unwrap();
            for k in 0..3 {
                let mut d = Vector3::zeros();
                d[k] = h;
                let mut df = motion_model(&(m + d), &u) - motion_model(&(m - d), &u);
                df[0] = wrap_angle(df[0]);
                assert!((df / (2.0 * h) - f.column(k)).abs().max() < 1e-6);
                let mut dz = observation_model(&(m + d), &lm).unwrap() - observation_model(&(m - d), &lm).unwrap();
                dz[0] = wrap_angle(dz[0]);
                assert!((dz / (2.0 * h) - hj.column(k)).abs().max() < 1e-6);
            }
        }
    }

    #[test]
    fn update_pulls_toward_measurement() {
        let lm = Landmark::new(2.0, 3.0);
        let b = EkfBelief::new(0.0, 0.0, 0.0, Matrix3::identity() * 0.01).unwrap();
        let z = BearingRange {
            bearing: 3f64.atan2(2.0),
            range: 13f64.sqrt() - 0.05,
        };
        let out = ekf_update(&b, &z, &lm, &noise()).unwrap();
        // range too short: estimate moves toward the landmark
        assert!(out.mean[1] > 0.0 && out.mean[2] > 0.0);
        assert!(out.cov.trace() < b.cov.trace());
    }

    #[test]
    fn geometry_error_at_landmark() {
        let b = EkfBelief::new(0.0, 2.0, 3.0, Matrix3::identity() * 0.01).unwrap();
        let z = BearingRange {
            bearing: 0.0,
            range: 1.0,
        };
        assert!(matches!(
            ekf_update(&b, &z, &Landmark::new(2.0, 3.0), &noise()),
            Err(Error::Geometry(_))
        ));
    }
}
