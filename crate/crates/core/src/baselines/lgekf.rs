//! EKF on SE(2) with a right-multiplied algebra error `S = Ŝ·exp(ε)`,
//! `ε ~ N(0, P)` in `(θ, ρ_x, ρ_y)` coordinates.

use nalgebra::{Matrix2, Matrix2x3, Matrix3, Vector2, Vector3};

use super::se2::{right_jacobian, se2_exp, Se2};
use super::{condition, invert_innovation, measurement_cov, BearingRange};
use crate::circstats::wrap_angle;
use crate::error::{domain, Error, Result};
use crate::model::{Landmark, NoiseParams, OdometryInput};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Se2Belief {
    pub mean: Se2,
    pub cov: Matrix3<f64>,
}

impl Se2Belief {
    pub fn new(mean: Se2, cov: Matrix3<f64>) -> Result<Self> {
        Ok(Self {
            mean,
            cov: condition(cov)?,
        })
    }
}

/// Body twist `(ωΔt, vΔt, 0)` of one odometry step.
pub fn odometry_twist(u: &OdometryInput) -> Vector3<f64> {
    Vector3::new(u.omega * u.dt, u.v * u.dt, 0.0)
}

/// Landmark expressed in the body frame of `g`.
fn landmark_in_body(g: &Se2, lm: &Landmark) -> Vector2<f64> {
    g.rotation().transpose() * (Vector2::new(lm.x, lm.y) - g.translation())
}

/// Predicted `(bearing, range)` for a pose.
pub fn observation_model(g: &Se2, lm: &Landmark) -> Result<Vector2<f64>> {
    let q = landmark_in_body(g, lm);
    let r = q.norm();
    if !(r > 0.0) {
        return Err(Error::Geometry("LG-EKF estimate coincides with the landmark".into()));
    }
    Ok(Vector2::new(q.y.atan2(q.x), r))
}

/// `∂h(Ŝ·exp(ε))/∂ε` at `ε = 0`.
pub fn observation_jacobian(g: &Se2, lm: &Landmark) -> Result<Matrix2x3<f64>> {
    let q = landmark_in_body(g, lm);
    let r2 = q.norm_squared();
    if !(r2 > 0.0) {
        return Err(Error::Geometry("LG-EKF estimate coincides with the landmark".into()));
    }
    let r = r2.sqrt();
    let dh_dq = Matrix2::new(-q.y / r2, q.x / r2, q.x / r, q.y / r);
    // q(ε) ≈ q̂ + δθ·(q̂_y, -q̂_x) - ρ
    #[rustfmt::skip]
    let dq_de = Matrix2x3::new(
        q.y, -1.0, 0.0,
        -q.x, 0.0, -1.0,
    );
    Ok(dh_dq * dq_de)
}

pub fn lgekf_predict(b: &Se2Belief, u: &OdometryInput, n: &NoiseParams) -> Result<Se2Belief> {
    if !(u.dt > 0.0) {
        return domain("time step must be > 0");
    }
    let twist = odometry_twist(u);
    let step = se2_exp(&twist);
    let f = step.inverse().adjoint();
    let jr = right_jacobian(&twist);
    let q = Matrix3::from_diagonal(&Vector3::new(n.sigma_omega2, n.sigma_v2, 0.0)) * (u.dt * u.dt);
    Ok(Se2Belief {
        mean: b.mean.compose(&step),
        cov: condition(f * b.cov * f.transpose() + jr * q * jr.transpose())?,
    })
}

pub fn lgekf_update(b: &Se2Belief, z: &BearingRange, lm: &Landmark, n: &NoiseParams) -> Result<Se2Belief> {
    let h = observation_jacobian(&b.mean, lm)?;
    let pred = observation_model(&b.mean, lm)?;
    let innov = Vector2::new(wrap_angle(z.bearing - pred[0]), z.range - pred[1]);
    let r = measurement_cov(n);
    let s = h * b.cov * h.transpose() + r;
    let k = b.cov * h.transpose() * invert_innovation(&s)?;
    let delta = k * innov;
    let ikh = Matrix3::identity() - k * h;
    let cov = ikh * b.cov * ikh.transpose() + k * r * k.transpose();
    let jr = right_jacobian(&delta);
    Ok(Se2Belief {
        mean: b.mean.compose(&se2_exp(&delta)),
        cov: condition(jr * cov * jr.transpose())?,
    })
}

/// One group propagation followed by an optional bearing/distance update.
pub fn lgekf_step(
    b: &Se2Belief,
    u: &OdometryInput,
    obs: Option<&BearingRange>,
    lm: &Landmark,
    n: &NoiseParams,
) -> Result<Se2Belief> {
    let pred = lgekf_predict(b, u, n)?;
    match obs {
        Some(z) => lgekf_update(&pred, z, lm, n),
        None => Ok(pred),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::ekf::{ekf_predict, ekf_update, EkfBelief};
    use crate::baselines::se2::se2_log;

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
    fn zero_noise_mean_follows_exact_arc() {
        let n = NoiseParams {
            sigma_omega2: 0.0,
            sigma_v2: 0.0,
            ..noise()
        };
        let u = OdometryInput::new(0.2, 0.1, 0.02).unwrap();
        let mut b = Se2Belief::new(Se2::identity(), Matrix3::identity() * 1e-12).unwrap();
        let steps = 1000;
        for _ in 0..steps {
            b = lgekf_predict(&b, &u, &n).unwrap();
        }
        // circle of radius v/ω = 0.5 centred at (0, 0.5)
        let th = 0.2 * 0.02 * steps as f64;
        let (x, y) = (0.5 * th.sin(), 0.5 * (1.0 - th.cos()));
        let (bt, bx, by) = b.mean.pose();
        assert!((bx - x).abs() < 1e-10 && (by - y).abs() < 1e-10);
        assert!((bt - wrap_angle(th)).abs() < 1e-10);
    }

    #[test]
    fn static_propagation_adds_translation_noise() {
        let n = NoiseParams {
            sigma_omega2: 0.0,
            ..noise()
        };
        let u = OdometryInput::new(0.0, 0.0, 0.02).unwrap();
        let p = Matrix3::new(0.02, 0.001, 0.0, 0.001, 0.03, 0.002, 0.0, 0.002, 0.01);
        let b = Se2Belief::new(Se2::from_pose(0.4, 1.0, 2.0), p).unwrap();
        let out = lgekf_predict(&b, &u, &n).unwrap();
        let expect = p + Matrix3::from_diagonal(&Vector3::new(0.0, 1e-4 * 4e-4, 0.0));
        assert!((out.cov - expect).abs().max() < 1e-15);
    }

    #[test]
    fn observation_jacobian_matches_finite_differences() {
        let lm = Landmark::new(2.0, 3.0);
        let h = 1e-6;
        for g in [
            Se2::from_pose(0.3, 0.2, -0.4),
            Se2::from_pose(-2.8, 1.0, 1.0),
            Se2::from_pose(1.9, -3.0, 0.5),
        ] {
            let jac = observation_jacobian(&g, &lm).unwrap();
            for k in 0..3 {
                let mut d = Vector3::zeros();
                d[k] = h;
                let mut dz = observation_model(&g.compose(&se2_exp(&d)), &lm).unwrap()
                    - observation_model(&g.compose(&se2_exp(&-d)), &lm).unwrap();
                dz[0] = wrap_angle(dz[0]);
                assert!((dz / (2.0 * h) - jac.column(k)).abs().max() < 1e-6);
            }
        }
    }

    #[test]
    fn covariance_stays_positive_definite() {
        let n = noise();
        let lm = Landmark::new(2.0, 3.0);
        let u = OdometryInput::new(0.2, 0.1, 0.02).unwrap();
        let mut b = Se2Belief::new(Se2::identity(), Matrix3::identity() * 0.01).unwrap();
        for k in 1..=1500 {
            let z = (k % 20 == 0).then(|| {
                let pred = observation_model(&b.mean, &lm).unwrap();
                BearingRange {
                    bearing: pred[0] + 0.01,
                    range: pred[1] - 0.005,
                }
            });
            b = lgekf_step(&b, &u, z.as_ref(), &lm, &n).unwrap();
            let eig = b.cov.symmetric_eigenvalues();
            assert!(eig.min() > 0.0);
            assert_eq!(b.cov, b.cov.transpose());
            assert!(b.mean.orthogonality_residual() < 1e-9);
        }
    }

    #[test]
    fn agrees_with_flat_ekf_without_rotation() {
        let n = NoiseParams {
            sigma_omega2: 1e-6,
            sigma_v2: 1e-8,
            kappa_b: 1e6,
            sigma_r2: 1e-8,
            ..noise()
        };
        let lm = Landmark::new(2.0, 3.0);
        let u = OdometryInput::new(0.0, 0.1, 0.02).unwrap();
        let p0 = Matrix3::identity() * 1e-6;
        let mut e = EkfBelief::new(0.0, 0.0, 0.0, p0).unwrap();
        let mut g = Se2Belief::new(Se2::identity(), p0).unwrap();
        for k in 1..=100 {
            e = ekf_predict(&e, &u, &n).unwrap();
            g = lgekf_predict(&g, &u, &n).unwrap();
            if k % 20 == 0 {
                let x = 0.002 * k as f64;
                let z = BearingRange {
                    bearing: 3f64.atan2(2.0 - x) + 1e-4,
                    range: (2.0 - x).hypot(3.0) - 1e-4,
                };
                e = ekf_update(&e, &z, &lm, &n).unwrap();
                g = lgekf_update(&g, &z, &lm, &n).unwrap();
            }
            let (gt, gx, gy) = g.mean.pose();
            assert!((e.mean - Vector3::new(gt, gx, gy)).abs().max() < 1e-6, "step {k}");
            assert!((e.cov - g.cov).abs().max() < 1e-6, "step {k}");
        }
        assert!(se2_log(&g.mean)[0].abs() < 1e-3);
    }
}
