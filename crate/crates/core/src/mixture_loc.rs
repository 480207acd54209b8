//! Localization with a von Mises heading and independent Gaussian x/y.
//!
//! The heading runs the von Mises filter, each position axis runs a scalar
//! Kalman filter, and the forward motion `(v + n_v)·cos θ̂` is replaced by a
//! Gaussian with its exact mean `v·A(κ)·cos θ̄` and the variance bound
//! `σ_v² + v²`.
//!
//! Bearing/distance measurements are turned into equivalent direct
//! measurements. The equivalent heading is correlated with the current
//! heading belief, so it *replaces* that belief instead of being fused with it.

use nalgebra::Matrix2;

use crate::circstats::{a_func, convolved_kappa, wrap_angle, VonMises};
use crate::error::{domain, Error, Result};
use crate::scalar_filters::{kf_obsv, kf_time, vmf_obsv, vmf_time, KfState};

pub use crate::model::{HeadingRule, Landmark, NoiseParams, OdometryInput};

/// Split used by [`pd_domination`] for the `2σ²I₂` nominal covariance.
pub const NOMINAL_SPLIT: f64 = 0.5;

/// Heading and position belief.
///
/// Both axes always carry the same variance, since they receive identical
/// variance updates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureBelief {
    pub heading: VonMises,
    pub x: KfState,
    pub y: KfState,
}

impl MixtureBelief {
    pub fn new(heading: VonMises, x: f64, y: f64, var: f64) -> Result<Self> {
        Ok(Self {
            heading,
            x: KfState::new(x, var)?,
            y: KfState::new(y, var)?,
        })
    }

    pub fn position(&self) -> (f64, f64) {
        (self.x.mean, self.y.mean)
    }
}

pub fn time_update(b: &MixtureBelief, u: &OdometryInput, n: &NoiseParams) -> Result<MixtureBelief> {
    if !(u.dt > 0.0) {
        return domain("time step must be > 0");
    }
    let heading = vmf_time(&b.heading, u.omega * u.dt, n.heading_kappa_w(u.dt))?;
    let (s, c) = b.heading.mu().sin_cos();
    let advance = u.v * u.dt * a_func(b.heading.kappa())?;
    let var_w = n.speed_variance_bound(u.v) * u.dt * u.dt;
    Ok(MixtureBelief {
        heading,
        x: kf_time(&b.x, advance * c, var_w)?,
        y: kf_time(&b.y, advance * s, var_w)?,
    })
}

pub fn obsv_direct(b: &MixtureBelief, o_theta: f64, o_x: f64, o_y: f64, n: &NoiseParams) -> Result<MixtureBelief> {
    Ok(MixtureBelief {
        heading: vmf_obsv(&b.heading, o_theta, n.kappa_nu_theta)?,
        x: kf_obsv(&b.x, o_x, n.sigma2_ox)?,
        y: kf_obsv(&b.y, o_y, n.sigma2_oy)?,
    })
}

/// Equivalent heading measurement from the landmark geometry, using the
/// default [`HeadingRule::Convolution`].
pub fn equivalent_orientation(
    b: &MixtureBelief,
    lm: &Landmark,
    s_b: f64,
    s_r: f64,
    n: &NoiseParams,
) -> Result<VonMises> {
    equivalent_heading(
        b.position(),
        b.x.var.max(b.y.var),
        lm,
        s_b,
        s_r,
        n.kappa_b,
        HeadingRule::Convolution,
    )
}

pub fn equivalent_orientation_with(
    b: &MixtureBelief,
    lm: &Landmark,
    s_b: f64,
    s_r: f64,
    n: &NoiseParams,
    rule: HeadingRule,
) -> Result<VonMises> {
    equivalent_heading(b.position(), b.x.var.max(b.y.var), lm, s_b, s_r, n.kappa_b, rule)
}

/// `vM(atan2(y_l - ȳ, x_l - x̄) - s_b, κ)` where `κ` combines
/// `κ₁ = r̄·s_r / (2σ²)` with the bearing noise.
pub(crate) fn equivalent_heading(
    (x, y): (f64, f64),
    var: f64,
    lm: &Landmark,
    s_b: f64,
    s_r: f64,
    kappa_b: f64,
    rule: HeadingRule,
) -> Result<VonMises> {
    if !(s_r > 0.0) {
        return domain(format!("measured distance must be > 0, got {s_r}"));
    }
    if !(var > 0.0) {
        return domain(format!("position variance must be > 0, got {var}"));
    }
    let (dx, dy) = (lm.x - x, lm.y - y);
    let r_bar = dx.hypot(dy);
    if !(r_bar > 0.0) {
        return Err(Error::Geometry("position estimate coincides with the landmark".into()));
    }
    let kappa_pos = r_bar * s_r / (2.0 * var);
    let kappa = match rule {
        HeadingRule::Convolution => convolved_kappa(kappa_pos, kappa_b),
        HeadingRule::AProduct => a_func(kappa_pos)? * a_func(kappa_b)?,
    };
    VonMises::new(wrap_angle(dy.atan2(dx) - s_b), kappa)
}

/// Equivalent Cartesian position of the agent,
/// `l - s_r·A(κ)·A(κ_b)·(cos, sin)(θ̄ + s_b)`, with its variance bound
/// `σ_r² + s_r²`.
pub(crate) fn equivalent_position(
    heading: &VonMises,
    lm: &Landmark,
    s_b: f64,
    s_r: f64,
    n: &NoiseParams,
) -> Result<((f64, f64), f64)> {
    let shrink = a_func(heading.kappa())? * a_func(n.kappa_b)?;
    let (s, c) = (heading.mu() + s_b).sin_cos();
    let ox = lm.x - s_r * shrink * c;
    let oy = lm.y - s_r * shrink * s;
    Ok(((ox, oy), n.sigma_r2 + s_r * s_r))
}

pub fn obsv_bearing_distance(
    b: &MixtureBelief,
    lm: &Landmark,
    s_b: f64,
    s_r: f64,
    n: &NoiseParams,
) -> Result<MixtureBelief> {
    obsv_bearing_distance_with(b, lm, s_b, s_r, n, HeadingRule::Convolution)
}

/// Bearing/distance update. Position observations are built from the prior
/// heading; the heading is then replaced by the equivalent measurement.
pub fn obsv_bearing_distance_with(
    b: &MixtureBelief,
    lm: &Landmark,
    s_b: f64,
    s_r: f64,
    n: &NoiseParams,
    rule: HeadingRule,
) -> Result<MixtureBelief> {
    let heading = equivalent_orientation_with(b, lm, s_b, s_r, n, rule)?;
    let ((ox, oy), var_o) = equivalent_position(&b.heading, lm, s_b, s_r, n)?;
    Ok(MixtureBelief {
        heading,
        x: kf_obsv(&b.x, ox, var_o)?,
        y: kf_obsv(&b.y, oy, var_o)?,
    })
}

/// Block-diagonal upper bound of a symmetric positive-definite matrix:
/// `P' = diag(P₀₀/c, P₁₁/(1-c))` satisfies `P' - P > 0` for any `c ∈ (0, 1)`.
pub fn pd_domination(p: &Matrix2<f64>, c: f64) -> Result<Matrix2<f64>> {
    if !(c > 0.0 && c < 1.0) {
        return domain(format!("split must lie in (0, 1), got {c}"));
    }
    let asym = (p[(0, 1)] - p[(1, 0)]).abs();
    let scale = p[(0, 0)].abs().max(p[(1, 1)].abs());
    if asym > 1e-12 * scale.max(1.0) || p.iter().any(|v| !v.is_finite()) {
        return domain("matrix is not symmetric");
    }
    if !(p[(0, 0)] > 0.0) || !(p.determinant() > 0.0) {
        return domain("matrix is not positive definite");
    }
    Ok(Matrix2::new(p[(0, 0)] / c, 0.0, 0.0, p[(1, 1)] / (1.0 - c)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circstats::a_inv;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn reference_noise() -> NoiseParams {
        NoiseParams {
            sigma_omega2: 10.0,
            sigma_v2: 1e-4,
            kappa_nu_theta: 2.0,
            sigma2_ox: 1.0,
            sigma2_oy: 1.0,
            kappa_b: 500.0,
            sigma_r2: 1e-4,
        }
    }

    fn belief(theta: f64, kappa: f64, x: f64, y: f64, var: f64) -> MixtureBelief {
        MixtureBelief::new(VonMises::new(theta, kappa).unwrap(), x, y, var).unwrap()
    }

    #[test]
    fn time_update_near_deterministic_heading() {
        let n = NoiseParams {
            sigma_v2: 0.0,
            ..reference_noise()
        };
        let u = OdometryInput::new(0.0, 0.1, 0.02).unwrap();
        let b = belief(0.0, 1e10, 0.0, 0.0, 0.01);
        let out = time_update(&b, &u, &n).unwrap();
        assert!((out.x.mean - 0.002).abs() < 1e-12);
        assert!((out.x.var - (0.01 + 0.01 * 4e-4)).abs() < 1e-16);
        assert_eq!(out.y.mean, 0.0);
        assert_eq!(out.x.var, out.y.var);
    }

    #[test]
    fn time_update_scales_by_resultant_length() {
        let u = OdometryInput::new(0.2, 0.1, 0.02).unwrap();
        let b = belief(FRAC_PI_4, 250.0, 0.0, 0.0, 0.01);
        let out = time_update(&b, &u, &reference_noise()).unwrap();
        // A(250) = 0.99799799194958 (mpmath)
        let expect = 0.002 * 0.997_997_991_949_58 * FRAC_PI_4.cos();
        assert!((out.x.mean - expect).abs() < 1e-15);
        assert!((out.y.mean - expect).abs() < 1e-15);
        assert!((out.heading.mu() - (FRAC_PI_4 + 0.004)).abs() < 1e-15);
        assert!(out.heading.kappa() < 250.0);
    }

    #[test]
    fn direct_observation_cases() {
        let n = reference_noise();
        let b = belief(0.3, 5.0, 1.0, -1.0, 0.2);
        let out = obsv_direct(&b, 0.3, 1.0, -1.0, &n).unwrap();
        assert!((out.heading.mu() - 0.3).abs() < 1e-15 && out.heading.kappa() > 5.0);
        assert_eq!(out.position(), (1.0, -1.0));
        assert!(out.x.var < 0.2 && out.x.var == out.y.var);

        let weak = NoiseParams {
            kappa_nu_theta: 1e-9,
            ..n
        };
        let out = obsv_direct(&b, 2.0, 1.0, -1.0, &weak).unwrap();
        assert!((out.heading.mu() - 0.3).abs() < 1e-6);

        let b = belief(0.0, 2.0, 0.0, 0.0, 1.0);
        let out = obsv_direct(&b, FRAC_PI_2, 1.0, 0.0, &n).unwrap();
        assert!((out.heading.mu() - FRAC_PI_4).abs() < 1e-15);
        assert!((out.heading.kappa() - 2.0 * 2f64.sqrt()).abs() < 1e-14);
        assert_eq!((out.x.mean, out.x.var), (0.5, 0.5));
    }

    #[test]
    fn equivalent_orientation_cases() {
        let n = reference_noise();
        let b = belief(1.0, 50.0, 0.0, 0.0, 0.02);
        let s_r = 13f64.sqrt();
        let eq = equivalent_orientation(&b, &Landmark::new(2.0, 3.0), 0.0, s_r, &n).unwrap();
        assert!((eq.mu() - 3f64.atan2(2.0)).abs() < 1e-15);
        // κ₁ = 13 / 0.04 = 325; a_inv(A(325)A(500)) = 197.209197076235 (mpmath)
        assert!((eq.kappa() - 197.209_197_076_235).abs() < 1e-7);
        let via_a = a_inv(a_func(325.0).unwrap() * a_func(500.0).unwrap()).unwrap();
        assert!((eq.kappa() - via_a).abs() < 1e-7);
        assert!(eq.kappa() < 325.0);

        let literal =
            equivalent_orientation_with(&b, &Landmark::new(2.0, 3.0), 0.0, s_r, &n, HeadingRule::AProduct)
                .unwrap();
        assert!(literal.kappa() < 1.0);
    }

    #[test]
    fn equivalent_orientation_noiseless_limit() {
        let n = NoiseParams {
            kappa_b: 1e12,
            ..reference_noise()
        };
        let b = belief(0.0, 50.0, 0.5, 0.5, 1e-12);
        let eq = equivalent_orientation(&b, &Landmark::new(2.0, 3.0), 0.25, 1.0, &n).unwrap();
        assert!((eq.mu() - (2.5f64.atan2(1.5) - 0.25)).abs() < 1e-15);
        assert!(eq.kappa() > 1e11);
    }

    #[test]
    fn geometry_error_at_landmark() {
        let b = belief(0.0, 5.0, 2.0, 3.0, 0.01);
        let err = obsv_bearing_distance(&b, &Landmark::new(2.0, 3.0), 0.0, 1.0, &reference_noise()).unwrap_err();
        assert!(matches!(err, Error::Geometry(_)));
    }

    #[test]
    fn bearing_update_from_origin() {
        // pose (0,0,0), landmark (2,3), exact measurements, reference noise
        let n = reference_noise();
        let lm = Landmark::new(2.0, 3.0);
        let b = belief(0.0, 100.0, 0.0, 0.0, 0.01);
        let s_b = 3f64.atan2(2.0);
        let s_r = 13f64.sqrt();
        let out = obsv_bearing_distance(&b, &lm, s_b, s_r, &n).unwrap();

        // scripted arithmetic
        let shrink = a_func(100.0).unwrap() * a_func(500.0).unwrap();
        let ox = 2.0 - s_r * shrink * s_b.cos();
        let oy = 3.0 - s_r * shrink * s_b.sin();
        let var_o = 1e-4 + 13.0;
        let k = 0.01 / (0.01 + var_o);
        assert!((out.x.mean - k * ox).abs() < 1e-15);
        assert!((out.y.mean - k * oy).abs() < 1e-15);
        assert!((out.x.var - 1.0 / (100.0 + 1.0 / var_o)).abs() < 1e-16);
        assert!(out.heading.mu().abs() < 1e-15);
        let k1 = 13f64.sqrt() * s_r / 0.02;
        let ke = a_inv(a_func(k1).unwrap() * a_func(500.0).unwrap()).unwrap();
        assert!((out.heading.kappa() - ke).abs() < 1e-6);
    }

    #[test]
    fn heading_is_replaced_not_fused() {
        let n = reference_noise();
        let lm = Landmark::new(2.0, 3.0);
        let a = belief(0.1, 40.0, 0.2, -0.1, 0.01);
        let b = belief(-2.0, 40.0, 0.2, -0.1, 0.01);
        let ha = obsv_bearing_distance(&a, &lm, 0.8, 3.4, &n).unwrap().heading;
        let hb = obsv_bearing_distance(&b, &lm, 0.8, 3.4, &n).unwrap().heading;
        assert_eq!(ha, hb);
        assert!((ha.mu() - wrap_angle(3.1f64.atan2(1.8) - 0.8)).abs() < 1e-15);
    }

    #[test]
    fn zero_noise_position_observation_is_exact() {
        let n = NoiseParams {
            kappa_b: 1e14,
            sigma_r2: 0.0,
            ..reference_noise()
        };
        let lm = Landmark::new(2.0, 3.0);
        let (tx, ty, tt): (f64, f64, f64) = (0.4, -0.7, 0.9);
        let s_b = wrap_angle((3.0 - ty).atan2(2.0 - tx) - tt);
        let s_r = (2.0 - tx).hypot(3.0 - ty);
        let heading = VonMises::new(tt, 1e14).unwrap();
        let ((ox, oy), _) = equivalent_position(&heading, &lm, s_b, s_r, &n).unwrap();
        assert!((ox - tx).abs() < 1e-12 && (oy - ty).abs() < 1e-12);
    }

    #[test]
    fn pd_domination_cases() {
        let out = pd_domination(&Matrix2::identity(), 0.5).unwrap();
        assert_eq!(out, Matrix2::identity() * 2.0);
        let p = Matrix2::new(1.0, 0.9, 0.9, 1.0);
        let diff = pd_domination(&p, 0.5).unwrap() - p;
        let eig = diff.symmetric_eigenvalues();
        assert!((eig.min() - 0.1).abs() < 1e-12);
        assert!(pd_domination(&Matrix2::new(1.0, 2.0, 2.0, 1.0), 0.5).is_err());
        assert!(pd_domination(&Matrix2::new(1.0, 0.5, 0.0, 1.0), 0.5).is_err());
        assert!(pd_domination(&Matrix2::identity(), 1.0).is_err());
    }
}
