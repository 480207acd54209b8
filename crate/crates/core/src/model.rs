//! Inputs and noise descriptions shared by every localizer.

use crate::error::{domain, Result};

/// Odometry for one time step of the unicycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdometryInput {
    /// Angular velocity, rad/s.
    pub omega: f64,
    /// Forward velocity, m/s.
    pub v: f64,
    /// Step length, s.
    pub dt: f64,
}

impl OdometryInput {
    pub fn new(omega: f64, v: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !omega.is_finite() || !v.is_finite() {
            return domain(format!(
                "odometry needs dt > 0 and finite rates, got ({omega}, {v}, {dt})"
            ));
        }
        Ok(Self { omega, v, dt })
    }
}

/// Noise parameters of the motion and sensor models.
///
/// Variances are in SI units; concentrations are dimensionless.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    /// Angular-velocity noise variance, (rad/s)².
    pub sigma_omega2: f64,
    /// Forward-velocity noise variance, (m/s)².
    pub sigma_v2: f64,
    /// Concentration of a direct heading measurement.
    pub kappa_nu_theta: f64,
    /// Direct x measurement variance, m².
    pub sigma2_ox: f64,
    /// Direct y measurement variance, m².
    pub sigma2_oy: f64,
    /// Bearing noise concentration.
    pub kappa_b: f64,
    /// Range noise variance, m².
    pub sigma_r2: f64,
}

impl NoiseParams {
    /// Concentration of the von Mises surrogate of the per-step heading
    /// noise, `1/(σ_ω²Δt²)`; infinite when the noise vanishes.
    pub fn heading_kappa_w(&self, dt: f64) -> f64 {
        let var = self.sigma_omega2 * dt * dt;
        if var > 0.0 {
            1.0 / var
        } else {
            f64::INFINITY
        }
    }

    /// Variance bound `(σ_v² + v²)` on the projected forward speed.
    pub fn speed_variance_bound(&self, v: f64) -> f64 {
        self.sigma_v2 + v * v
    }

    pub fn validate(&self) -> Result<()> {
        let nonneg = [
            ("sigma_omega2", self.sigma_omega2),
            ("sigma_v2", self.sigma_v2),
            ("sigma_r2", self.sigma_r2),
        ];
        for (name, v) in nonneg {
            if !(v >= 0.0) || !v.is_finite() {
                return domain(format!("{name} must be finite and >= 0, got {v}"));
            }
        }
        let pos = [
            ("kappa_nu_theta", self.kappa_nu_theta),
            ("sigma2_ox", self.sigma2_ox),
            ("sigma2_oy", self.sigma2_oy),
            ("kappa_b", self.kappa_b),
        ];
        for (name, v) in pos {
            if !(v > 0.0) || !v.is_finite() {
                return domain(format!("{name} must be finite and > 0, got {v}"));
            }
        }
        Ok(())
    }
}

/// A landmark at a known position, metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Landmark {
    pub x: f64,
    pub y: f64,
}

impl Landmark {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// How the concentration of the equivalent heading measurement is formed
/// from the position-derived concentration `κ₁` and the bearing noise `κ_b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HeadingRule {
    /// `A⁻¹(A(κ₁)·A(κ_b))`: the law of a sum of two independent von Mises
    /// errors.
    #[default]
    Convolution,
    /// `A(κ₁)·A(κ_b)` taken literally as a concentration. Only for comparison.
    AProduct,
}
