//! von Mises distribution core.
//!
//! Angles are canonicalized to `[-π, π)`. A concentration of zero is the
//! circular uniform law.

pub mod bessel;
mod sample;

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};

pub use bessel::{a_complement, a_deriv, a_func, a_inv, bessel_ratio, ln_i0};

/// Fusions whose resultant is shorter than this have no defined mean.
pub const DEGENERATE_RESULTANT: f64 = 1e-12;

/// Maps any finite angle into `[-π, π)`.
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut w = a - two_pi * ((a + PI) / two_pi).floor();
    if w >= PI {
        w -= two_pi;
    }
    if w < -PI {
        w += two_pi;
    }
    w
}

/// Signed difference `a - b` wrapped into `[-π, π)`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    wrap_angle(a - b)
}

/// Circular belief `vM(μ, κ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VonMises {
    mu: f64,
    kappa: f64,
}

impl VonMises {
    /// Builds `vM(mu, kappa)`; `mu` is wrapped.
    pub fn new(mu: f64, kappa: f64) -> Result<Self> {
        if !mu.is_finite() {
            return domain(format!("mean direction must be finite, got {mu}"));
        }
        if !kappa.is_finite() || kappa < 0.0 {
            return domain(format!("concentration must be finite and >= 0, got {kappa}"));
        }
        Ok(Self {
            mu: wrap_angle(mu),
            kappa,
        })
    }

    pub fn uniform() -> Self {
        Self { mu: 0.0, kappa: 0.0 }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// `A(κ)`, the length of the first trigonometric moment.
    pub fn resultant_length(&self) -> f64 {
        bessel::a_raw(self.kappa)
    }

    /// Normalized density at `theta`.
    pub fn pdf(&self, theta: f64) -> f64 {
        self.ln_pdf(theta).exp()
    }

    pub fn ln_pdf(&self, theta: f64) -> f64 {
        let ln_norm = (2.0 * PI).ln() + ln_i0(self.kappa).expect("valid kappa");
        self.kappa * (theta - self.mu).cos() - ln_norm
    }

    pub fn trig_moment(&self, n: u32) -> Result<TrigMoment> {
        trig_moment(self, n)
    }
}

/// A complex trigonometric moment `E[exp(inθ)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigMoment {
    pub re: f64,
    pub im: f64,
}

impl TrigMoment {
    pub fn from_polar(modulus: f64, arg: f64) -> Self {
        Self {
            re: modulus * arg.cos(),
            im: modulus * arg.sin(),
        }
    }

    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn arg(&self) -> f64 {
        self.im.atan2(self.re)
    }

    pub fn mul(&self, other: &TrigMoment) -> TrigMoment {
        TrigMoment {
            re: self.re * other.re - self.im * other.im,
            im: self.re * other.im + self.im * other.re,
        }
    }
}

/// `exp(inμ)·I_n(κ)/I_0(κ)`.
pub fn trig_moment(d: &VonMises, n: u32) -> Result<TrigMoment> {
    if n == 0 {
        return domain("trigonometric moment order must be >= 1");
    }
    let modulus = bessel_ratio(d.kappa, n)?;
    Ok(TrigMoment::from_polar(modulus, f64::from(n) * d.mu))
}

/// von Mises law matching the first trigonometric moment of `θ_a + θ_b`.
///
/// The resulting concentration is `A⁻¹(A(κ_a)·A(κ_b))`, evaluated through
/// `1 - A` so that very large concentrations keep their precision.
pub fn convolve_approx(a: &VonMises, b: &VonMises) -> VonMises {
    VonMises {
        mu: wrap_angle(a.mu + b.mu),
        kappa: convolved_kappa(a.kappa, b.kappa),
    }
}

/// `A⁻¹(A(κ_a)·A(κ_b))`. Either argument may be `+∞` (a point mass).
pub fn convolved_kappa(ka: f64, kb: f64) -> f64 {
    if ka == 0.0 || kb == 0.0 {
        return 0.0;
    }
    if ka == f64::INFINITY {
        return kb;
    }
    if kb == f64::INFINITY {
        return ka;
    }
    let ca = bessel::complement_raw(ka);
    let cb = bessel::complement_raw(kb);
    // 1 - (1-ca)(1-cb)
    bessel::kappa_from_complement(ca + cb - ca * cb)
}

/// Exact product of two von Mises densities (Bayes update on the circle).
///
/// A uniform factor leaves the other operand unchanged.
pub fn multiply(prior: &VonMises, likelihood: &VonMises) -> Result<VonMises> {
    if likelihood.kappa == 0.0 {
        return Ok(*prior);
    }
    if prior.kappa == 0.0 {
        return Ok(*likelihood);
    }
    let re = likelihood.kappa * likelihood.mu.cos() + prior.kappa * prior.mu.cos();
    let im = likelihood.kappa * likelihood.mu.sin() + prior.kappa * prior.mu.sin();
    let resultant = re.hypot(im);
    if resultant < DEGENERATE_RESULTANT {
        return Err(Error::DegenerateFusion { resultant });
    }
    let mu = im.atan2(re);
    let kappa = likelihood.kappa * (mu - likelihood.mu).cos() + prior.kappa * (mu - prior.mu).cos();
    VonMises::new(mu, kappa.max(0.0))
}

/// Law of the polar angle of `v ~ N(d·(cos φ, sin φ), σ²I₂)` given `|v| = r₀`:
/// `vM(φ, r₀·d/σ²)`.
pub fn vm_from_conditioned_gaussian(phi: f64, d: f64, sigma2: f64, r0: f64) -> Result<VonMises> {
    if !(sigma2 > 0.0) {
        return domain(format!("variance must be > 0, got {sigma2}"));
    }
    if !(d >= 0.0) || !(r0 > 0.0) {
        return domain(format!("need d >= 0 and r0 > 0, got d={d}, r0={r0}"));
    }
    VonMises::new(phi, r0 * d / sigma2)
}

/// Concentration of the von Mises surrogate of `N(0, σ²)`: `κ = 1/σ²`.
pub fn kappa_from_variance(sigma2: f64) -> Result<f64> {
    if !(sigma2 > 0.0) || !sigma2.is_finite() {
        return domain(format!("variance must be finite and > 0, got {sigma2}"));
    }
    Ok(1.0 / sigma2)
}

/// Variance of the Gaussian that `vM(·, κ)` resembles: `σ² = 1/κ`.
pub fn variance_from_kappa(kappa: f64) -> Result<f64> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return domain(format!("concentration must be finite and > 0, got {kappa}"));
    }
    Ok(1.0 / kappa)
}
