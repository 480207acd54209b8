//! Recursive scalar filters: the von Mises filter for a circular state and the
//! scalar Kalman filter used per position axis.

use crate::circstats::{convolved_kappa, multiply, wrap_angle, VonMises};
use crate::error::{domain, Result};

/// State of the von Mises filter is the belief itself.
pub type VmFilterState = VonMises;

/// Time update for `θ' = θ + u + w`, `w ~ vM(0, κ_w)`.
///
/// `kappa_w = +∞` models a noise-free increment.
pub fn vmf_time(state: &VmFilterState, u: f64, kappa_w: f64) -> Result<VmFilterState> {
    if !(kappa_w > 0.0) || !u.is_finite() {
        return domain(format!("vmf_time needs kappa_w > 0 and finite u, got {kappa_w}, {u}"));
    }
    VonMises::new(wrap_angle(state.mu() + u), convolved_kappa(state.kappa(), kappa_w))
}

/// Observation update for `o = θ + ν`, `ν ~ vM(0, κ_ν)`.
pub fn vmf_obsv(state: &VmFilterState, o: f64, kappa_nu: f64) -> Result<VmFilterState> {
    if !(kappa_nu > 0.0) {
        return domain(format!("vmf_obsv needs kappa_nu > 0, got {kappa_nu}"));
    }
    multiply(state, &VonMises::new(o, kappa_nu)?)
}

/// Scalar Gaussian belief `N(mean, var)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KfState {
    pub mean: f64,
    pub var: f64,
}

impl KfState {
    pub fn new(mean: f64, var: f64) -> Result<Self> {
        if !mean.is_finite() || !(var > 0.0) || !var.is_finite() {
            return domain(format!(
                "Kalman state needs finite mean and var > 0, got ({mean}, {var})"
            ));
        }
        Ok(Self { mean, var })
    }
}

/// `s' = s + u + w`, `w ~ N(0, var_w)`.
pub fn kf_time(state: &KfState, u: f64, var_w: f64) -> Result<KfState> {
    if !(var_w >= 0.0) || !var_w.is_finite() {
        return domain(format!("kf_time needs finite var_w >= 0, got {var_w}"));
    }
    KfState::new(state.mean + u, state.var + var_w)
}

/// `o = s + r`, `r ~ N(0, var_r)`.
pub fn kf_obsv(state: &KfState, o: f64, var_r: f64) -> Result<KfState> {
    if !(var_r > 0.0) {
        return domain(format!("kf_obsv needs var_r > 0, got {var_r}"));
    }
    let gain = state.var / (var_r + state.var);
    let mean = state.mean + gain * (o - state.mean);
    let var = 1.0 / (1.0 / state.var + 1.0 / var_r);
    KfState::new(mean, var)
}
