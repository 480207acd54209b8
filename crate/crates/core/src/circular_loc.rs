//! Fully circular localization: every state component is a von Mises belief.
//!
//! Position on each axis is carried as phases `φ_i = 2πx/λ_i` in modules of
//! spatial period `λ_i` and decoded by maximizing the summed phase
//! log-likelihood over a bounded coverage interval.

use std::f64::consts::PI;

use crate::circstats::{a_func, wrap_angle, VonMises};
use crate::error::{domain, Error, Result};
use crate::mixture_loc::{equivalent_heading, equivalent_position};
use crate::model::{HeadingRule, Landmark, NoiseParams, OdometryInput};
use crate::scalar_filters::{vmf_obsv, vmf_time};

/// Default readout grid step, metres.
pub const DEFAULT_RESOLUTION: f64 = 0.005;

/// Spatial periods `λ_1 < ... < λ_M` with a constant ratio between
/// neighbours.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuleBank {
    lambdas: Vec<f64>,
}

impl ModuleBank {
    pub fn new(lambdas: Vec<f64>) -> Result<Self> {
        if lambdas.is_empty() {
            return domain("module bank needs at least one module");
        }
        if lambdas.iter().any(|l| !(*l > 0.0) || !l.is_finite()) {
            return domain("spatial periods must be finite and > 0");
        }
        if lambdas.windows(2).any(|w| w[1] <= w[0]) {
            return domain("spatial periods must be strictly increasing");
        }
        if lambdas.len() > 2 {
            let ratio = lambdas[1] / lambdas[0];
            if lambdas.windows(2).any(|w| ((w[1] / w[0]) / ratio - 1.0).abs() > 1e-9) {
                return domain("adjacent spatial periods must share one ratio");
            }
        }
        Ok(Self { lambdas })
    }

    /// `M` modules `λ_1·ratio^(i-1)`.
    pub fn geometric(lambda1: f64, ratio: f64, modules: usize) -> Result<Self> {
        if !(ratio > 1.0) {
            return domain(format!("module ratio must be > 1, got {ratio}"));
        }
        Self::new((0..modules).map(|i| lambda1 * ratio.powi(i as i32)).collect())
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    /// Phases `wrap(2πx/λ_i)` of a coordinate.
    pub fn phases(&self, x: f64) -> Vec<f64> {
        self.lambdas.iter().map(|l| wrap_angle(2.0 * PI * x / l)).collect()
    }

    /// Smallest length after which every module repeats, if one exists
    /// within a million periods of the largest module.
    pub fn common_period(&self) -> Option<f64> {
        let largest = *self.lambdas.last()?;
        (1..=1_000_000u32).map(|k| f64::from(k) * largest).find(|len| {
            self.lambdas.iter().all(|l| {
                let q = len / l;
                (q - q.round()).abs() < 1e-9 * q.max(1.0)
            })
        })
    }
}

/// Phase concentration of a Cartesian variance: `λ² / (4π²·variance)`.
pub fn phase_kappa(lambda: f64, variance: f64) -> f64 {
    if variance > 0.0 {
        lambda * lambda / (4.0 * PI * PI * variance)
    } else {
        f64::INFINITY
    }
}

/// Closed interval on which decoding is valid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coverage {
    pub min: f64,
    pub max: f64,
}

impl Coverage {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !(min < max) || !min.is_finite() || !max.is_finite() {
            return domain(format!("coverage needs finite min < max, got [{min}, {max}]"));
        }
        Ok(Self { min, max })
    }

    pub fn contains(&self, x: f64) -> bool {
        (self.min..=self.max).contains(&x)
    }

    pub fn len(&self) -> f64 {
        self.max - self.min
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Phase codes of a position: `(φ_1..φ_M, ψ_1..ψ_M)`.
pub fn encode(x: f64, y: f64, bank: &ModuleBank, coverage: (&Coverage, &Coverage)) -> Result<(Vec<f64>, Vec<f64>)> {
    if !coverage.0.contains(x) || !coverage.1.contains(y) {
        return domain(format!("position ({x}, {y}) lies outside the coverage"));
    }
    Ok((bank.phases(x), bank.phases(y)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircularBelief {
    pub heading: VonMises,
    pub phi: Vec<VonMises>,
    pub psi: Vec<VonMises>,
    bank: ModuleBank,
    coverage_x: Coverage,
    coverage_y: Coverage,
    resolution: f64,
}

impl CircularBelief {
    pub fn new(
        heading: VonMises,
        phi: Vec<VonMises>,
        psi: Vec<VonMises>,
        bank: ModuleBank,
        coverage_x: Coverage,
        coverage_y: Coverage,
    ) -> Result<Self> {
        if phi.len() != bank.len() || psi.len() != bank.len() {
            return domain("one phase belief per module and axis is required");
        }
        if let Some(period) = bank.common_period() {
            if coverage_x.len() > period + 1e-9 || coverage_y.len() > period + 1e-9 {
                return domain(format!(
                    "coverage exceeds the common period {period} of the module bank"
                ));
            }
        }
        Ok(Self {
            heading,
            phi,
            psi,
            bank,
            coverage_x,
            coverage_y,
            resolution: DEFAULT_RESOLUTION,
        })
    }

    /// Belief centred on `(x, y)` with isotropic Cartesian variance `var`.
    pub fn from_position(
        heading: VonMises,
        x: f64,
        y: f64,
        var: f64,
        bank: ModuleBank,
        coverage: Coverage,
    ) -> Result<Self> {
        if !(var > 0.0) {
            return domain(format!("initial variance must be > 0, got {var}"));
        }
        let (px, py) = encode(x, y, &bank, (&coverage, &coverage))?;
        let kappas: Vec<f64> = bank.lambdas().iter().map(|l| phase_kappa(*l, var)).collect();
        let phi = px
            .iter()
            .zip(&kappas)
            .map(|(p, k)| VonMises::new(*p, *k))
            .collect::<Result<_>>()?;
        let psi = py
            .iter()
            .zip(&kappas)
            .map(|(p, k)| VonMises::new(*p, *k))
            .collect::<Result<_>>()?;
        Self::new(heading, phi, psi, bank, coverage, coverage)
    }

    pub fn with_resolution(mut self, resolution: f64) -> Result<Self> {
        if !(resolution > 0.0) {
            return domain(format!("resolution must be > 0, got {resolution}"));
        }
        self.resolution = resolution;
        Ok(self)
    }

    pub fn bank(&self) -> &ModuleBank {
        &self.bank
    }

    pub fn coverage(&self, axis: Axis) -> Coverage {
        match axis {
            Axis::X => self.coverage_x,
            Axis::Y => self.coverage_y,
        }
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    fn phases(&self, axis: Axis) -> &[VonMises] {
        match axis {
            Axis::X => &self.phi,
            Axis::Y => &self.psi,
        }
    }

    /// Decoded `(x̄, ȳ)` at the belief's own resolution.
    pub fn position(&self) -> Result<(f64, f64)> {
        Ok((
            readout(self, Axis::X, self.resolution)?,
            readout(self, Axis::Y, self.resolution)?,
        ))
    }

    /// Cartesian variance proxy `1/κ` of the largest-period module; the
    /// larger of the two axes.
    pub fn position_variance_proxy(&self) -> f64 {
        let last = self.bank.len() - 1;
        let inv = |k: f64| if k > 0.0 { 1.0 / k } else { f64::INFINITY };
        inv(self.phi[last].kappa()).max(inv(self.psi[last].kappa()))
    }
}

pub fn time_update(b: &CircularBelief, u: &OdometryInput, n: &NoiseParams) -> Result<CircularBelief> {
    if !(u.dt > 0.0) {
        return domain("time step must be > 0");
    }
    let heading = vmf_time(&b.heading, u.omega * u.dt, n.heading_kappa_w(u.dt))?;
    let advance = u.v * a_func(b.heading.kappa())? * u.dt;
    let (s, c) = b.heading.mu().sin_cos();
    let speed_var = n.speed_variance_bound(u.v) * u.dt * u.dt;
    let mut out = b.clone();
    out.heading = heading;
    for (i, lambda) in b.bank.lambdas().iter().enumerate() {
        let scale = 2.0 * PI / lambda;
        let kappa_w = phase_kappa(*lambda, speed_var);
        out.phi[i] = vmf_time(&b.phi[i], scale * advance * c, kappa_w)?;
        out.psi[i] = vmf_time(&b.psi[i], scale * advance * s, kappa_w)?;
    }
    Ok(out)
}

/// Fuses Cartesian observations `(o_x, o_y)` of variances `(var_x, var_y)`
/// into every module as phase observations.
fn fuse_position(b: &mut CircularBelief, (o_x, o_y): (f64, f64), (var_x, var_y): (f64, f64)) -> Result<()> {
    for (i, lambda) in b.bank.lambdas().iter().enumerate() {
        let scale = 2.0 * PI / lambda;
        b.phi[i] = vmf_obsv(&b.phi[i], wrap_angle(scale * o_x), phase_kappa(*lambda, var_x))?;
        b.psi[i] = vmf_obsv(&b.psi[i], wrap_angle(scale * o_y), phase_kappa(*lambda, var_y))?;
    }
    Ok(())
}

pub fn obsv_direct(b: &CircularBelief, o_theta: f64, o_x: f64, o_y: f64, n: &NoiseParams) -> Result<CircularBelief> {
    let mut out = b.clone();
    out.heading = vmf_obsv(&b.heading, o_theta, n.kappa_nu_theta)?;
    fuse_position(&mut out, (o_x, o_y), (n.sigma2_ox, n.sigma2_oy))?;
    Ok(out)
}

pub fn obsv_bearing_distance(
    b: &CircularBelief,
    lm: &Landmark,
    s_b: f64,
    s_r: f64,
    n: &NoiseParams,
) -> Result<CircularBelief> {
    obsv_bearing_distance_with(b, lm, s_b, s_r, n, HeadingRule::Convolution)
}

/// Bearing/distance update: decode the position, replace the heading by the
/// equivalent measurement, and fuse the equivalent position into each
/// module. All observations derive from the prior belief.
pub fn obsv_bearing_distance_with(
    b: &CircularBelief,
    lm: &Landmark,
    s_b: f64,
    s_r: f64,
    n: &NoiseParams,
    rule: HeadingRule,
) -> Result<CircularBelief> {
    let position = b.position()?;
    let heading = equivalent_heading(position, b.position_variance_proxy(), lm, s_b, s_r, n.kappa_b, rule)?;
    let (obs, var_o) = equivalent_position(&b.heading, lm, s_b, s_r, n)?;
    let mut out = b.clone();
    out.heading = heading;
    fuse_position(&mut out, obs, (var_o, var_o))?;
    Ok(out)
}

/// Maximum-likelihood position along one axis.
pub fn readout(b: &CircularBelief, axis: Axis, resolution: f64) -> Result<f64> {
    readout_phases(b.phases(axis), b.bank.lambdas(), &b.coverage(axis), resolution)
}

/// Argmax over a grid of step `resolution` on `coverage` of
/// `Σ_i κ_i cos(2πx/λ_i - φ̄_i)`, refined by a golden-section search inside
/// the winning cell. Ties go to the smallest `|x|`, then the smallest `x`.
pub fn readout_phases(phases: &[VonMises], lambdas: &[f64], coverage: &Coverage, resolution: f64) -> Result<f64> {
    if !(resolution > 0.0) {
        return domain(format!("resolution must be > 0, got {resolution}"));
    }
    if phases.len() != lambdas.len() || phases.is_empty() {
        return domain("one phase per module is required");
    }
    let total_kappa: f64 = phases.iter().map(VonMises::kappa).sum();
    if !(total_kappa > 0.0) {
        return Err(Error::NoInformation);
    }
    let score = |x: f64| -> f64 {
        phases
            .iter()
            .zip(lambdas)
            .map(|(p, l)| p.kappa() * (2.0 * PI * x / l - p.mu()).cos())
            .sum()
    };
    let tie = 1e-9 * total_kappa;
    let mut best_x = coverage.min;
    let mut best = f64::NEG_INFINITY;
    let mut consider = |x: f64, s: f64| {
        if s > best + tie || ((s - best).abs() <= tie && (x.abs(), x) < (best_x.abs(), best_x)) {
            best = best.max(s);
            best_x = x;
        }
    };

    // Each module term is advanced along the grid by a fixed rotation.
    let steps = ((coverage.len() / resolution) + 1e-9).floor() as usize;
    let mut rot: Vec<(f64, f64, f64, f64)> = phases
        .iter()
        .zip(lambdas)
        .map(|(p, l)| {
            let (s0, c0) = (2.0 * PI * coverage.min / l - p.mu()).sin_cos();
            let (ds, dc) = (2.0 * PI * resolution / l).sin_cos();
            (c0, s0, dc, ds)
        })
        .collect();
    for k in 0..=steps {
        let x = coverage.min + k as f64 * resolution;
        let s: f64 = phases.iter().zip(&rot).map(|(p, r)| p.kappa() * r.0).sum();
        consider(x, s);
        for r in rot.iter_mut() {
            let (c, sn) = (r.0 * r.2 - r.1 * r.3, r.1 * r.2 + r.0 * r.3);
            r.0 = c;
            r.1 = sn;
        }
    }
    let last = coverage.min + steps as f64 * resolution;
    if last < coverage.max - 1e-12 {
        consider(coverage.max, score(coverage.max));
    }

    // grid scores carry recurrence rounding; compare refinements on exact scores
    let grid_x = best_x;
    let grid_score = score(grid_x);
    let refined = golden_max(
        &score,
        (grid_x - resolution).max(coverage.min),
        (grid_x + resolution).min(coverage.max),
    );
    if score(refined) > grid_score {
        Ok(refined)
    } else {
        Ok(grid_x)
    }
}

fn golden_max(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..60 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
        if b - a < 1e-12 {
            break;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_bank() -> ModuleBank {
        ModuleBank::geometric(2.5, 1.5, 4).unwrap()
    }

    fn cov() -> Coverage {
        Coverage::new(-5.0, 5.0).unwrap()
    }

    fn noise() -> NoiseParams {
        NoiseParams {
            sigma_omega2: 10.0,
            sigma_v2: 1e-4,
            kappa_nu_theta: 50.0,
            sigma2_ox: 0.01,
            sigma2_oy: 0.01,
            kappa_b: 500.0,
            sigma_r2: 1e-4,
        }
    }

    fn belief_at(x: f64, y: f64, kappa: f64) -> CircularBelief {
        let bank = reference_bank();
        let phi = bank
            .phases(x)
            .iter()
            .map(|p| VonMises::new(*p, kappa).unwrap())
            .collect();
        let psi = bank
            .phases(y)
            .iter()
            .map(|p| VonMises::new(*p, kappa).unwrap())
            .collect();
        CircularBelief::new(VonMises::new(0.0, 100.0).unwrap(), phi, psi, bank, cov(), cov()).unwrap()
    }

    #[test]
    fn bank_validation() {
        assert_eq!(reference_bank().lambdas(), &[2.5, 3.75, 5.625, 8.4375]);
        assert!(ModuleBank::new(vec![]).is_err());
        assert!(ModuleBank::new(vec![2.0, 1.0]).is_err());
        assert!(ModuleBank::new(vec![1.0, 2.0, 3.0]).is_err());
        assert!(ModuleBank::geometric(1.0, 0.5, 3).is_err());
        assert!((reference_bank().common_period().unwrap() - 67.5).abs() < 1e-9);
    }

    #[test]
    fn coverage_must_fit_common_period() {
        let bank = ModuleBank::new(vec![1.0, 2.0]).unwrap();
        let c = Coverage::new(-2.0, 2.0).unwrap();
        let v = vec![VonMises::uniform(); 2];
        let err = CircularBelief::new(VonMises::uniform(), v.clone(), v, bank, c, c);
        assert!(err.is_err());
    }

    #[test]
    fn encode_cases() {
        let bank = reference_bank();
        let (phi, psi) = encode(0.0, 0.0, &bank, (&cov(), &cov())).unwrap();
        assert!(phi.iter().chain(&psi).all(|p| *p == 0.0));

        let (phi, _) = encode(2.5, 0.0, &bank, (&cov(), &cov())).unwrap();
        assert!(phi[0].abs() < 1e-15);
        assert!((phi[1] - wrap_angle(2.0 * PI / 1.5)).abs() < 1e-15);

        let (phi, _) = encode(1.0, 0.0, &bank, (&cov(), &cov())).unwrap();
        for (p, l) in phi.iter().zip(bank.lambdas()) {
            assert_eq!(*p, wrap_angle(2.0 * PI / l));
        }
        assert!(encode(5.5, 0.0, &bank, (&cov(), &cov())).is_err());
    }

    #[test]
    fn phase_noise_concentrations() {
        // 2.5² / (4π²·4e-4·(1e-4 + 0.01)) = 39186.72015870118
        let k = phase_kappa(2.5, 0.02 * 0.02 * (1e-4 + 0.01));
        assert!((k - 39_186.720_158_701_18).abs() < 1e-6);
        // 6.25 / (4π²·0.01) = 15.831434944115276
        assert!((phase_kappa(2.5, 0.01) - 15.831_434_944_115_276).abs() < 1e-12);
        let ks: Vec<f64> = reference_bank().lambdas().iter().map(|l| phase_kappa(*l, 1e-3)).collect();
        assert!(ks.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn time_update_advances_phases() {
        let b = belief_at(0.3, -0.2, 200.0);
        let u = OdometryInput::new(0.2, 0.1, 0.02).unwrap();
        let out = time_update(&b, &u, &noise()).unwrap();
        for (before, after) in b.psi.iter().zip(&out.psi) {
            assert!((after.mu() - before.mu()).abs() < 1e-15);
        }
        let a = a_func(100.0).unwrap();
        let d0 = wrap_angle(out.phi[0].mu() - b.phi[0].mu());
        let d1 = wrap_angle(out.phi[1].mu() - b.phi[1].mu());
        assert!((d0 - 2.0 * PI * 0.1 * a * 0.02 / 2.5).abs() < 1e-14);
        assert!((d1 / d0 - 2.0 / 3.0).abs() < 1e-9);
        assert!(out.phi.iter().all(|p| p.kappa() < 200.0));
    }

    #[test]
    fn direct_observation_cases() {
        let b = belief_at(1.0, -1.0, 20.0);
        let out = obsv_direct(&b, 0.0, 1.0, -1.0, &noise()).unwrap();
        for (i, l) in reference_bank().lambdas().iter().enumerate() {
            assert!((out.phi[i].mu() - b.phi[i].mu()).abs() < 1e-12);
            assert!((out.phi[i].kappa() - (20.0 + phase_kappa(*l, 0.01))).abs() < 1e-9);
        }
        let vague = NoiseParams {
            sigma2_ox: 1e12,
            sigma2_oy: 1e12,
            kappa_nu_theta: 1e-12,
            ..noise()
        };
        let out = obsv_direct(&b, 2.0, 4.0, 3.0, &vague).unwrap();
        for (p, q) in b.phi.iter().chain(&b.psi).zip(out.phi.iter().chain(&out.psi)) {
            assert!((p.mu() - q.mu()).abs() < 1e-6 && (p.kappa() - q.kappa()).abs() < 1e-6);
        }
    }

    #[test]
    fn variance_proxy_from_largest_module() {
        let mut b = belief_at(0.0, 0.0, 50.0);
        b.phi[3] = VonMises::new(0.0, 100.0).unwrap();
        b.psi[3] = VonMises::new(0.0, 100.0).unwrap();
        assert!((b.position_variance_proxy() - 0.01).abs() < 1e-15);
        b.psi[3] = VonMises::new(0.0, 50.0).unwrap();
        assert!((b.position_variance_proxy() - 0.02).abs() < 1e-15);
    }

    #[test]
    fn readout_cases() {
        let b = belief_at(1.0, 0.0, 10.0);
        assert!((readout(&b, Axis::X, 0.005).unwrap() - 1.0).abs() <= 0.005);
        assert_eq!(readout(&b, Axis::Y, 0.005).unwrap(), 0.0);

        let single = ModuleBank::new(vec![2.5]).unwrap();
        let phases = [VonMises::new(0.0, 3.0).unwrap()];
        let x = readout_phases(&phases, single.lambdas(), &cov(), 0.005).unwrap();
        assert_eq!(x, 0.0);

        let zero = [VonMises::uniform()];
        assert_eq!(readout_phases(&zero, &[2.5], &cov(), 0.005), Err(Error::NoInformation));
        assert!(readout(&b, Axis::X, 0.0).is_err());
    }

    #[test]
    fn tie_break_prefers_negative_on_equal_magnitude() {
        // -cos(2πx/5) peaks at x = ±2.5
        let phases = [VonMises::new(PI, 1.0).unwrap()];
        let c = Coverage::new(-2.5, 2.5).unwrap();
        assert_eq!(readout_phases(&phases, &[5.0], &c, 0.005).unwrap(), -2.5);
        // sin(2πx/5) peaks at the interior point 1.25
        let phases = [VonMises::new(PI / 2.0, 1.0).unwrap()];
        let x = readout_phases(&phases, &[5.0], &c, 0.005).unwrap();
        assert!((x - 1.25).abs() < 1e-9);
    }

    #[test]
    fn bearing_update_zero_noise_recovers_position() {
        let n = NoiseParams {
            kappa_b: 1e14,
            sigma_r2: 0.0,
            ..noise()
        };
        let lm = Landmark::new(2.0, 3.0);
        let (tx, ty, tt) = (0.5, -0.25, 0.3);
        let mut b = belief_at(tx, ty, 1e3);
        b.heading = VonMises::new(tt, 1e14).unwrap();
        let s_b = wrap_angle((3.0 - ty).atan2(2.0 - tx) - tt);
        let s_r = (2.0 - tx).hypot(3.0 - ty);
        let out = obsv_bearing_distance(&b, &lm, s_b, s_r, &n).unwrap();
        let (x, y) = out.position().unwrap();
        assert!((x - tx).abs() <= 0.005 && (y - ty).abs() <= 0.005);
        assert!((out.heading.mu() - tt).abs() < 1e-12);
    }

    #[test]
    fn bearing_update_from_origin_matches_script() {
        let n = noise();
        let lm = Landmark::new(2.0, 3.0);
        let b = CircularBelief::from_position(VonMises::new(0.0, 100.0).unwrap(), 0.0, 0.0, 0.01, reference_bank(), cov())
            .unwrap();
        let s_b = 3f64.atan2(2.0);
        let s_r = 13f64.sqrt();
        let out = obsv_bearing_distance(&b, &lm, s_b, s_r, &n).unwrap();

        let shrink = a_func(100.0).unwrap() * a_func(500.0).unwrap();
        let ox = 2.0 - s_r * shrink * s_b.cos();
        let var_o = 1e-4 + 13.0;
        for (i, l) in reference_bank().lambdas().iter().enumerate() {
            let prior = phase_kappa(*l, 0.01);
            let obs = phase_kappa(*l, var_o);
            let z = wrap_angle(2.0 * PI * ox / l);
            let re = prior + obs * z.cos();
            let im = obs * z.sin();
            assert!((out.phi[i].mu() - im.atan2(re)).abs() < 1e-14);
            assert!((out.phi[i].kappa() - re.hypot(im)).abs() < 1e-9);
        }
        // heading: variance proxy is 1/κ of the largest module
        let proxy = 1.0 / phase_kappa(8.4375, 0.01);
        let k1 = 13f64.sqrt() * s_r / (2.0 * proxy);
        let expect = crate::circstats::convolved_kappa(k1, 500.0);
        assert!(out.heading.mu().abs() < 1e-15);
        assert!((out.heading.kappa() - expect).abs() < 1e-9);
    }
}
