//! Reference computations used to check the fast code paths.
//!
//! Everything here is deliberately slow and direct: adaptive quadrature of
//! the defining integrals, Bayes' rule on a grid, and Monte Carlo sampling.
//! None of it calls the recurrence, expansion or root-finding code it is
//! meant to check.

use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;

use crate::circstats::{
    a_func, a_inv, bessel_ratio, convolve_approx, multiply, vm_from_conditioned_gaussian, VonMises,
};
use crate::circular_loc::{phase_kappa, readout_phases, Coverage, ModuleBank, DEFAULT_RESOLUTION};
use crate::error::{Error, Result};
use crate::model::NoiseParams;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 15-point Kronrod estimate and its difference from the embedded
/// 7-point Gauss rule.
fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let pair = f(c - x) + f(c + x);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * h, (kronrod - gauss).abs() * h)
}

/// Globally adaptive Gauss–Kronrod integration: the interval with the
/// largest error estimate is bisected until the summed estimate falls below
/// `max(abs_tol, rel_tol·|I|)` or 5000 intervals are in use.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> f64 {
    let (v, e) = gk15(f, a, b);
    let mut parts = vec![(a, b, v, e)];
    loop {
        let total: f64 = parts.iter().map(|p| p.2).sum();
        let err: f64 = parts.iter().map(|p| p.3).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) || parts.len() >= 5000 {
            return total;
        }
        let (i, _) = parts
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, p)| if p.3 > acc.1 { (i, p.3) } else { acc });
        let (lo, hi, _, _) = parts.swap_remove(i);
        let m = 0.5 * (lo + hi);
        let (v1, e1) = gk15(f, lo, m);
        let (v2, e2) = gk15(f, m, hi);
        parts.push((lo, m, v1, e1));
        parts.push((m, hi, v2, e2));
    }
}

/// `I_n(κ)/I_0(κ)` from the integral representation
/// `I_p(κ) = (1/π)∫₀^π cos(pθ)e^{κ cos θ} dθ`, scaled by `e^{-κ}`.
pub fn bessel_ratio_quadrature(kappa: f64, n: u32) -> f64 {
    let nf = f64::from(n);
    let den = |t: f64| (kappa * (t.cos() - 1.0)).exp();
    let num = move |t: f64| (nf * t).cos() * (kappa * (t.cos() - 1.0)).exp();
    // the mass sits in a window of width ~1/√κ around zero; split there
    let split = (8.0 / kappa.max(1e-300).sqrt()).min(PI);
    let piecewise = |g: &dyn Fn(f64) -> f64, abs: f64| {
        let head = integrate(g, 0.0, split, abs, 1e-15);
        if split < PI {
            head + integrate(g, split, PI, abs, 1e-15)
        } else {
            head
        }
    };
    let d = piecewise(&den, 0.0);
    piecewise(&num, 1e-17 * d) / d
}

/// Bayes' rule on an `n`-point grid: total variation distance between the
/// normalized grid posterior `prior × likelihood` and `posterior`.
pub fn grid_bayes_tv(prior: &VonMises, likelihood: &VonMises, posterior: &VonMises, n: usize) -> f64 {
    let (p, q) = grid_product(prior, likelihood, posterior, n);
    0.5 * p.iter().zip(&q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Largest relative residual between the grid-normalized product of the
/// inputs and the grid-normalized claimed posterior.
pub fn grid_product_residual(prior: &VonMises, likelihood: &VonMises, posterior: &VonMises, n: usize) -> f64 {
    let (p, q) = grid_product(prior, likelihood, posterior, n);
    p.iter().zip(&q).map(|(a, b)| ((a - b) / a).abs()).fold(0.0, f64::max)
}

fn grid_product(prior: &VonMises, likelihood: &VonMises, posterior: &VonMises, n: usize) -> (Vec<f64>, Vec<f64>) {
    let h = 2.0 * PI / n as f64;
    let theta: Vec<f64> = (0..n).map(|i| -PI + i as f64 * h).collect();
    // log-densities shifted by their max before exponentiating
    let log_joint: Vec<f64> = theta
        .iter()
        .map(|t| prior.kappa() * (t - prior.mu()).cos() + likelihood.kappa() * (t - likelihood.mu()).cos())
        .collect();
    let log_post: Vec<f64> = theta
        .iter()
        .map(|t| posterior.kappa() * (t - posterior.mu()).cos())
        .collect();
    (normalize(&log_joint), normalize(&log_post))
}

fn normalize(logs: &[f64]) -> Vec<f64> {
    let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logs.iter().map(|l| (l - m).exp()).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|v| v / s).collect()
}

/// Empirical mean of `exp(iθ)` with per-component standard errors.
#[derive(Debug, Clone, Copy)]
pub struct MomentEstimate {
    pub re: f64,
    pub im: f64,
    pub se_re: f64,
    pub se_im: f64,
}

fn moment_of(samples: impl Iterator<Item = f64>) -> MomentEstimate {
    let (mut n, mut sc, mut ss, mut sc2, mut ss2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for t in samples {
        let (s, c) = t.sin_cos();
        n += 1.0;
        sc += c;
        ss += s;
        sc2 += c * c;
        ss2 += s * s;
    }
    let (mc, ms) = (sc / n, ss / n);
    let vc = (sc2 / n - mc * mc).max(0.0);
    let vs = (ss2 / n - ms * ms).max(0.0);
    MomentEstimate {
        re: mc,
        im: ms,
        se_re: (vc / n).sqrt(),
        se_im: (vs / n).sqrt(),
    }
}

/// First trigonometric moment of `θ_a + θ_b` from `n` sampled pairs.
pub fn mc_sum_moment<R: Rng + ?Sized>(a: &VonMises, b: &VonMises, n: usize, rng: &mut R) -> MomentEstimate {
    use rand::distr::Distribution;
    moment_of((0..n).map(|_| a.sample(rng) + b.sample(rng)))
}

/// First trigonometric moment of draws from `d`.
pub fn mc_moment<R: Rng + ?Sized>(d: &VonMises, n: usize, rng: &mut R) -> MomentEstimate {
    use rand::distr::Distribution;
    moment_of((0..n).map(|_| d.sample(rng)))
}

/// Samples `v ~ N(d(cos φ, sin φ), σ²I₂)`, keeps those with
/// `|v| ∈ [r0 - band, r0 + band]` until `accepted` are collected, and returns
/// the total variation between their angle histogram (`bins` equal bins)
/// and the bin probabilities of `model`, integrated by quadrature.
#[allow(clippy::too_many_arguments)]
pub fn mc_conditioned_angle_tv<R: Rng + ?Sized>(
    phi: f64,
    d: f64,
    sigma2: f64,
    r0: f64,
    band: f64,
    accepted: usize,
    bins: usize,
    model: &VonMises,
    rng: &mut R,
) -> f64 {
    let sigma = sigma2.sqrt();
    let (mx, my) = (d * phi.cos(), d * phi.sin());
    let mut counts = vec![0usize; bins];
    let mut got = 0;
    while got < accepted {
        let x = mx + sigma * rng.sample::<f64, _>(StandardNormal);
        let y = my + sigma * rng.sample::<f64, _>(StandardNormal);
        let r = x.hypot(y);
        if (r - r0).abs() <= band {
            let t = y.atan2(x);
            let idx = (((t + PI) / (2.0 * PI)) * bins as f64).floor() as usize;
            counts[idx.min(bins - 1)] += 1;
            got += 1;
        }
    }
    // model density normalized by quadrature, independent of ln I0
    let dens = |t: f64| (model.kappa() * ((t - model.mu()).cos() - 1.0)).exp();
    let total = integrate(&dens, -PI, PI, 0.0, 1e-13);
    let w = 2.0 * PI / bins as f64;
    (0..bins)
        .map(|i| {
            let lo = -PI + i as f64 * w;
            let p = integrate(&dens, lo, lo + w, 1e-15, 1e-12) / total;
            (counts[i] as f64 / accepted as f64 - p).abs()
        })
        .sum::<f64>()
        * 0.5
}

/// Monte Carlo of the projected forward speed `(v + n_v)·cos θ̂` with
/// `n_v ~ N(0, σ_v²)` and `θ̂ ~ vM(θ̄, κ)`: mean, its standard error, and the
/// sample variance.
pub fn mc_projected_speed<R: Rng + ?Sized>(
    v: f64,
    sigma_v2: f64,
    heading: &VonMises,
    n: usize,
    rng: &mut R,
) -> (f64, f64, f64) {
    use rand::distr::Distribution;
    let sv = sigma_v2.sqrt();
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..n {
        let nv: f64 = rng.sample(StandardNormal);
        let x = (v + sv * nv) * heading.sample(rng).cos();
        s += x;
        s2 += x * x;
    }
    let nf = n as f64;
    let mean = s / nf;
    let var = (s2 / nf - mean * mean) * nf / (nf - 1.0);
    (mean, (var / nf).sqrt(), var)
}

/// Brute-force argmax of the readout score over a grid, without the
/// incremental rotation or the refinement step.
pub fn brute_force_readout(phases: &[VonMises], lambdas: &[f64], min: f64, max: f64, step: f64) -> f64 {
    let n = ((max - min) / step).round() as usize;
    let mut best = (f64::NEG_INFINITY, min);
    for k in 0..=n {
        let x = min + k as f64 * step;
        let s: f64 = phases
            .iter()
            .zip(lambdas)
            .map(|(p, l)| p.kappa() * (2.0 * PI * x / l - p.mu()).cos())
            .sum();
        if s > best.0 {
            best = (s, x);
        }
    }
    best.1
}

struct Table(String);

impl Table {
    fn new(title: &str) -> Self {
        let mut s = format!("== {title}\n");
        let _ = writeln!(
            s,
            "{:<36} {:>22} {:>22} {:>10}",
            "quantity", "library", "reference", "abs diff"
        );
        Table(s)
    }

    fn row(&mut self, label: &str, lib: f64, reference: f64) {
        let _ = writeln!(
            self.0,
            "{label:<36} {lib:>22.15e} {reference:>22.15e} {:>10.2e}",
            (lib - reference).abs()
        );
    }
}

const REPORTS: [&str; 8] = [
    "bessel",
    "a_inv",
    "convolve",
    "multiply",
    "conditioning",
    "speed",
    "readout",
    "constants",
];

/// Text table comparing library values with the references above.
/// `name` is one of the report names or `all`.
pub fn report(name: &str) -> Result<String> {
    if name == "all" {
        return REPORTS.iter().map(|n| report(n)).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let t = match name {
        "bessel" => {
            let mut t = Table::new("Bessel ratios I_n/I_0 vs adaptive quadrature");
            for &(k, n) in &[
                (0.001, 1),
                (0.5, 1),
                (2.0, 1),
                (2.0, 2),
                (10.0, 1),
                (49.0, 1),
                (51.0, 1),
                (250.0, 1),
                (500.0, 1),
            ] {
                t.row(
                    &format!("I_{n}/I_0({k})"),
                    bessel_ratio(k, n)?,
                    bessel_ratio_quadrature(k, n),
                );
            }
            t
        }
        "a_inv" => {
            let mut t = Table::new("a_inv(A(k)) round trip");
            for &k in &[0.01, 0.7, 3.0, 40.0, 125.251_263_211_119, 250.0, 1e4] {
                t.row(&format!("a_inv(A({k}))"), a_inv(bessel_ratio_quadrature(k, 1))?, k);
            }
            t
        }
        "convolve" => {
            let mut t = Table::new("moment-matched convolution vs 1e6-sample Monte Carlo");
            for &(ma, ka, mb, kb) in &[(0.3, 2.0, -1.0, 5.0), (0.0, 250.0, 0.004, 250.0), (2.0, 0.5, 2.0, 0.5)] {
                let (a, b) = (VonMises::new(ma, ka)?, VonMises::new(mb, kb)?);
                let c = convolve_approx(&a, &b);
                let m = c.trig_moment(1)?;
                let e = mc_sum_moment(&a, &b, 1_000_000, &mut rng);
                t.row(&format!("Re m1 vM({ma},{ka})+vM({mb},{kb})"), m.re, e.re);
                t.row(&format!("Im m1 vM({ma},{ka})+vM({mb},{kb})"), m.im, e.im);
            }
            t
        }
        "multiply" => {
            let mut t = Table::new("Bayes product vs 4096-point grid posterior (TV)");
            for &(mp, kp, ml, kl) in &[(0.0, 2.0, 1.5, 2.0), (3.0, 10.0, -3.0, 40.0), (1.0, 0.01, -2.0, 300.0)] {
                let (p, l) = (VonMises::new(mp, kp)?, VonMises::new(ml, kl)?);
                let post = multiply(&p, &l)?;
                t.row(
                    &format!("TV vM({mp},{kp})*vM({ml},{kl})"),
                    grid_bayes_tv(&p, &l, &post, 4096),
                    0.0,
                );
            }
            t
        }
        "conditioning" => {
            let mut t = Table::new("conditioned Gaussian angle vs von Mises (TV, 1e5 accepted)");
            let model = vm_from_conditioned_gaussian(PI / 4.0, 2.0, 0.5, 3.0)?;
            t.row("kappa = r0 d / sigma^2", model.kappa(), 12.0);
            let tv = mc_conditioned_angle_tv(PI / 4.0, 2.0, 0.5, 3.0, 0.01, 100_000, 36, &model, &mut rng);
            t.row("TV (36 bins)", tv, 0.0);
            t
        }
        "speed" => {
            let mut t = Table::new("projected speed (v + n_v) cos(theta) vs 1e6-sample Monte Carlo");
            for &(v, s2, mu, k) in &[(0.1, 1e-4, 0.3, 100.0), (1.0, 0.04, 2.0, 2.0), (0.5, 0.01, -1.0, 0.2)] {
                let h = VonMises::new(mu, k)?;
                let (mean, _, var) = mc_projected_speed(v, s2, &h, 1_000_000, &mut rng);
                t.row(&format!("mean v={v} mu={mu} k={k}"), v * a_func(k)? * mu.cos(), mean);
                t.row("  variance bound vs MC variance", s2 + v * v, var);
            }
            t
        }
        "readout" => {
            let mut t = Table::new("readout vs brute-force grid argmax");
            let bank = ModuleBank::geometric(2.5, 1.5, 4)?;
            let cov = Coverage::new(-5.0, 5.0)?;
            for &x in &[-4.321, -1.0, 0.0, 0.777, 3.3, 4.99] {
                let phases: Vec<VonMises> = bank
                    .phases(x)
                    .iter()
                    .map(|p| VonMises::new(*p, 50.0))
                    .collect::<Result<_>>()?;
                let lib = readout_phases(&phases, bank.lambdas(), &cov, DEFAULT_RESOLUTION)?;
                t.row(
                    &format!("x = {x}"),
                    lib,
                    brute_force_readout(&phases, bank.lambdas(), -5.0, 5.0, 1e-4),
                );
            }
            t
        }
        "constants" => {
            let mut t = Table::new("derived scenario constants");
            let n = NoiseParams {
                sigma_omega2: 10.0,
                sigma_v2: 1e-4,
                kappa_nu_theta: 100.0,
                sigma2_ox: 0.01,
                sigma2_oy: 0.01,
                kappa_b: 500.0,
                sigma_r2: 1e-4,
            };
            let dt = 0.02;
            t.row("heading kappa_w = 1/(s_w^2 dt^2)", n.heading_kappa_w(dt), 250.0);
            let var = n.speed_variance_bound(0.1) * dt * dt;
            t.row(
                "phase kappa_w, lambda = 2.5",
                phase_kappa(2.5, var),
                2.5f64.powi(2) / (4.0 * PI * PI * 4.04e-6),
            );
            t.row("A(250)", a_func(250.0)?, bessel_ratio_quadrature(250.0, 1));
            t.row("A(500)", a_func(500.0)?, bessel_ratio_quadrature(500.0, 1));
            t
        }
        _ => {
            return Err(Error::Config(format!(
                "unknown oracle '{name}'; try one of {REPORTS:?} or all"
            )))
        }
    };
    Ok(t.0)
}
