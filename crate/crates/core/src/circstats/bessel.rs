//! Ratios of modified Bessel functions of the first kind.
//!
//! Nothing here ever forms `I_p(κ)` itself: below [`ASYMPTOTIC_MIN`] the
//! ratios come from a backward sweep of `I_ν/I_{ν-1} = κ / (2ν + κ·I_{ν+1}/I_ν)`,
//! above it from the large-argument expansion in which the common factor
//! `e^κ / √(2πκ)` cancels. Both paths stay finite for κ up to `f64::MAX`.

use crate::error::{domain, Result};

/// Below this concentration the recurrence is used; above it the expansion.
const ASYMPTOTIC_MIN: f64 = 50.0;

/// Largest input accepted by [`a_inv`]; larger values are clamped to it.
pub const A_INV_MAX_R: f64 = 1.0 - 1e-15;

fn check_kappa(kappa: f64) -> Result<()> {
    if !kappa.is_finite() || kappa < 0.0 {
        return domain(format!("concentration must be finite and >= 0, got {kappa}"));
    }
    Ok(())
}

/// Partial sums of `Σ_k (-1)^k a_k(ν) / x^k`, the bracket of the Hankel
/// expansion `I_ν(x) ≈ e^x / √(2πx) · S_ν(x)`. Returns the individual terms so
/// that callers can difference two orders without cancellation.
fn hankel_terms(order: u32, x: f64) -> Vec<f64> {
    let mu = 4.0 * f64::from(order) * f64::from(order);
    let mut terms = Vec::with_capacity(40);
    let mut t = 1.0;
    terms.push(t);
    for k in 1..200u32 {
        let odd = f64::from(2 * k - 1);
        let next = -t * (mu - odd * odd) / (8.0 * f64::from(k) * x);
        if next.abs() >= t.abs() && next != 0.0 {
            // divergent tail of the asymptotic series
            break;
        }
        t = next;
        if t == 0.0 {
            break;
        }
        terms.push(t);
        if t.abs() < 1e-18 {
            break;
        }
    }
    terms
}

fn hankel_sum(order: u32, x: f64) -> f64 {
    // sum smallest terms first
    hankel_terms(order, x).iter().rev().sum()
}

fn use_expansion(kappa: f64, n: u32) -> bool {
    let nf = f64::from(n);
    kappa >= ASYMPTOTIC_MIN && 4.0 * nf * nf <= kappa
}

/// Backward sweep returning `[I_1/I_0, I_2/I_1, ..., I_n/I_{n-1}]`.
fn backward_ratios(kappa: f64, n: u32) -> Vec<f64> {
    let n_start = n as usize + (2.0 * kappa).ceil() as usize + 60;
    let nf = n_start as f64;
    // Tail estimate from the lower bound of the ratio.
    let mut r = kappa / (nf + (nf * nf + kappa * kappa).sqrt());
    let mut out = vec![0.0; n as usize];
    for nu in (1..=n_start).rev() {
        r = kappa / (2.0 * nu as f64 + kappa * r);
        if nu <= n as usize {
            out[nu - 1] = r;
        }
    }
    out
}

/// `I_n(κ) / I_0(κ)` for integer order `n >= 1`.
pub fn bessel_ratio(kappa: f64, n: u32) -> Result<f64> {
    check_kappa(kappa)?;
    if n == 0 {
        return domain("bessel_ratio order must be >= 1");
    }
    if kappa == 0.0 {
        return Ok(0.0);
    }
    if use_expansion(kappa, n) {
        return Ok(hankel_sum(n, kappa) / hankel_sum(0, kappa));
    }
    Ok(backward_ratios(kappa, n).iter().product())
}

/// `A(κ) = I_1(κ) / I_0(κ)`, the mean resultant length of `vM(·, κ)`.
pub fn a_func(kappa: f64) -> Result<f64> {
    bessel_ratio(kappa, 1)
}

pub(crate) fn a_raw(kappa: f64) -> f64 {
    if kappa == 0.0 {
        0.0
    } else if kappa == f64::INFINITY {
        1.0
    } else if use_expansion(kappa, 1) {
        hankel_sum(1, kappa) / hankel_sum(0, kappa)
    } else {
        backward_ratios(kappa, 1)[0]
    }
}

/// `1 - A(κ)`, accurate to full relative precision even when `A(κ)` rounds
/// to one.
pub fn a_complement(kappa: f64) -> Result<f64> {
    check_kappa(kappa)?;
    Ok(complement_raw(kappa))
}

pub(crate) fn complement_raw(kappa: f64) -> f64 {
    if kappa == f64::INFINITY {
        return 0.0;
    }
    if !use_expansion(kappa, 1) {
        return 1.0 - a_raw(kappa);
    }
    let t0 = hankel_terms(0, kappa);
    let t1 = hankel_terms(1, kappa);
    let len = t0.len().max(t1.len());
    let diff: f64 = (0..len)
        .rev()
        .map(|k| t0.get(k).copied().unwrap_or(0.0) - t1.get(k).copied().unwrap_or(0.0))
        .sum();
    diff / hankel_sum(0, kappa)
}

/// `A'(κ) = 1 - A(κ)(A(κ) + 1/κ)`; strictly positive for every κ > 0.
pub fn a_deriv(kappa: f64) -> Result<f64> {
    check_kappa(kappa)?;
    if kappa == 0.0 {
        return domain("a_deriv requires kappa > 0");
    }
    Ok(deriv_raw(kappa))
}

fn deriv_raw(kappa: f64) -> f64 {
    if kappa < 1e-3 {
        // series: 1/2 - 3κ²/16 + ...
        let k2 = kappa * kappa;
        return 0.5 - 3.0 * k2 / 16.0 + 5.0 * k2 * k2 / 96.0;
    }
    let c = complement_raw(kappa);
    c * (2.0 - c) - (1.0 - c) / kappa
}

/// `ln I_0(κ)`. Used for normalized densities.
pub fn ln_i0(kappa: f64) -> Result<f64> {
    check_kappa(kappa)?;
    if kappa >= ASYMPTOTIC_MIN {
        return Ok(kappa - 0.5 * (2.0 * std::f64::consts::PI * kappa).ln() + hankel_sum(0, kappa).ln());
    }
    let q = kappa * kappa / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..500 {
        let kf = f64::from(k);
        term *= q / (kf * kf);
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    Ok(sum.ln())
}

/// Inverse of [`a_func`]: the concentration whose mean resultant length is `r`.
///
/// Inputs above [`A_INV_MAX_R`] are clamped.
pub fn a_inv(r: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return domain(format!("a_inv requires 0 <= r < 1, got {r}"));
    }
    Ok(kappa_from_complement(1.0 - r.min(A_INV_MAX_R)))
}

/// Solves `1 - A(κ) = target` for κ. `target` in `(0, 1]`; `target >= 1`
/// yields 0 and `target <= 0` yields infinity.
pub(crate) fn kappa_from_complement(target: f64) -> f64 {
    if target >= 1.0 {
        return 0.0;
    }
    if target <= 0.0 {
        return f64::INFINITY;
    }
    let r = 1.0 - target;
    // A(κ) < κ/2 and A(κ) > (√(κ²+1) - 1)/κ bracket the root.
    let mut lo = 2.0 * r * 0.999_999;
    let mut hi = 2.0 * r / (target * (2.0 - target)) * 1.000_001;
    if lo > hi {
        lo = hi * 0.5;
    }
    let mut kappa = initial_guess(r).clamp(lo, hi);
    for _ in 0..200 {
        let g = complement_raw(kappa) - target;
        if g == 0.0 {
            return kappa;
        }
        // complement decreases in κ
        if g > 0.0 {
            lo = kappa;
        } else {
            hi = kappa;
        }
        let d = deriv_raw(kappa);
        let mut next = if d > 0.0 { kappa + g / d } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = (lo * hi).sqrt();
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
        }
        if (next - kappa).abs() <= 1e-15 * kappa || hi - lo <= 1e-15 * hi {
            return next;
        }
        kappa = next;
    }
    kappa
}

/// Piecewise approximation of `A^{-1}` used to seed the root finder.
fn initial_guess(r: f64) -> f64 {
    if r < 0.53 {
        2.0 * r + r.powi(3) + 5.0 * r.powi(5) / 6.0
    } else if r < 0.85 {
        -0.4 + 1.39 * r + 0.43 / (1.0 - r)
    } else {
        1.0 / (r.powi(3) - 4.0 * r * r + 3.0 * r)
    }
}
