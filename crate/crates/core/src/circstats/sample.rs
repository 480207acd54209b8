use rand::distr::Distribution;
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;

use super::{wrap_angle, VonMises};

/// Above this concentration the Gaussian `N(μ, 1/κ)` is used directly; the
/// two laws differ by `O(κ⁻²)` in their moments there.
const GAUSSIAN_SAMPLER_MIN: f64 = 1e6;

impl Distribution<f64> for VonMises {
    /// Draws an angle in `[-π, π)`.
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let kappa = self.kappa();
        if kappa == 0.0 {
            return wrap_angle(rng.random::<f64>() * 2.0 * PI - PI);
        }
        if kappa > GAUSSIAN_SAMPLER_MIN {
            let z: f64 = rng.sample(StandardNormal);
            return wrap_angle(self.mu() + z / kappa.sqrt());
        }
        wrap_angle(self.mu() + best_fisher(kappa, rng))
    }
}

/// Best & Fisher (1979) rejection sampler for `vM(0, κ)`.
fn best_fisher<R: Rng + ?Sized>(kappa: f64, rng: &mut R) -> f64 {
    let tau = 1.0 + (1.0 + 4.0 * kappa * kappa).sqrt();
    let rho = (tau - (2.0 * tau).sqrt()) / (2.0 * kappa);
    let r = (1.0 + rho * rho) / (2.0 * rho);
    loop {
        let u1: f64 = rng.random();
        let u2: f64 = rng.random();
        let u3: f64 = rng.random();
        let z = (PI * u1).cos();
        let f = ((1.0 + r * z) / (r + z)).clamp(-1.0, 1.0);
        let c = kappa * (r - f);
        if c * (2.0 - c) - u2 > 0.0 || (c / u2).ln() + 1.0 - c >= 0.0 {
            let theta = f.acos();
            return if u3 > 0.5 { theta } else { -theta };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circstats::bessel::a_func;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn moments(d: &VonMises, n: usize, seed: u64) -> ((f64, f64), (f64, f64)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut c1, mut s1, mut c2, mut s2) = (0.0, 0.0, 0.0, 0.0);
        for _ in 0..n {
            let t: f64 = d.sample(&mut rng);
            assert!((-PI..PI).contains(&t));
            c1 += t.cos();
            s1 += t.sin();
            c2 += (2.0 * t).cos();
            s2 += (2.0 * t).sin();
        }
        let nf = n as f64;
        ((c1 / nf, s1 / nf), (c2 / nf, s2 / nf))
    }

    #[test]
    fn concentrated_samples_stay_near_mean() {
        let d = VonMises::new(0.0, 1e8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10_000 {
            let t: f64 = d.sample(&mut rng);
            assert!(t.abs() < 1e-3);
        }
    }

    #[test]
    fn uniform_has_vanishing_resultant() {
        let ((c, s), _) = moments(&VonMises::uniform(), 100_000, 2);
        assert!(c.hypot(s) < 0.01);
    }

    #[test]
    fn first_moment_matches_resultant_length() {
        let d = VonMises::new(1.0, 5.0).unwrap();
        let n = 100_000;
        let ((c, s), _) = moments(&d, n, 3);
        let a = a_func(5.0).unwrap();
        // per-component standard error bounded by sqrt(1/n)
        let se = (1.0 / n as f64).sqrt();
        assert!((c - a * 1f64.cos()).abs() < 3.0 * se);
        assert!((s - a * 1f64.sin()).abs() < 3.0 * se);
    }

    #[test]
    fn moderate_kappa_on_both_sides_of_sampler_switch() {
        for &k in &[0.5, 30.0, 2e6] {
            let d = VonMises::new(-2.0, k).unwrap();
            let ((c, s), _) = moments(&d, 50_000, 4);
            let a = a_func(k).unwrap();
            let se = (1.0 / 50_000f64).sqrt();
            assert!((c - a * (-2f64).cos()).abs() < 4.0 * se, "{k}");
            assert!((s - a * (-2f64).sin()).abs() < 4.0 * se, "{k}");
        }
    }
}
