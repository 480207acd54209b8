//! Unicycle ground truth, landmark sensor, Monte Carlo runner and error
//! metrics.
//!
//! Every trial draws its noise from ChaCha streams keyed by
//! `(seed, trial, source)`, and all localizers in a trial consume the same
//! truth and observations.

mod config;
mod output;

pub use config::TrialConfig;
pub use output::{write_outputs, OutputFiles};

use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::baselines::{ekf_step, lgekf_step, BearingRange, EkfBelief, Se2, Se2Belief};
use crate::circstats::{angle_diff, wrap_angle, VonMises};
use crate::circular_loc::{self, CircularBelief, Coverage, ModuleBank};
use crate::error::{Error, Result};
use crate::mixture_loc::{self, MixtureBelief};
use crate::model::{Landmark, NoiseParams, OdometryInput};
use nalgebra::Matrix3;

/// Range samples are floored here to keep them positive.
pub const MIN_RANGE: f64 = 1e-6;

/// Planar pose with wrapped heading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose2 {
    pub theta: f64,
    pub x: f64,
    pub y: f64,
}

impl Pose2 {
    pub fn new(theta: f64, x: f64, y: f64) -> Self {
        Self {
            theta: wrap_angle(theta),
            x,
            y,
        }
    }
}

/// Distribution of the true per-step heading noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeadingNoise {
    /// `vM(0, 1/(σ_ω²Δt²))`, the model every filter assumes.
    VonMises,
    /// `N(0, σ_ω²Δt²)`.
    Gaussian,
}

impl HeadingNoise {
    pub fn name(&self) -> &'static str {
        match self {
            Self::VonMises => "von_mises",
            Self::Gaussian => "gaussian",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        match s {
            "von_mises" => Ok(Self::VonMises),
            "gaussian" => Ok(Self::Gaussian),
            _ => Err(Error::Config(format!("unknown heading noise '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    Mixture,
    Circular,
    Ekf,
    Lgekf,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Self::Mixture, Self::Circular, Self::Ekf, Self::Lgekf];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Mixture => "mixture",
            Self::Circular => "circular",
            Self::Ekf => "ekf",
            Self::Lgekf => "lgekf",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm '{s}'")))
    }
}

/// Independent noise streams of one trial.
pub struct NoiseStreams {
    heading: ChaCha20Rng,
    speed: ChaCha20Rng,
    bearing: ChaCha20Rng,
    range: ChaCha20Rng,
}

impl NoiseStreams {
    pub fn new(seed: u64, trial: u64) -> Self {
        let stream = |source: u64| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream((trial << 8) | source);
            rng
        };
        Self {
            heading: stream(0),
            speed: stream(1),
            bearing: stream(2),
            range: stream(3),
        }
    }
}

/// One step of the noisy unicycle.
pub fn truth_step(
    p: &Pose2,
    u: &OdometryInput,
    n: &NoiseParams,
    heading_noise: HeadingNoise,
    rng: &mut NoiseStreams,
) -> Result<Pose2> {
    if !(u.dt > 0.0) {
        return Err(Error::Domain(format!("time step must be > 0, got {}", u.dt)));
    }
    let var_h = n.sigma_omega2 * u.dt * u.dt;
    let w = if var_h > 0.0 {
        match heading_noise {
            HeadingNoise::VonMises => VonMises::new(0.0, 1.0 / var_h)?.sample(&mut rng.heading),
            HeadingNoise::Gaussian => var_h.sqrt() * rng.heading.sample::<f64, _>(StandardNormal),
        }
    } else {
        0.0
    };
    let nv = if n.sigma_v2 > 0.0 {
        n.sigma_v2.sqrt() * rng.speed.sample::<f64, _>(StandardNormal)
    } else {
        0.0
    };
    let (s, c) = p.theta.sin_cos();
    let step = (u.v + nv) * u.dt;
    Ok(Pose2::new(p.theta + u.omega * u.dt + w, p.x + step * c, p.y + step * s))
}

/// Noisy relative bearing and distance of the landmark.
pub fn sense(p: &Pose2, lm: &Landmark, n: &NoiseParams, rng: &mut NoiseStreams) -> Result<BearingRange> {
    let (dx, dy) = (lm.x - p.x, lm.y - p.y);
    let dist = dx.hypot(dy);
    if dist < 1e-12 {
        return Err(Error::Geometry("robot coincides with the landmark".into()));
    }
    let nb = VonMises::new(0.0, n.kappa_b)?.sample(&mut rng.bearing);
    let nr = if n.sigma_r2 > 0.0 {
        n.sigma_r2.sqrt() * rng.range.sample::<f64, _>(StandardNormal)
    } else {
        0.0
    };
    Ok(BearingRange {
        bearing: wrap_angle(dy.atan2(dx) - p.theta + nb),
        range: (dist + nr).max(MIN_RANGE),
    })
}

/// Per-step errors of one localizer in one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorTrace {
    pub t: Vec<f64>,
    /// `|wrap(θ̄ - θ)|`, in `[0, π]`.
    pub theta_err: Vec<f64>,
    /// Euclidean position error.
    pub pos_err: Vec<f64>,
}

/// Why a localizer stopped.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub step: usize,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub truth: Vec<Pose2>,
    pub traces: Vec<(Algorithm, std::result::Result<ErrorTrace, Failure>)>,
}

enum Filter {
    Mixture(MixtureBelief),
    Circular(CircularBelief),
    Ekf(EkfBelief),
    Lgekf(Se2Belief),
}

impl Filter {
    fn init(alg: Algorithm, cfg: &TrialConfig) -> Result<Self> {
        let p = cfg.init_pose;
        let heading = VonMises::new(p.theta, cfg.init_kappa)?;
        let cov = Matrix3::from_diagonal(&nalgebra::Vector3::from(cfg.init_ekf_cov));
        Ok(match alg {
            Algorithm::Mixture => Self::Mixture(MixtureBelief::new(heading, p.x, p.y, cfg.init_sigma2)?),
            Algorithm::Circular => {
                let bank = ModuleBank::geometric(cfg.lambda1, cfg.ratio, cfg.modules)?;
                let coverage = Coverage::new(cfg.coverage_min, cfg.coverage_max)?;
                Self::Circular(
                    CircularBelief::from_position(heading, p.x, p.y, cfg.init_sigma2, bank, coverage)?
                        .with_resolution(cfg.resolution)?,
                )
            }
            Algorithm::Ekf => Self::Ekf(EkfBelief::new(p.theta, p.x, p.y, cov)?),
            Algorithm::Lgekf => Self::Lgekf(Se2Belief::new(Se2::from_pose(p.theta, p.x, p.y), cov)?),
        })
    }

    fn step(&mut self, u: &OdometryInput, z: Option<&BearingRange>, cfg: &TrialConfig) -> Result<()> {
        let (lm, n, rule) = (&cfg.landmark, &cfg.noise, cfg.heading_rule);
        match self {
            Self::Mixture(b) => {
                let mut next = mixture_loc::time_update(b, u, n)?;
                if let Some(z) = z {
                    next = mixture_loc::obsv_bearing_distance_with(&next, lm, z.bearing, z.range, n, rule)?;
                }
                *b = next;
            }
            Self::Circular(b) => {
                let mut next = circular_loc::time_update(b, u, n)?;
                if let Some(z) = z {
                    next = circular_loc::obsv_bearing_distance_with(&next, lm, z.bearing, z.range, n, rule)?;
                }
                *b = next;
            }
            Self::Ekf(b) => *b = ekf_step(b, u, z, lm, n)?,
            Self::Lgekf(b) => *b = lgekf_step(b, u, z, lm, n)?,
        }
        Ok(())
    }

    fn estimate(&self) -> Result<Pose2> {
        Ok(match self {
            Self::Mixture(b) => Pose2::new(b.heading.mu(), b.x.mean, b.y.mean),
            Self::Circular(b) => {
                let (x, y) = b.position()?;
                Pose2::new(b.heading.mu(), x, y)
            }
            Self::Ekf(b) => Pose2::new(b.mean[0], b.mean[1], b.mean[2]),
            Self::Lgekf(b) => {
                let (t, x, y) = b.mean.pose();
                Pose2::new(t, x, y)
            }
        })
    }
}

fn errors(est: &Pose2, truth: &Pose2) -> (f64, f64) {
    (
        angle_diff(est.theta, truth.theta).abs(),
        (est.x - truth.x).hypot(est.y - truth.y),
    )
}

struct Slot {
    alg: Algorithm,
    filter: Option<Filter>,
    trace: ErrorTrace,
    failure: Option<Failure>,
}

impl Slot {
    fn record(&mut self, step: usize, t: f64, truth: &Pose2) {
        let Some(f) = &self.filter else { return };
        match f.estimate() {
            Ok(est) => {
                let (e_t, e_p) = errors(&est, truth);
                self.trace.t.push(t);
                self.trace.theta_err.push(e_t);
                self.trace.pos_err.push(e_p);
            }
            Err(e) => self.fail(step, e),
        }
    }

    fn fail(&mut self, step: usize, e: Error) {
        self.filter = None;
        self.failure = Some(Failure {
            step,
            reason: e.to_string(),
        });
    }
}

/// Runs every selected localizer on one noise realization.
pub fn run_trial(cfg: &TrialConfig, trial: u64) -> Result<TrialOutcome> {
    let u = cfg.odometry();
    let mut rng = NoiseStreams::new(cfg.seed, trial);
    let mut truth = cfg.init_pose;
    let mut path = vec![truth];
    let mut slots: Vec<Slot> = cfg
        .algorithms
        .iter()
        .map(|&alg| {
            let mut slot = Slot {
                alg,
                filter: None,
                trace: ErrorTrace {
                    t: Vec::new(),
                    theta_err: Vec::new(),
                    pos_err: Vec::new(),
                },
                failure: None,
            };
            match Filter::init(alg, cfg) {
                Ok(f) => slot.filter = Some(f),
                Err(e) => slot.fail(0, e),
            }
            slot
        })
        .collect();
    for s in &mut slots {
        s.record(0, 0.0, &truth);
    }
    let every = cfg.obs_every();
    for k in 1..=cfg.steps() {
        truth = truth_step(&truth, &u, &cfg.noise, cfg.truth_heading, &mut rng)?;
        path.push(truth);
        let z = match every {
            Some(m) if k % m == 0 => Some(sense(&truth, &cfg.landmark, &cfg.noise, &mut rng)?),
            _ => None,
        };
        let t = k as f64 * cfg.dt;
        for s in &mut slots {
            if let Some(f) = &mut s.filter {
                if let Err(e) = f.step(&u, z.as_ref(), cfg) {
                    s.fail(k, e);
                    continue;
                }
            }
            s.record(k, t, &truth);
        }
    }
    Ok(TrialOutcome {
        truth: path,
        traces: slots
            .into_iter()
            .map(|s| (s.alg, s.failure.map_or(Ok(s.trace), Err)))
            .collect(),
    })
}

/// Per-time statistics of one localizer over the successful trials.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmSummary {
    pub algorithm: Algorithm,
    pub t: Vec<f64>,
    pub theta_mean: Vec<f64>,
    pub theta_std: Vec<f64>,
    pub pos_mean: Vec<f64>,
    pub pos_std: Vec<f64>,
    pub successes: usize,
    /// `(trial, failure)` pairs.
    pub failures: Vec<(u64, Failure)>,
}

/// Window averages of the per-time statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowStats {
    pub theta_mean: f64,
    pub theta_std: f64,
    pub pos_mean: f64,
    pub pos_std: f64,
}

impl AlgorithmSummary {
    /// Averages over `t ∈ [start, end]`; `None` without data in the window.
    pub fn window(&self, start: f64, end: f64) -> Option<WindowStats> {
        let tol = 1e-9;
        let idx: Vec<usize> = (0..self.t.len())
            .filter(|&i| self.t[i] >= start - tol && self.t[i] <= end + tol)
            .collect();
        if idx.is_empty() {
            return None;
        }
        let avg = |v: &[f64]| idx.iter().map(|&i| v[i]).sum::<f64>() / idx.len() as f64;
        Some(WindowStats {
            theta_mean: avg(&self.theta_mean),
            theta_std: avg(&self.theta_std),
            pos_mean: avg(&self.pos_mean),
            pos_std: avg(&self.pos_std),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloSummary {
    pub algorithms: Vec<AlgorithmSummary>,
}

impl MonteCarloSummary {
    pub fn get(&self, alg: Algorithm) -> Option<&AlgorithmSummary> {
        self.algorithms.iter().find(|a| a.algorithm == alg)
    }
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Runs `cfg.trials` trials in parallel and aggregates them in trial order.
pub fn run_monte_carlo(cfg: &TrialConfig) -> Result<MonteCarloSummary> {
    cfg.validate()?;
    let outcomes: Vec<TrialOutcome> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|i| run_trial(cfg, i))
        .collect::<Result<_>>()?;
    let steps = cfg.steps();
    let algorithms = cfg
        .algorithms
        .iter()
        .enumerate()
        .map(|(j, &alg)| {
            let mut ok = Vec::new();
            let mut failures = Vec::new();
            for (i, o) in outcomes.iter().enumerate() {
                match &o.traces[j].1 {
                    Ok(tr) => ok.push(tr),
                    Err(f) => failures.push((i as u64, f.clone())),
                }
            }
            let mut s = AlgorithmSummary {
                algorithm: alg,
                t: Vec::new(),
                theta_mean: Vec::new(),
                theta_std: Vec::new(),
                pos_mean: Vec::new(),
                pos_std: Vec::new(),
                successes: ok.len(),
                failures,
            };
            if !ok.is_empty() {
                for k in 0..=steps {
                    let th: Vec<f64> = ok.iter().map(|tr| tr.theta_err[k]).collect();
                    let ps: Vec<f64> = ok.iter().map(|tr| tr.pos_err[k]).collect();
                    let (tm, ts) = mean_std(&th);
                    let (pm, pstd) = mean_std(&ps);
                    s.t.push(ok[0].t[k]);
                    s.theta_mean.push(tm);
                    s.theta_std.push(ts);
                    s.pos_mean.push(pm);
                    s.pos_std.push(pstd);
                }
            }
            s
        })
        .collect();
    Ok(MonteCarloSummary { algorithms })
}
