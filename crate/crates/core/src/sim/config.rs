//! Flat `section.key = value` configuration.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{HeadingRule, Landmark, NoiseParams, OdometryInput};

use super::{Algorithm, HeadingNoise, Pose2};

/// Everything needed to reproduce a Monte Carlo experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialConfig {
    pub dt: f64,
    pub duration: f64,
    /// Observations per second; zero disables observations.
    pub obs_rate: f64,
    pub algorithms: Vec<Algorithm>,
    pub trials: usize,
    pub seed: u64,
    pub omega: f64,
    pub v: f64,
    pub noise: NoiseParams,
    pub truth_heading: HeadingNoise,
    pub landmark: Landmark,
    pub init_pose: Pose2,
    pub init_kappa: f64,
    pub init_sigma2: f64,
    pub init_ekf_cov: [f64; 3],
    pub lambda1: f64,
    pub ratio: f64,
    pub modules: usize,
    pub coverage_min: f64,
    pub coverage_max: f64,
    pub resolution: f64,
    pub heading_rule: HeadingRule,
    pub window_start: f64,
    pub window_end: f64,
}

impl Default for TrialConfig {
    fn default() -> Self {
        Self {
            dt: 0.02,
            duration: 30.0,
            obs_rate: 2.5,
            algorithms: Algorithm::ALL.to_vec(),
            trials: 50,
            seed: 1,
            omega: 0.2,
            v: 0.1,
            noise: NoiseParams {
                sigma_omega2: 10.0,
                sigma_v2: 1e-4,
                kappa_nu_theta: 100.0,
                sigma2_ox: 0.01,
                sigma2_oy: 0.01,
                kappa_b: 500.0,
                sigma_r2: 1e-4,
            },
            truth_heading: HeadingNoise::VonMises,
            landmark: Landmark::new(2.0, 3.0),
            init_pose: Pose2::new(0.0, 0.0, 0.0),
            init_kappa: 100.0,
            init_sigma2: 0.01,
            init_ekf_cov: [0.01; 3],
            lambda1: 2.5,
            ratio: 1.5,
            modules: 4,
            coverage_min: -5.0,
            coverage_max: 5.0,
            resolution: crate::circular_loc::DEFAULT_RESOLUTION,
            heading_rule: HeadingRule::Convolution,
            window_start: 10.0,
            window_end: 30.0,
        }
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>()
        .map_err(|_| Error::Config(format!("{key}: cannot parse '{v}' as a number")))
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.parse::<usize>()
        .map_err(|_| Error::Config(format!("{key}: cannot parse '{v}' as a non-negative integer")))
}

impl TrialConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Parses the text format. Unset keys keep their defaults; unknown or
    /// repeated keys are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen = BTreeSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(Error::Config(format!("line {}: duplicate key {key}", lineno + 1)));
            }
            cfg.set(key, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, v: &str) -> Result<()> {
        let f = || parse_f64(key, v);
        match key {
            "sim.dt" => self.dt = f()?,
            "sim.duration" => self.duration = f()?,
            "sim.obs_rate" => self.obs_rate = f()?,
            "sim.algorithms" => {
                self.algorithms = v
                    .split(',')
                    .map(|s| Algorithm::from_name(s.trim()))
                    .collect::<Result<_>>()?
            }
            "run.trials" => self.trials = parse_usize(key, v)?,
            "run.seed" => {
                self.seed = v
                    .parse()
                    .map_err(|_| Error::Config(format!("{key}: cannot parse '{v}' as u64")))?
            }
            "odometry.omega" => self.omega = f()?,
            "odometry.v" => self.v = f()?,
            "noise.sigma_omega2" => self.noise.sigma_omega2 = f()?,
            "noise.sigma_v2" => self.noise.sigma_v2 = f()?,
            "noise.kappa_nu_theta" => self.noise.kappa_nu_theta = f()?,
            "noise.sigma2_ox" => self.noise.sigma2_ox = f()?,
            "noise.sigma2_oy" => self.noise.sigma2_oy = f()?,
            "noise.kappa_b" => self.noise.kappa_b = f()?,
            "noise.sigma_r2" => self.noise.sigma_r2 = f()?,
            "noise.truth_heading" => self.truth_heading = HeadingNoise::from_name(v)?,
            "landmark.x" => self.landmark.x = f()?,
            "landmark.y" => self.landmark.y = f()?,
            "init.theta" => self.init_pose = Pose2::new(f()?, self.init_pose.x, self.init_pose.y),
            "init.x" => self.init_pose.x = f()?,
            "init.y" => self.init_pose.y = f()?,
            "init.kappa" => self.init_kappa = f()?,
            "init.sigma2" => self.init_sigma2 = f()?,
            "init.ekf_cov_theta" => self.init_ekf_cov[0] = f()?,
            "init.ekf_cov_x" => self.init_ekf_cov[1] = f()?,
            "init.ekf_cov_y" => self.init_ekf_cov[2] = f()?,
            "grid.lambda1" => self.lambda1 = f()?,
            "grid.ratio" => self.ratio = f()?,
            "grid.modules" => self.modules = parse_usize(key, v)?,
            "grid.coverage_min" => self.coverage_min = f()?,
            "grid.coverage_max" => self.coverage_max = f()?,
            "grid.resolution" => self.resolution = f()?,
            "filter.heading_rule" => {
                self.heading_rule = match v {
                    "convolution" => HeadingRule::Convolution,
                    "a_product" => HeadingRule::AProduct,
                    _ => return Err(Error::Config(format!("{key}: unknown rule '{v}'"))),
                }
            }
            "metrics.window_start" => self.window_start = f()?,
            "metrics.window_end" => self.window_end = f()?,
            _ => return Err(Error::Config(format!("unknown key {key}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return bad(format!("sim.dt must be > 0, got {}", self.dt));
        }
        if !(self.duration > 0.0) || !self.duration.is_finite() {
            return bad(format!("sim.duration must be > 0, got {}", self.duration));
        }
        if !(self.obs_rate >= 0.0) || self.obs_rate > 1.0 / self.dt * (1.0 + 1e-12) {
            return bad(format!("sim.obs_rate must lie in [0, 1/dt], got {}", self.obs_rate));
        }
        if self.obs_rate > 0.0 {
            let every = 1.0 / (self.obs_rate * self.dt);
            if (every - every.round()).abs() > 1e-9 * every {
                return bad(format!("1/(obs_rate*dt) = {every} is not an integer step count"));
            }
        }
        if self.algorithms.is_empty() {
            return bad("sim.algorithms is empty".into());
        }
        if self.trials == 0 {
            return bad("run.trials must be >= 1".into());
        }
        self.noise.validate().map_err(|e| Error::Config(e.to_string()))?;
        if !(self.init_kappa > 0.0) || !(self.init_sigma2 > 0.0) || self.init_ekf_cov.iter().any(|c| !(*c > 0.0)) {
            return bad("initial concentrations and variances must be > 0".into());
        }
        if !(self.coverage_max > self.coverage_min) {
            return bad("grid.coverage_max must exceed grid.coverage_min".into());
        }
        if !(self.resolution > 0.0) {
            return bad("grid.resolution must be > 0".into());
        }
        if !(self.window_end >= self.window_start) {
            return bad("metrics.window_end must be >= metrics.window_start".into());
        }
        OdometryInput::new(self.omega, self.v, self.dt)?;
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.duration / self.dt).round() as usize
    }

    /// Steps between observations; `None` when observations are disabled.
    pub fn obs_every(&self) -> Option<usize> {
        (self.obs_rate > 0.0).then(|| (1.0 / (self.obs_rate * self.dt)).round() as usize)
    }

    pub fn odometry(&self) -> OdometryInput {
        OdometryInput {
            omega: self.omega,
            v: self.v,
            dt: self.dt,
        }
    }

    /// Canonical text form; parsing it yields the same config.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let names: Vec<&str> = self.algorithms.iter().map(|a| a.name()).collect();
        let rule = match self.heading_rule {
            HeadingRule::Convolution => "convolution",
            HeadingRule::AProduct => "a_product",
        };
        let lines: Vec<(&str, String)> = vec![
            ("sim.dt", self.dt.to_string()),
            ("sim.duration", self.duration.to_string()),
            ("sim.obs_rate", self.obs_rate.to_string()),
            ("sim.algorithms", names.join(",")),
            ("run.trials", self.trials.to_string()),
            ("run.seed", self.seed.to_string()),
            ("odometry.omega", self.omega.to_string()),
            ("odometry.v", self.v.to_string()),
            ("noise.sigma_omega2", self.noise.sigma_omega2.to_string()),
            ("noise.sigma_v2", self.noise.sigma_v2.to_string()),
            ("noise.kappa_nu_theta", self.noise.kappa_nu_theta.to_string()),
            ("noise.sigma2_ox", self.noise.sigma2_ox.to_string()),
            ("noise.sigma2_oy", self.noise.sigma2_oy.to_string()),
            ("noise.kappa_b", self.noise.kappa_b.to_string()),
            ("noise.sigma_r2", self.noise.sigma_r2.to_string()),
            ("noise.truth_heading", self.truth_heading.name().to_string()),
            ("landmark.x", self.landmark.x.to_string()),
            ("landmark.y", self.landmark.y.to_string()),
            ("init.theta", self.init_pose.theta.to_string()),
            ("init.x", self.init_pose.x.to_string()),
            ("init.y", self.init_pose.y.to_string()),
            ("init.kappa", self.init_kappa.to_string()),
            ("init.sigma2", self.init_sigma2.to_string()),
            ("init.ekf_cov_theta", self.init_ekf_cov[0].to_string()),
            ("init.ekf_cov_x", self.init_ekf_cov[1].to_string()),
            ("init.ekf_cov_y", self.init_ekf_cov[2].to_string()),
            ("grid.lambda1", self.lambda1.to_string()),
            ("grid.ratio", self.ratio.to_string()),
            ("grid.modules", self.modules.to_string()),
            ("grid.coverage_min", self.coverage_min.to_string()),
            ("grid.coverage_max", self.coverage_max.to_string()),
            ("grid.resolution", self.resolution.to_string()),
            ("filter.heading_rule", rule.to_string()),
            ("metrics.window_start", self.window_start.to_string()),
            ("metrics.window_end", self.window_end.to_string()),
        ];
        for (k, v) in lines {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }
}
