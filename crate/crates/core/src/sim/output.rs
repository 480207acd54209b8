//! CSV traces, summary and manifest files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::Result;

use super::{MonteCarloSummary, TrialConfig};

/// Paths written by [`write_outputs`].
#[derive(Debug, Clone)]
pub struct OutputFiles {
    pub traces: Vec<PathBuf>,
    pub summary: PathBuf,
    pub manifest: PathBuf,
}

fn sci(v: f64) -> String {
    format!("{v:.8e}")
}

/// Renders one `trace_<alg>.csv`.
pub fn trace_csv(s: &super::AlgorithmSummary) -> String {
    let mut out = String::from("t,theta_err_mean,theta_err_std,pos_err_mean,pos_err_std\n");
    for k in 0..s.t.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            sci(s.t[k]),
            sci(s.theta_mean[k]),
            sci(s.theta_std[k]),
            sci(s.pos_mean[k]),
            sci(s.pos_std[k])
        );
    }
    out
}

pub fn summary_text(cfg: &TrialConfig, mc: &MonteCarloSummary) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# time-averaged errors over t in [{}, {}] s; {} trials, seed {}",
        cfg.window_start, cfg.window_end, cfg.trials, cfg.seed
    );
    let _ = writeln!(
        out,
        "algorithm,successes,failures,theta_err_mean,theta_err_std,pos_err_mean,pos_err_std"
    );
    for s in &mc.algorithms {
        let w = s.window(cfg.window_start, cfg.window_end);
        let cols = match w {
            Some(w) => format!(
                "{},{},{},{}",
                sci(w.theta_mean),
                sci(w.theta_std),
                sci(w.pos_mean),
                sci(w.pos_std)
            ),
            None => "nan,nan,nan,nan".to_string(),
        };
        let _ = writeln!(
            out,
            "{},{},{},{}",
            s.algorithm.name(),
            s.successes,
            s.failures.len(),
            cols
        );
    }
    for s in &mc.algorithms {
        for (trial, f) in &s.failures {
            let _ = writeln!(
                out,
                "# failure {} trial {} step {}: {}",
                s.algorithm.name(),
                trial,
                f.step,
                f.reason
            );
        }
    }
    out
}

pub fn manifest_text(cfg: &TrialConfig) -> String {
    format!(
        "# locsim {}\n# seed {}\n# steps {} obs_every {}\n{}",
        env!("CARGO_PKG_VERSION"),
        cfg.seed,
        cfg.steps(),
        cfg.obs_every().map_or("none".to_string(), |m| m.to_string()),
        cfg.to_text()
    )
}

/// Writes traces, summary and manifest into `dir`, creating it if needed.
pub fn write_outputs(dir: &Path, cfg: &TrialConfig, mc: &MonteCarloSummary) -> Result<OutputFiles> {
    fs::create_dir_all(dir)?;
    let mut traces = Vec::new();
    for s in &mc.algorithms {
        let p = dir.join(format!("trace_{}.csv", s.algorithm.name()));
        fs::write(&p, trace_csv(s))?;
        traces.push(p);
    }
    let summary = dir.join("summary.txt");
    fs::write(&summary, summary_text(cfg, mc))?;
    let manifest = dir.join("manifest.txt");
    fs::write(&manifest, manifest_text(cfg))?;
    Ok(OutputFiles {
        traces,
        summary,
        manifest,
    })
}
