use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use circloc::circular_loc::{phase_kappa, ModuleBank};
use circloc::sim::{run_monte_carlo, write_outputs, TrialConfig};
use circloc::Result;

#[derive(Parser)]
#[command(
    name = "locsim",
    version,
    about = "Monte Carlo comparison of circular-statistics localizers"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the Monte Carlo experiment and write traces and summary.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides run.trials.
        #[arg(long)]
        trials: Option<usize>,
        /// Overrides run.seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Parse and check a config, then print derived quantities.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Compare library values with reference computations.
    Oracle {
        /// One of: bessel, a_inv, convolve, multiply, conditioning, speed, readout, constants, all.
        name: String,
    },
}

fn load(path: &Path, trials: Option<usize>, seed: Option<u64>) -> Result<TrialConfig> {
    let mut cfg = TrialConfig::from_file(path)?;
    if let Some(t) = trials {
        cfg.trials = t;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::Run {
            config,
            trials,
            seed,
            out,
        } => {
            let cfg = load(&config, trials, seed)?;
            let start = Instant::now();
            let mc = run_monte_carlo(&cfg)?;
            let files = write_outputs(&out, &cfg, &mc)?;
            eprintln!(
                "{} trials in {:.1} s; wrote {} traces to {}",
                cfg.trials,
                start.elapsed().as_secs_f64(),
                files.traces.len(),
                out.display()
            );
            print!("{}", std::fs::read_to_string(&files.summary)?);
        }
        Cmd::Validate { config } => {
            let cfg = load(&config, None, None)?;
            println!("config ok: {}", config.display());
            println!("steps = {}", cfg.steps());
            match cfg.obs_every() {
                Some(m) => println!("observation every {m} steps"),
                None => println!("observations disabled"),
            }
            println!("heading kappa_w = {}", cfg.noise.heading_kappa_w(cfg.dt));
            let bank = ModuleBank::geometric(cfg.lambda1, cfg.ratio, cfg.modules)?;
            let var = cfg.noise.speed_variance_bound(cfg.v) * cfg.dt * cfg.dt;
            for l in bank.lambdas() {
                println!("module lambda = {l}: phase kappa_w = {}", phase_kappa(*l, var));
            }
            match bank.common_period() {
                Some(p) => println!("common period = {p}"),
                None => println!("common period: none found"),
            }
        }
        Cmd::Oracle { name } => print!("{}", circloc::oracle::report(&name)?),
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse().cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
