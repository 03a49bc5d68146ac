//! `quasirev` runs the numerical studies and writes one CSV per curve.
//!
//! ```text
//! quasirev --experiment <name|all> [--config <path>] [--out <dir>] [--threads <n>] [--seed <u64>]
//! ```
//!
//! Experiments: `convergence`, `error_field`, `interior_rate`,
//! `condition_sweep`, `infsup_sweep`, `perturbation_sweep`,
//! `parameter_coupling`, or `all`.
//!
//! The config is TOML; every key is optional and unknown keys are rejected.
//!
//! ```toml
//! problem = "cauchy"          # or "unique_continuation" / "uc"
//! variant = "regularized"     # "l2_stabilized", "unregularized"
//! k = 1
//! m = [1, 2]
//! n = [1, 5]
//! epsilon = [1e-4]
//! gamma = 0.5
//! meshes = [8, 16, 32, 64, 128]
//! solution = "hadamard"       # "bilinear", "sin_sin"
//! gamma0 = ["left", "bottom"]
//! omega = { x0 = 0.25, x1 = 0.75, y0 = 0.25, y1 = 0.75 }
//! g = { x0 = 0.0, x1 = 0.8, y0 = 0.0, y1 = 0.5 }
//! field_mesh = 128
//!
//! [noise]
//! amplitudes = [0.0, 1e-4, 1e-3, 1e-2]
//! seed = 0
//!
//! [coupling]
//! rule = "standard"           # or "l2stab"
//! s = 2.0
//!
//! [thresholds]
//! min_rate = 0.25
//! max_condition_spread = 4.0
//! max_infsup_spread = 2.0
//! ```
//!
//! CSV header, shared by every experiment except `error_field`:
//! `h,dofs_primal,dofs_dual,epsilon,gamma,n,delta,l2_omega,h1_omega,l2_g,h1_g,jump,triple,kappa2,sigma_min`.
//! Unmeasured cells are empty. Error fields are `x,y,error` per vertex.
//!
//! Exit status: 0 on success, 2 for configuration errors (including mesh
//! caps of 128 for solves and 32 for spectral studies), 3 for numerical
//! failures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use quasirev::experiments::{run_experiment, write_summary, Experiment, ExperimentConfig};
use quasirev::{Error, Execution};

#[derive(Debug, Parser)]
#[command(name = "quasirev", version, about = "Mixed quasi-reversibility experiments")]
struct Args {
    /// TOML experiment configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Experiment name, or `all`.
    #[arg(long)]
    experiment: String,

    /// Output directory for CSV files and summary.txt.
    #[arg(long, default_value = "out")]
    out: PathBuf,

    /// Worker threads (0 picks the number of cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,

    /// Overrides `noise.seed`.
    #[arg(long)]
    seed: Option<u64>,
}

fn run(args: &Args) -> Result<bool, Error> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.noise.seed = seed;
    }
    let experiments: Vec<Experiment> = if args.experiment == "all" {
        Experiment::ALL.to_vec()
    } else {
        vec![args.experiment.parse()?]
    };
    let exec = setup_threads(args.threads)?;

    let mut summaries = Vec::new();
    for e in experiments {
        let s = run_experiment(&cfg, e, &args.out, exec)?;
        print!("{}", s.text);
        summaries.push(s);
    }
    let path = write_summary(&args.out, &summaries)?;
    println!("summary written to {}", path.display());
    Ok(summaries.iter().all(|s| s.passed))
}

#[cfg(feature = "parallel")]
fn setup_threads(threads: usize) -> Result<Execution, Error> {
    if threads == 1 {
        return Ok(Execution::Sequential);
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    Ok(Execution::Parallel)
}

#[cfg(not(feature = "parallel"))]
fn setup_threads(_threads: usize) -> Result<Execution, Error> {
    Ok(Execution::Sequential)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("some thresholds were missed");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
