//! Experiment runner behind the `adam3` command-line tool.
//!
//! Each subcommand has a library entry point here so it can be driven from
//! tests without spawning a process.

pub mod config;
pub mod output;
pub mod sweep;
pub mod theory_report;

use std::fs;
use std::path::{Path, PathBuf};

use adam3_core::diagnostics::{audit_trace, finite_diff_check, AuditBounds, AuditReport};
use adam3_core::runner::run_optimizer;
use adam3_core::{Error, Method, Point64, RunOptions, StateRetention, TraceRecord64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use config::{ExperimentConfig, GameConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("run diverged at iteration {iteration}")]
    Divergence { iteration: u64 },

    #[error("run failed: {0}")]
    Run(Error),

    #[error("I/O error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("infeasible inputs: {0}")]
    Infeasible(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Config(_) => 2,
            CliError::Divergence { .. } | CliError::Run(_) => 3,
            CliError::Io { .. } => 4,
            CliError::Infeasible(_) => 5,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Infeasible(msg) => CliError::Infeasible(msg),
            Error::Divergence { iteration } => CliError::Divergence { iteration },
            Error::DegenerateScaling { .. } => CliError::Run(e),
            other => CliError::Config(other.to_string()),
        }
    }
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

pub(crate) fn create_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub trace: Vec<TraceRecord64>,
}

/// Runs one experiment and writes `trace.csv`, `run.meta.json` and, when
/// enabled, `plot.svg` into `out_dir`.
///
/// On divergence the partial trace is still written before the error is
/// returned.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunSummary, CliError> {
    cfg.validate()?;
    let game = cfg.game.build()?;
    let opts = RunOptions { trace_stride: cfg.trace_stride, retention: StateRetention::None, x0: None };
    let result = run_optimizer(game.as_ref(), &cfg.hp, cfg.method, cfg.seed, &opts);

    let (trace, failure) = match result {
        Ok(out) => (out.trace, None),
        Err(f) => (f.trace, Some(f.error)),
    };

    create_dir(out_dir)?;
    let mut resolved = cfg.clone();
    resolved.outputs.dir = out_dir.to_path_buf();
    write_file(&out_dir.join("trace.csv"), &output::trace_csv(&trace))?;
    write_file(&out_dir.join("run.meta.json"), &(resolved.to_json() + "\n"))?;
    if cfg.outputs.plot {
        let title = format!("{} on {:?}, seed {}", cfg.method, cfg.game, cfg.seed);
        write_file(&out_dir.join("plot.svg"), &output::trace_svg(&trace, &title))?;
    }
    match failure {
        Some(e) => Err(e.into()),
        None => Ok(RunSummary { out_dir: out_dir.to_path_buf(), trace }),
    }
}

/// Finite-difference check of the configured game at each point.
pub fn gradcheck(cfg: &ExperimentConfig, points: &[Point64], h: f64) -> Result<Vec<f64>, CliError> {
    let game = cfg.game.build()?;
    points
        .iter()
        .map(|p| finite_diff_check(game.as_ref(), p, h).map_err(CliError::from))
        .collect()
}

/// `count` points drawn uniformly from `[-radius, radius]²`.
pub fn random_points(count: usize, radius: f64, seed: u64) -> Vec<Point64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let v = vec![rng.gen_range(-radius..=radius), rng.gen_range(-radius..=radius)];
            Point64::new(v, 1).expect("finite point")
        })
        .collect()
}

/// Runs ADAM³ recording every state and audits the trajectory.
pub fn audit_run(cfg: &ExperimentConfig, bounds: &AuditBounds<f64>) -> Result<AuditReport, CliError> {
    if cfg.method != Method::Adam3 {
        return Err(CliError::Config(format!("audit needs method adam3, got {}", cfg.method)));
    }
    cfg.validate()?;
    let game = cfg.game.build()?;
    let opts = RunOptions { trace_stride: 1, retention: StateRetention::Full, x0: None };
    let out = run_optimizer(game.as_ref(), &cfg.hp, cfg.method, cfg.seed, &opts).map_err(|f| CliError::from(f.error))?;
    Ok(audit_trace(&out.trace, &out.states, &cfg.hp, bounds)?)
}
