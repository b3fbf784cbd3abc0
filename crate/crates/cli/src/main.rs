use std::path::PathBuf;
use std::process::ExitCode;

use adam3_cli::config::ExperimentConfig;
use adam3_cli::sweep::{sweep, write_sweep};
use adam3_cli::theory_report::{theory_report, TheoryInputs};
use adam3_cli::{audit_run, gradcheck, random_points, run_experiment, CliError};
use adam3_core::diagnostics::{AuditBounds, CheckStatus};
use adam3_core::Point64;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "adam3", version, about = "Adaptive-momentum extragradient experiments for min-max games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write trace.csv, run.meta.json and optionally plot.svg.
    Run {
        config: PathBuf,
        /// Output directory (overrides ADAM3_OUT_DIR and the config).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write plot.svg.
        #[arg(long)]
        plot: bool,
    },
    /// Sweep batch sizes and seeds; writes sweep.csv and sweep_summary.csv.
    Sweep {
        config: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "1,4,16")]
        batch_sizes: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
        seeds: Vec<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print step-size, momentum-cap and sample-size bounds.
    Theory {
        #[arg(long, default_value_t = 1.0)]
        g0: f64,
        #[arg(long, default_value_t = 1.0)]
        l: f64,
        #[arg(long, default_value_t = 1.0)]
        g_inf: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma2: f64,
        #[arg(long, default_value_t = 0.5)]
        kappa: f64,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 1.0)]
        c1: f64,
        #[arg(long, default_value_t = 1.0)]
        c2: f64,
        #[arg(long, default_value_t = 0.0)]
        beta1_1: f64,
        #[arg(long, default_value_t = 0.9)]
        beta2: f64,
        #[arg(long, default_value_t = 0.1)]
        beta3: f64,
        /// Machine-readable output.
        #[arg(long)]
        json: bool,
    },
    /// Compare the game's exact field against central differences of its objective.
    Gradcheck {
        config: PathBuf,
        /// Point as "theta,alpha"; repeatable. Defaults to random points.
        #[arg(long = "point", allow_hyphen_values = true)]
        point: Vec<String>,
        #[arg(long, default_value_t = 10)]
        random: usize,
        #[arg(long, default_value_t = 100.0)]
        radius: f64,
        #[arg(long, default_value_t = 1e-5)]
        h: f64,
    },
    /// Run ADAM³ recording every state and audit the trajectory bounds.
    Audit {
        config: PathBuf,
        /// Fixed gradient bound; the running max of observed gradients when absent.
        #[arg(long)]
        g_inf: Option<f64>,
        /// Iterate-norm bound D (checks ‖x_k‖ ≤ D/2).
        #[arg(long)]
        d_bound: Option<f64>,
        #[arg(long)]
        json: bool,
    },
}

fn parse_point(text: &str) -> Result<Point64, CliError> {
    let coords = text
        .split(',')
        .map(|c| c.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Config(format!("bad point {text:?}: {e}")))?;
    if coords.len() != 2 {
        return Err(CliError::Config(format!("point {text:?} needs two coordinates")));
    }
    Ok(Point64::new(coords, 1)?)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Run { config, out, plot } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            cfg.outputs.plot |= plot;
            let dir = cfg.resolve_out_dir(out.as_deref());
            let summary = run_experiment(&cfg, &dir)?;
            if let Some(last) = summary.trace.last() {
                println!(
                    "k={} e_k={} R_k={}",
                    last.k,
                    last.e_k.map_or("-".into(), |v| format!("{v:.6e}")),
                    last.r_k.map_or("-".into(), |v| format!("{v:.6e}"))
                );
            }
            println!("wrote {}", summary.out_dir.display());
        }
        Command::Sweep { config, batch_sizes, seeds, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            let dir = cfg.resolve_out_dir(out.as_deref());
            let summary = sweep(&cfg, &batch_sizes, &seeds)?;
            write_sweep(&summary, &dir)?;
            for (m, med) in &summary.medians {
                println!("m={m} median R_N={med:.6e}");
            }
        }
        Command::Theory { g0, l, g_inf, sigma2, kappa, eps, c1, c2, beta1_1, beta2, beta3, json } => {
            let inputs = TheoryInputs { g0, l, g_inf, sigma2, kappa, eps, c1, c2, beta1_1, beta2, beta3 };
            let report = theory_report(&inputs)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            } else {
                print!("{}", report.to_text());
            }
        }
        Command::Gradcheck { config, point, random, radius, h } => {
            let cfg = ExperimentConfig::load(&config)?;
            let points: Vec<Point64> = if point.is_empty() {
                random_points(random, radius, cfg.seed)
            } else {
                point.iter().map(|p| parse_point(p)).collect::<Result<_, _>>()?
            };
            let devs = gradcheck(&cfg, &points, h)?;
            for (p, d) in points.iter().zip(&devs) {
                println!("({:.6}, {:.6})  deviation {d:.3e}", p.values()[0], p.values()[1]);
            }
            println!("max deviation {:.3e}", devs.iter().copied().fold(0.0, f64::max));
        }
        Command::Audit { config, g_inf, d_bound, json } => {
            let cfg = ExperimentConfig::load(&config)?;
            let report = audit_run(&cfg, &AuditBounds { g_inf, d_bound })?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            } else {
                println!("gradient bound: {}", report.g_inf_source);
                for c in &report.checks {
                    match &c.status {
                        CheckStatus::Pass => println!("PASS  {}", c.name),
                        CheckStatus::Fail { first_iteration, detail } => {
                            println!("FAIL  {} (first at k={first_iteration}: {detail})", c.name)
                        }
                        CheckStatus::NotApplicable { reason } => println!("N/A   {} ({reason})", c.name),
                    }
                }
            }
        }
    }
    Ok(())
}
