//! Batch-size sweeps: one run per (batch size, seed), fanned out over a
//! rayon pool, aggregated into the median terminal R_N per batch size.

use std::fmt::Write as _;
use std::path::Path;

use adam3_core::runner::run_optimizer;
use adam3_core::{RunOptions, StateRetention};
use rayon::prelude::*;

use crate::output::fmt_value;
use crate::{create_dir, write_file, CliError, ExperimentConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub batch_m: usize,
    pub seed: u64,
    pub terminal_r: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub rows: Vec<SweepRow>,
    /// `(batch_m, median terminal R_N)` in the order the batch sizes were given.
    pub medians: Vec<(usize, f64)>,
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

pub fn sweep(base: &ExperimentConfig, batch_sizes: &[usize], seeds: &[u64]) -> Result<SweepSummary, CliError> {
    if batch_sizes.is_empty() || seeds.is_empty() {
        return Err(CliError::Config("sweep needs at least one batch size and one seed".into()));
    }
    base.validate()?;
    let game = base.game.build()?;
    let jobs: Vec<(usize, u64)> =
        batch_sizes.iter().flat_map(|&m| seeds.iter().map(move |&s| (m, s))).collect();

    let rows = jobs
        .par_iter()
        .map(|&(m, seed)| {
            let mut hp = base.hp;
            hp.batch_m = m;
            hp.validate()?;
            let opts = RunOptions { trace_stride: hp.n_iters, retention: StateRetention::None, x0: None };
            let out = run_optimizer(game.as_ref(), &hp, base.method, seed, &opts)
                .map_err(|f| CliError::from(f.error))?;
            let terminal_r = out
                .trace
                .last()
                .and_then(|r| r.r_k)
                .ok_or_else(|| CliError::Config("game has no exact field; R_N unavailable".into()))?;
            Ok(SweepRow { batch_m: m, seed, terminal_r })
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let medians = batch_sizes
        .iter()
        .map(|&m| {
            let mut vals: Vec<f64> = rows.iter().filter(|r| r.batch_m == m).map(|r| r.terminal_r).collect();
            (m, median(&mut vals))
        })
        .collect();
    Ok(SweepSummary { rows, medians })
}

/// Writes `sweep.csv` (`m,seed,R_N`) and `sweep_summary.csv` (`m,median_R_N`).
pub fn write_sweep(summary: &SweepSummary, out_dir: &Path) -> Result<(), CliError> {
    create_dir(out_dir)?;
    let mut rows = String::from("m,seed,R_N\n");
    for r in &summary.rows {
        let _ = writeln!(rows, "{},{},{}", r.batch_m, r.seed, fmt_value(Some(r.terminal_r)));
    }
    let mut med = String::from("m,median_R_N\n");
    for (m, v) in &summary.medians {
        let _ = writeln!(med, "{m},{}", fmt_value(Some(*v)));
    }
    write_file(&out_dir.join("sweep.csv"), &rows)?;
    write_file(&out_dir.join("sweep_summary.csv"), &med)
}
