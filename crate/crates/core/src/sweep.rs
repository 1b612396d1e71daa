//! Qubit/depth/seed grid sweeps.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::dataset::CapacitySeries;
use crate::error::{Error, Result};
use crate::experiment::{run_experiment, ExperimentConfig};

pub const DEFAULT_RUN_CAP: usize = 64;
pub const SWEEP_CSV_HEADER: &str = "qubits,depth,seed,status,train_rmse,test_rmse,train_mape,test_mape,iters,seconds";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepGrid {
    pub qubit_values: Vec<usize>,
    pub depth_values: Vec<usize>,
    pub seeds: Vec<u64>,
}

impl SweepGrid {
    pub fn new(qubit_values: Vec<usize>, depth_values: Vec<usize>, seeds: Vec<u64>, cap: usize) -> Result<Self> {
        if qubit_values.is_empty() || depth_values.is_empty() || seeds.is_empty() {
            return Err(Error::InvalidConfig("sweep grid lists must be non-empty".into()));
        }
        if qubit_values.contains(&0) || depth_values.contains(&0) {
            return Err(Error::InvalidConfig("qubit and depth values must be positive".into()));
        }
        let grid = Self { qubit_values, depth_values, seeds };
        if grid.run_count() > cap {
            return Err(Error::GridTooLarge { runs: grid.run_count(), cap });
        }
        Ok(grid)
    }

    pub fn run_count(&self) -> usize {
        self.qubit_values.len() * self.depth_values.len() * self.seeds.len()
    }

    /// `(qubits, depth, seed)` triples sorted ascending, duplicates removed.
    pub fn runs(&self) -> Vec<(usize, usize, u64)> {
        let mut runs = Vec::with_capacity(self.run_count());
        for &q in &self.qubit_values {
            for &d in &self.depth_values {
                for &s in &self.seeds {
                    runs.push((q, d, s));
                }
            }
        }
        runs.sort_unstable();
        runs.dedup();
        runs
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunStatus {
    Ok {
        train_rmse: f64,
        test_rmse: f64,
        train_mape: f64,
        test_mape: f64,
        iterations: usize,
        seconds: f64,
    },
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub qubits: usize,
    pub depth: usize,
    pub seed: u64,
    pub status: RunStatus,
}

impl SweepRow {
    pub fn succeeded(&self) -> bool {
        matches!(self.status, RunStatus::Ok { .. })
    }

    pub fn test_rmse(&self) -> Option<f64> {
        match self.status {
            RunStatus::Ok { test_rmse, .. } => Some(test_rmse),
            RunStatus::Failed(_) => None,
        }
    }
}

/// Runs every grid point with `base` as the template config. Runs are
/// spread over `threads` workers; each run trains single-threaded. Rows come
/// back sorted by `(qubits, depth, seed)`.
pub fn run_sweep(series: &CapacitySeries, grid: &SweepGrid, base: &ExperimentConfig, threads: usize) -> Result<Vec<SweepRow>> {
    let one = |&(qubits, depth, seed): &(usize, usize, u64)| {
        let mut cfg = base.clone();
        cfg.qubits = qubits;
        cfg.depth = depth;
        cfg.train.seed = seed;
        cfg.train.threads = 1;
        let status = match run_experiment(series, &cfg) {
            Ok(out) => RunStatus::Ok {
                train_rmse: out.report.train_rmse,
                test_rmse: out.report.test_rmse,
                train_mape: out.report.train_mape,
                test_mape: out.report.test_mape,
                iterations: out.report.iterations,
                seconds: out.report.wall_time,
            },
            Err(e) => RunStatus::Failed(e.to_string()),
        };
        SweepRow { qubits, depth, seed, status }
    };
    let runs = grid.runs();
    let mut rows: Vec<SweepRow> = if threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
        pool.install(|| runs.par_iter().map(one).collect())
    } else {
        runs.iter().map(one).collect()
    };
    rows.sort_by_key(|r| (r.qubits, r.depth, r.seed));
    Ok(rows)
}

/// Renders rows as CSV. The `seconds` column is left empty unless `timing`
/// is set, keeping output byte-stable across reruns.
pub fn sweep_csv(rows: &[SweepRow], timing: bool) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for row in rows {
        let _ = write!(out, "{},{},{},", row.qubits, row.depth, row.seed);
        match &row.status {
            RunStatus::Ok { train_rmse, test_rmse, train_mape, test_mape, iterations, seconds } => {
                let secs = if timing { format!("{seconds:.3}") } else { String::new() };
                let _ = writeln!(out, "ok,{train_rmse},{test_rmse},{train_mape},{test_mape},{iterations},{secs}");
            }
            RunStatus::Failed(_) => {
                let _ = writeln!(out, "failed,,,,,,");
            }
        }
    }
    out
}

/// Median test RMSE over successful rows matching `(qubits, depth)`.
pub fn median_test_rmse(rows: &[SweepRow], qubits: usize, depth: usize) -> Option<f64> {
    let mut values: Vec<f64> =
        rows.iter().filter(|r| r.qubits == qubits && r.depth == depth).filter_map(SweepRow::test_rmse).collect();
    median(&mut values)
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    Some(if values.len() % 2 == 1 { values[mid] } else { 0.5 * (values[mid - 1] + values[mid]) })
}
