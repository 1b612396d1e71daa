//! One end-to-end fit of a capacity series, and the JSON report it produces.

use serde::{Deserialize, Serialize};

use crate::dataset::{chronological_split, fit_bounds, random_split, CapacitySeries};
use crate::encoder::EncodingMode;
use crate::error::{Error, Result};
use crate::model::QnnModel;
use crate::trainer::{train, TrainConfig, TrainReport};

pub const REPORT_SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitMode {
    #[default]
    Chrono,
    Random,
}

impl std::str::FromStr for SplitMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "chrono" => Ok(SplitMode::Chrono),
            "random" => Ok(SplitMode::Random),
            other => Err(format!("unknown split mode `{other}` (expected chrono|random)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub qubits: usize,
    pub depth: usize,
    pub encoding: EncodingMode,
    pub train_fraction: f64,
    pub split_mode: SplitMode,
    /// `train.seed` drives both parameter initialization and random splits.
    pub train: TrainConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            qubits: 4,
            depth: 3,
            encoding: EncodingMode::Arc,
            train_fraction: 0.8,
            split_mode: SplitMode::Chrono,
            train: TrainConfig { seed: 1, ..TrainConfig::default() },
        }
    }
}

pub fn split(
    series: &CapacitySeries,
    fraction: f64,
    mode: SplitMode,
    seed: u64,
) -> Result<(CapacitySeries, CapacitySeries)> {
    match mode {
        SplitMode::Chrono => chronological_split(series, fraction),
        SplitMode::Random => random_split(series, fraction, seed),
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub model: QnnModel,
    pub report: TrainReport,
    pub train: CapacitySeries,
    pub test: CapacitySeries,
}

pub fn run_experiment(series: &CapacitySeries, cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let (train_set, test_set) = split(series, cfg.train_fraction, cfg.split_mode, cfg.train.seed)?;
    let bounds = fit_bounds(&train_set)?;
    let initial = QnnModel::initialize(cfg.qubits, cfg.depth, cfg.encoding, bounds, &train_set, cfg.train.seed)?;
    let (model, report) = train(&initial, &train_set, &test_set, &cfg.train)?;
    Ok(ExperimentOutcome { model, report, train: train_set, test: test_set })
}

/// Report document written next to a trained model.
///
/// `wall_time` is only present when timing was requested, so that reports of
/// identical runs compare byte-for-byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunReport {
    pub schema_version: u64,
    pub battery_id: String,
    pub n_records: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub config: ExperimentConfig,
    pub iterations: usize,
    pub loss_history: Vec<f64>,
    pub final_grad_norm: f64,
    pub termination: crate::optim::Termination,
    pub train_rmse: f64,
    pub test_rmse: f64,
    pub train_mape: f64,
    pub test_mape: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

impl RunReport {
    pub fn new(series: &CapacitySeries, cfg: &ExperimentConfig, outcome: &ExperimentOutcome, timing: bool) -> Self {
        let r = &outcome.report;
        Self {
            schema_version: REPORT_SCHEMA_VERSION,
            battery_id: series.battery_id.clone(),
            n_records: series.len(),
            n_train: outcome.train.len(),
            n_test: outcome.test.len(),
            config: cfg.clone(),
            iterations: r.iterations,
            loss_history: r.loss_history.clone(),
            final_grad_norm: r.final_grad_norm,
            termination: r.termination,
            train_rmse: r.train_rmse,
            test_rmse: r.test_rmse,
            train_mape: r.train_mape,
            test_mape: r.test_mape,
            wall_time: timing.then_some(r.wall_time),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let report: Self = serde_json::from_str(text).map_err(|e| Error::InvalidConfig(format!("bad report: {e}")))?;
        if report.schema_version != REPORT_SCHEMA_VERSION {
            return Err(Error::SchemaVersionUnsupported(report.schema_version));
        }
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::SyntheticFade;

    fn quick_cfg() -> ExperimentConfig {
        ExperimentConfig {
            qubits: 2,
            depth: 1,
            train: TrainConfig { seed: 3, max_iters: 15, ..TrainConfig::default() },
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn run_is_reproducible() {
        let series = SyntheticFade { cycles: 40, ..Default::default() }.generate().unwrap();
        let cfg = quick_cfg();
        let a = run_experiment(&series, &cfg).unwrap();
        let b = run_experiment(&series, &cfg).unwrap();
        assert_eq!(a.model, b.model);
        let ja = RunReport::new(&series, &cfg, &a, false).to_json();
        let jb = RunReport::new(&series, &cfg, &b, false).to_json();
        assert_eq!(ja, jb);
        assert!(!ja.contains("wall_time"));
        assert!(RunReport::new(&series, &cfg, &a, true).to_json().contains("wall_time"));
    }

    #[test]
    fn report_roundtrip() {
        let series = SyntheticFade { cycles: 30, ..Default::default() }.generate().unwrap();
        let cfg = quick_cfg();
        let out = run_experiment(&series, &cfg).unwrap();
        let report = RunReport::new(&series, &cfg, &out, true);
        assert_eq!(RunReport::from_json(&report.to_json()).unwrap(), report);
        assert_eq!(report.n_train + report.n_test, 30);
        assert_eq!(report.n_train, 24);
    }

    #[test]
    fn bounds_come_from_training_slice() {
        let series = SyntheticFade { cycles: 50, ..Default::default() }.generate().unwrap();
        let out = run_experiment(&series, &quick_cfg()).unwrap();
        assert_eq!(out.model.feature_bounds.min_cycle, 1);
        assert_eq!(out.model.feature_bounds.max_cycle, 40);
    }

    #[test]
    fn split_mode_parse() {
        assert_eq!("chrono".parse::<SplitMode>().unwrap(), SplitMode::Chrono);
        assert_eq!("random".parse::<SplitMode>().unwrap(), SplitMode::Random);
        assert!("kfold".parse::<SplitMode>().is_err());
    }
}
