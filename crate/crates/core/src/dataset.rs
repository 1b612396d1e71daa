//! Cycle/capacity series: CSV I/O, train/test splits, and state of health.
//!
//! CSV layout (UTF-8, LF or CRLF):
//!
//! ```text
//! # battery_id=B05
//! # rated_ah=2.0
//! cycle,capacity_ah
//! 1,1.856487
//! 2,1.846327
//! ```
//!
//! Other `#` lines are ignored. Rows may appear in any order; they are
//! sorted by cycle on load.

use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::encoder::FeatureBounds;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "cycle,capacity_ah";
pub const MIN_SPLIT_RECORDS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityRecord {
    pub cycle: u32,
    /// Ah
    pub capacity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacitySeries {
    pub battery_id: String,
    pub rated_capacity: f64,
    records: Vec<CapacityRecord>,
}

impl CapacitySeries {
    /// Records must be strictly increasing in cycle with positive capacity.
    pub fn new(battery_id: impl Into<String>, rated_capacity: f64, records: Vec<CapacityRecord>) -> Result<Self> {
        if !(rated_capacity > 0.0) || !rated_capacity.is_finite() {
            return Err(Error::NonPositiveRated(rated_capacity));
        }
        for (i, r) in records.iter().enumerate() {
            if !(r.capacity > 0.0) || !r.capacity.is_finite() {
                return Err(Error::NonPositiveCapacity { line: i + 1 });
            }
            if r.cycle == 0 {
                return Err(Error::InvalidSpec("cycle numbers start at 1".into()));
            }
        }
        for w in records.windows(2) {
            if w[1].cycle == w[0].cycle {
                return Err(Error::DuplicateCycle(w[0].cycle));
            }
            if w[1].cycle < w[0].cycle {
                return Err(Error::InvalidSpec("records must be sorted by cycle".into()));
            }
        }
        Ok(Self { battery_id: battery_id.into(), rated_capacity, records })
    }

    pub fn records(&self) -> &[CapacityRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn cycles(&self) -> Vec<u32> {
        self.records.iter().map(|r| r.cycle).collect()
    }

    pub fn capacities(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.capacity).collect()
    }

    fn with_records(&self, records: Vec<CapacityRecord>) -> Self {
        Self { battery_id: self.battery_id.clone(), rated_capacity: self.rated_capacity, records }
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# battery_id={}", self.battery_id);
        let _ = writeln!(out, "# rated_ah={}", self.rated_capacity);
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let _ = writeln!(out, "{},{}", r.cycle, r.capacity);
        }
        out
    }
}

pub fn parse_csv(text: &str) -> Result<CapacitySeries> {
    let mut battery_id = None;
    let mut rated = None;
    let mut header_seen = false;
    let mut rows: Vec<(usize, CapacityRecord)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r').trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((key, value)) = comment.trim().split_once('=') {
                match key.trim() {
                    "battery_id" => battery_id = Some(value.trim().to_string()),
                    "rated_ah" => {
                        let v: f64 = value.trim().parse().map_err(|_| Error::MalformedCsv {
                            line: line_no,
                            reason: format!("rated_ah `{}` is not a number", value.trim()),
                        })?;
                        rated = Some(v);
                    }
                    _ => {}
                }
            }
            continue;
        }
        if !header_seen {
            let header: Vec<&str> = line.split(',').map(str::trim).collect();
            if header != ["cycle", "capacity_ah"] {
                return Err(Error::MalformedCsv {
                    line: line_no,
                    reason: format!("expected header `{CSV_HEADER}`, found `{line}`"),
                });
            }
            header_seen = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(Error::MalformedCsv { line: line_no, reason: format!("expected 2 fields, found {}", fields.len()) });
        }
        let cycle: u32 = fields[0].parse().map_err(|_| Error::MalformedCsv {
            line: line_no,
            reason: format!("cycle `{}` is not a non-negative integer", fields[0]),
        })?;
        if cycle == 0 {
            return Err(Error::MalformedCsv { line: line_no, reason: "cycle numbers start at 1".into() });
        }
        let capacity: f64 = fields[1].parse().map_err(|_| Error::MalformedCsv {
            line: line_no,
            reason: format!("capacity `{}` is not a number", fields[1]),
        })?;
        if !capacity.is_finite() {
            return Err(Error::MalformedCsv { line: line_no, reason: "capacity is not finite".into() });
        }
        if capacity <= 0.0 {
            return Err(Error::NonPositiveCapacity { line: line_no });
        }
        rows.push((line_no, CapacityRecord { cycle, capacity }));
    }

    if !header_seen {
        return Err(Error::MalformedCsv { line: text.lines().count().max(1), reason: "missing header".into() });
    }
    let rated = rated.ok_or(Error::MissingMetadata("rated_ah"))?;
    let battery_id = battery_id.ok_or(Error::MissingMetadata("battery_id"))?;
    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    rows.sort_by_key(|(_, r)| r.cycle);
    if let Some(w) = rows.windows(2).find(|w| w[0].1.cycle == w[1].1.cycle) {
        return Err(Error::DuplicateCycle(w[0].1.cycle));
    }
    CapacitySeries::new(battery_id, rated, rows.into_iter().map(|(_, r)| r).collect())
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<CapacitySeries> {
    let text = std::fs::read_to_string(path)?;
    parse_csv(&text)
}

pub fn write_csv(series: &CapacitySeries, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, series.to_csv_string())?;
    Ok(())
}

fn train_len(n: usize, fraction: f64) -> Result<usize> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidFraction(fraction));
    }
    if n < MIN_SPLIT_RECORDS {
        return Err(Error::TooFewRecords { got: n, min: MIN_SPLIT_RECORDS });
    }
    // small slack so 0.7 * 10 rounds to 7, not 8
    let n_train = (fraction * n as f64 - 1e-9).ceil() as usize;
    let n_train = n_train.min(n);
    if n_train == 0 || n_train == n {
        return Err(Error::DegenerateSplit { train: n_train, test: n - n_train });
    }
    Ok(n_train)
}

/// First `ceil(fraction * N)` records train, the rest test.
pub fn chronological_split(series: &CapacitySeries, fraction: f64) -> Result<(CapacitySeries, CapacitySeries)> {
    let n_train = train_len(series.len(), fraction)?;
    let (train, test) = series.records.split_at(n_train);
    Ok((series.with_records(train.to_vec()), series.with_records(test.to_vec())))
}

/// Seeded random membership with the same sizes as [`chronological_split`];
/// each side stays sorted by cycle.
pub fn random_split(series: &CapacitySeries, fraction: f64, seed: u64) -> Result<(CapacitySeries, CapacitySeries)> {
    let n_train = train_len(series.len(), fraction)?;
    let mut order: Vec<usize> = (0..series.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut train_idx = order[..n_train].to_vec();
    let mut test_idx = order[n_train..].to_vec();
    train_idx.sort_unstable();
    test_idx.sort_unstable();
    let pick = |idx: &[usize]| idx.iter().map(|&i| series.records[i]).collect();
    Ok((series.with_records(pick(&train_idx)), series.with_records(pick(&test_idx))))
}

/// Cycle range of the training split.
pub fn fit_bounds(train: &CapacitySeries) -> Result<FeatureBounds> {
    let first = train.records.first().ok_or(Error::EmptyDataset)?;
    let last = train.records.last().ok_or(Error::EmptyDataset)?;
    FeatureBounds::new(first.cycle, last.cycle)
}

pub fn soh(record: &CapacityRecord, rated: f64) -> Result<f64> {
    if !(rated > 0.0) {
        return Err(Error::NonPositiveRated(rated));
    }
    Ok(record.capacity / rated)
}

/// First cycle whose state of health falls below `threshold`; `None` if
/// the series never crosses it.
pub fn eol_cycle(series: &CapacitySeries, threshold: f64, rated: f64) -> Result<Option<u32>> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidConfig(format!("SoH threshold {threshold} must lie in (0, 1)")));
    }
    for r in &series.records {
        if soh(r, rated)? < threshold {
            return Ok(Some(r.cycle));
        }
    }
    Ok(None)
}

/// Exponential fade toward a floor: `rated * (floor + (1 - floor) * exp(-c / tau))`
/// plus seeded Gaussian noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticFade {
    pub battery_id: String,
    pub rated_ah: f64,
    pub floor: f64,
    pub tau: f64,
    pub cycles: u32,
    pub noise_sd: f64,
    pub seed: u64,
}

impl Default for SyntheticFade {
    fn default() -> Self {
        Self {
            battery_id: "SYN05".into(),
            rated_ah: 2.0,
            floor: 0.70,
            tau: 80.0,
            cycles: 168,
            noise_sd: 0.01,
            seed: 1,
        }
    }
}

impl SyntheticFade {
    pub fn clean_capacity(&self, cycle: u32) -> f64 {
        self.rated_ah * (self.floor + (1.0 - self.floor) * (-f64::from(cycle) / self.tau).exp())
    }

    pub fn generate(&self) -> Result<CapacitySeries> {
        if !(self.noise_sd >= 0.0) {
            return Err(Error::InvalidConfig(format!("noise_sd {} must be >= 0", self.noise_sd)));
        }
        let noise = Normal::new(0.0, self.noise_sd).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let records = (1..=self.cycles)
            .map(|cycle| CapacityRecord { cycle, capacity: self.clean_capacity(cycle) + noise.sample(&mut rng) })
            .collect();
        CapacitySeries::new(self.battery_id.clone(), self.rated_ah, records)
    }
}
