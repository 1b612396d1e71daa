//! RMSE and MAPE over measured vs predicted capacities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricPair {
    /// Ah
    pub rmse: f64,
    /// percent
    pub mape: f64,
}

impl MetricPair {
    pub fn compute(measured: &[f64], predicted: &[f64]) -> Result<Self> {
        Ok(Self { rmse: rmse(measured, predicted)?, mape: mape(measured, predicted)? })
    }
}

fn check_lengths(measured: &[f64], predicted: &[f64]) -> Result<()> {
    if measured.len() != predicted.len() {
        return Err(Error::LengthMismatch { left: measured.len(), right: predicted.len() });
    }
    if measured.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(())
}

pub fn rmse(measured: &[f64], predicted: &[f64]) -> Result<f64> {
    check_lengths(measured, predicted)?;
    let sse: f64 = measured.iter().zip(predicted).map(|(y, p)| (y - p) * (y - p)).sum();
    Ok((sse / measured.len() as f64).sqrt())
}

/// Mean of `|y - y_hat| / y`, times 100. References must be non-zero.
pub fn mape(measured: &[f64], predicted: &[f64]) -> Result<f64> {
    check_lengths(measured, predicted)?;
    if let Some(i) = measured.iter().position(|&y| y == 0.0) {
        return Err(Error::ZeroReference(i));
    }
    let sum: f64 = measured.iter().zip(predicted).map(|(y, p)| (y - p).abs() / y.abs()).sum();
    Ok(sum / measured.len() as f64 * 100.0)
}
