//! The regression model `y_hat = a * <Z_readout>(x; theta) + b` and its
//! on-disk JSON form.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ansatz::{ansatz_circuit, init_params, AnsatzSpec, ParameterVector};
use crate::dataset::CapacitySeries;
use crate::encoder::{encoding_circuit, normalize_cycle, EncodingMode, EncodingSpec, FeatureBounds};
use crate::error::{Error, Result};
use crate::quantum::{Circuit, StateVector};

pub const MODEL_SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QnnModel {
    pub encoding: EncodingSpec,
    pub ansatz: AnsatzSpec,
    pub theta: ParameterVector,
    pub readout_qubit: usize,
    /// Ah per unit of `<Z>`
    pub out_scale: f64,
    /// Ah
    pub out_bias: f64,
    pub feature_bounds: FeatureBounds,
}

#[derive(Serialize)]
struct ModelFileOut<'a> {
    schema_version: u64,
    #[serde(flatten)]
    model: &'a QnnModel,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFileIn {
    #[allow(dead_code)]
    schema_version: u64,
    encoding: EncodingSpec,
    ansatz: AnsatzSpec,
    theta: ParameterVector,
    readout_qubit: usize,
    out_scale: f64,
    out_bias: f64,
    feature_bounds: FeatureBounds,
}

/// Readout defaults to the second qubit when there is one.
pub fn default_readout(n_qubits: usize) -> usize {
    if n_qubits >= 2 {
        1
    } else {
        0
    }
}

impl QnnModel {
    pub fn new(
        encoding: EncodingSpec,
        ansatz: AnsatzSpec,
        theta: ParameterVector,
        readout_qubit: usize,
        out_scale: f64,
        out_bias: f64,
        feature_bounds: FeatureBounds,
    ) -> Result<Self> {
        let model = Self { encoding, ansatz, theta, readout_qubit, out_scale, out_bias, feature_bounds };
        model.validate()?;
        Ok(model)
    }

    /// Random circuit angles from `seed`; the output head starts at half the
    /// training capacity range (scale) and the training mean (bias).
    pub fn initialize(
        n_qubits: usize,
        depth: usize,
        mode: EncodingMode,
        feature_bounds: FeatureBounds,
        train: &CapacitySeries,
        seed: u64,
    ) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let ansatz = AnsatzSpec::new(n_qubits, depth)?;
        let caps = train.capacities();
        let max = caps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = caps.iter().copied().fold(f64::INFINITY, f64::min);
        let mean = caps.iter().sum::<f64>() / caps.len() as f64;
        Self::new(
            EncodingSpec { n_qubits, mode },
            ansatz,
            init_params(&ansatz, seed),
            default_readout(n_qubits),
            (max - min) / 2.0,
            mean,
            feature_bounds,
        )
    }

    pub fn validate(&self) -> Result<()> {
        self.ansatz.validate()?;
        self.feature_bounds.validate()?;
        if self.encoding.n_qubits != self.ansatz.n_qubits {
            return Err(Error::InvalidSpec(format!(
                "encoding acts on {} qubits but ansatz on {}",
                self.encoding.n_qubits, self.ansatz.n_qubits
            )));
        }
        if self.readout_qubit >= self.ansatz.n_qubits {
            return Err(Error::QubitIndexOutOfRange { index: self.readout_qubit, n_qubits: self.ansatz.n_qubits });
        }
        if self.theta.len() != self.ansatz.param_count() {
            return Err(Error::ParamLengthMismatch { expected: self.ansatz.param_count(), got: self.theta.len() });
        }
        let finite = self.theta.0.iter().all(|v| v.is_finite()) && self.out_scale.is_finite() && self.out_bias.is_finite();
        if !finite {
            return Err(Error::InvalidSpec("model parameters must be finite".into()));
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.ansatz.n_qubits
    }

    /// Number of trainable values: circuit angles plus scale and bias.
    pub fn trainable_len(&self) -> usize {
        self.theta.len() + 2
    }

    /// `theta ++ [out_scale, out_bias]`
    pub fn trainable(&self) -> Vec<f64> {
        let mut v = self.theta.0.clone();
        v.push(self.out_scale);
        v.push(self.out_bias);
        v
    }

    pub fn with_trainable(&self, values: &[f64]) -> Result<Self> {
        if values.len() != self.trainable_len() {
            return Err(Error::ParamLengthMismatch { expected: self.trainable_len(), got: values.len() });
        }
        let k = self.theta.len();
        Ok(Self {
            theta: ParameterVector(values[..k].to_vec()),
            out_scale: values[k],
            out_bias: values[k + 1],
            ..self.clone()
        })
    }

    pub fn ansatz_circuit(&self) -> Result<Circuit> {
        ansatz_circuit(&self.ansatz, &self.theta.0)
    }

    /// State after the encoding circuit only.
    pub fn encoded_state(&self, x_norm: f64) -> Result<StateVector> {
        let mut state = StateVector::zero(self.n_qubits())?;
        state.apply_circuit(&encoding_circuit(x_norm, &self.encoding)?)?;
        Ok(state)
    }

    pub fn raw_expectation(&self, x_norm: f64) -> Result<f64> {
        let mut state = self.encoded_state(x_norm)?;
        state.apply_circuit(&self.ansatz_circuit()?)?;
        state.expectation_z(self.readout_qubit)
    }

    /// `<Z_readout>` for many features, building the ansatz circuit once.
    pub fn raw_expectations(&self, xs: &[f64]) -> Result<Vec<f64>> {
        let ansatz = self.ansatz_circuit()?;
        xs.iter()
            .map(|&x| {
                let mut state = self.encoded_state(x)?;
                state.apply_circuit(&ansatz)?;
                state.expectation_z(self.readout_qubit)
            })
            .collect()
    }

    pub fn normalize(&self, cycle: u32) -> f64 {
        // bounds are validated at construction, so this cannot fail
        normalize_cycle(f64::from(cycle), &self.feature_bounds).unwrap_or(0.0)
    }

    fn head(&self, z: f64) -> f64 {
        self.out_scale * z + self.out_bias
    }

    /// Predicted capacity in Ah. Cycles outside the training range clamp to
    /// its edges.
    pub fn predict_one(&self, cycle: u32) -> f64 {
        let z = self.raw_expectation(self.normalize(cycle)).expect("validated model evaluates");
        self.head(z)
    }

    pub fn predict_batch(&self, cycles: &[u32]) -> Vec<f64> {
        let xs: Vec<f64> = cycles.iter().map(|&c| self.normalize(c)).collect();
        self.raw_expectations(&xs)
            .expect("validated model evaluates")
            .into_iter()
            .map(|z| self.head(z))
            .collect()
    }

    pub fn to_json(&self) -> String {
        let file = ModelFileOut { schema_version: MODEL_SCHEMA_VERSION, model: self };
        let mut s = serde_json::to_string_pretty(&file).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::MalformedModelFile(e.to_string()))?;
        let version = value
            .get("schema_version")
            .ok_or_else(|| Error::MalformedModelFile("missing schema_version".into()))?
            .as_u64()
            .ok_or_else(|| Error::MalformedModelFile("schema_version must be a non-negative integer".into()))?;
        if version != MODEL_SCHEMA_VERSION {
            return Err(Error::SchemaVersionUnsupported(version));
        }
        let file: ModelFileIn = serde_json::from_value(value).map_err(|e| Error::MalformedModelFile(e.to_string()))?;
        let model = Self {
            encoding: file.encoding,
            ansatz: file.ansatz,
            theta: file.theta,
            readout_qubit: file.readout_qubit,
            out_scale: file.out_scale,
            out_bias: file.out_bias,
            feature_bounds: file.feature_bounds,
        };
        model.validate().map_err(|e| Error::MalformedModelFile(e.to_string()))?;
        Ok(model)
    }
}

pub fn save_model(model: &QnnModel, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, model.to_json())?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<QnnModel> {
    let text = std::fs::read_to_string(path)?;
    QnnModel::from_json(&text)
}
