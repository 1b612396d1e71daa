//! Trainable circuit: `depth` layers of RX-RZ-RX on every qubit followed by
//! a ring of CNOTs.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{Circuit, Gate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnsatzSpec {
    pub n_qubits: usize,
    pub depth: usize,
}

impl AnsatzSpec {
    pub fn new(n_qubits: usize, depth: usize) -> Result<Self> {
        let spec = Self { n_qubits, depth };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 || self.n_qubits > crate::quantum::MAX_QUBITS {
            return Err(Error::QubitCountOutOfRange(self.n_qubits));
        }
        if self.depth == 0 {
            return Err(Error::InvalidSpec("ansatz depth must be at least 1".into()));
        }
        Ok(())
    }

    /// Three rotation angles per qubit per layer.
    pub fn param_count(&self) -> usize {
        3 * self.n_qubits * self.depth
    }

    pub fn gate_count(&self) -> usize {
        let entanglers = if self.n_qubits >= 2 { self.n_qubits * self.depth } else { 0 };
        self.param_count() + entanglers
    }
}

pub fn param_count(spec: &AnsatzSpec) -> usize {
    spec.param_count()
}

/// Circuit angles in radians, laid out as `theta[3 * (layer * n + qubit) + r]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParameterVector(pub Vec<f64>);

impl ParameterVector {
    pub fn zeros(spec: &AnsatzSpec) -> Self {
        Self(vec![0.0; spec.param_count()])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// I.i.d. `Uniform[0, 2pi)` angles from a ChaCha8 stream seeded with `seed`.
pub fn init_params(spec: &AnsatzSpec, seed: u64) -> ParameterVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ParameterVector((0..spec.param_count()).map(|_| rng.random_range(0.0..TAU)).collect())
}

pub fn ansatz_circuit(spec: &AnsatzSpec, theta: &[f64]) -> Result<Circuit> {
    spec.validate()?;
    if theta.len() != spec.param_count() {
        return Err(Error::ParamLengthMismatch { expected: spec.param_count(), got: theta.len() });
    }
    let n = spec.n_qubits;
    let mut gates = Vec::with_capacity(spec.gate_count());
    for layer in 0..spec.depth {
        for q in 0..n {
            let k = 3 * (layer * n + q);
            gates.push(Gate::rx(q, theta[k]));
            gates.push(Gate::rz(q, theta[k + 1]));
            gates.push(Gate::rx(q, theta[k + 2]));
        }
        if n >= 2 {
            for q in 0..n {
                gates.push(Gate::cnot(q, (q + 1) % n));
            }
        }
    }
    Circuit::from_gates(n, gates)
}

/// Index into [`ansatz_circuit`]'s gate list of the rotation driven by each
/// parameter.
pub fn parameter_gate_indices(spec: &AnsatzSpec) -> Vec<usize> {
    let n = spec.n_qubits;
    let per_layer = 3 * n + if n >= 2 { n } else { 0 };
    (0..spec.param_count())
        .map(|k| {
            let layer = k / (3 * n);
            layer * per_layer + k % (3 * n)
        })
        .collect()
}
