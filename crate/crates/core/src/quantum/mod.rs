//! Exact statevector simulation over the gate set {RX, RY, RZ, CNOT}.
//!
//! Basis-state index bit `j` is qubit `j` (qubit 0 is least significant).
//! Gates are applied with an O(2^n) sweep over amplitude pairs; full
//! register unitaries are never built.

mod gate;
mod state;

pub use gate::{gate_matrix, Gate, GateMatrix};
pub use state::{apply_circuit, apply_gate, expectation_z, new_zero_state, StateVector, MAX_QUBITS};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered gate list over a fixed register width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::QubitCountOutOfRange(n_qubits));
        }
        Ok(Self { n_qubits, gates: Vec::new() })
    }

    pub fn from_gates(n_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut circuit = Self::new(n_qubits)?;
        circuit.gates.reserve(gates.len());
        for gate in gates {
            circuit.push(gate)?;
        }
        Ok(circuit)
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Replaces the angle of the rotation at `index`.
    pub fn set_angle(&mut self, index: usize, angle: f64) {
        self.gates[index].set_angle(angle);
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &Circuit) -> Result<Circuit> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::QubitCountMismatch { circuit: other.n_qubits, state: self.n_qubits });
        }
        let mut gates = Vec::with_capacity(self.gates.len() + other.gates.len());
        gates.extend_from_slice(&self.gates);
        gates.extend_from_slice(&other.gates);
        Ok(Circuit { n_qubits: self.n_qubits, gates })
    }
}
