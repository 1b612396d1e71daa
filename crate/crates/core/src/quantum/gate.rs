use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A single gate of the supported set.
///
/// Rotation angles are in radians. Qubit indices follow the little-endian
/// convention used throughout the crate: qubit `j` is bit `j` of a
/// basis-state index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "UPPERCASE")]
pub enum Gate {
    Rx { target: usize, angle: f64 },
    Ry { target: usize, angle: f64 },
    Rz { target: usize, angle: f64 },
    Cnot { control: usize, target: usize },
}

/// Matrix form of a [`Gate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateMatrix {
    Single([[Complex64; 2]; 2]),
    /// Basis order `|control target>`: index 2 is `|10>`, index 3 is `|11>`.
    Two([[Complex64; 4]; 4]),
}

impl GateMatrix {
    pub fn dim(&self) -> usize {
        match self {
            GateMatrix::Single(_) => 2,
            GateMatrix::Two(_) => 4,
        }
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        match self {
            GateMatrix::Single(m) => m[row][col],
            GateMatrix::Two(m) => m[row][col],
        }
    }

    /// Largest entrywise deviation of `M^dagger M` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut acc = ZERO;
                for k in 0..n {
                    acc += self.entry(k, i).conj() * self.entry(k, j);
                }
                let expect = if i == j { ONE } else { ZERO };
                worst = worst.max((acc - expect).norm());
            }
        }
        worst
    }
}

impl Gate {
    pub fn rx(target: usize, angle: f64) -> Self {
        Gate::Rx { target, angle }
    }

    pub fn ry(target: usize, angle: f64) -> Self {
        Gate::Ry { target, angle }
    }

    pub fn rz(target: usize, angle: f64) -> Self {
        Gate::Rz { target, angle }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::Cnot { control, target }
    }

    pub fn target(&self) -> usize {
        match *self {
            Gate::Rx { target, .. }
            | Gate::Ry { target, .. }
            | Gate::Rz { target, .. }
            | Gate::Cnot { target, .. } => target,
        }
    }

    pub fn control(&self) -> Option<usize> {
        match *self {
            Gate::Cnot { control, .. } => Some(control),
            _ => None,
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            Gate::Rx { angle, .. } | Gate::Ry { angle, .. } | Gate::Rz { angle, .. } => Some(angle),
            Gate::Cnot { .. } => None,
        }
    }

    /// Replaces the rotation angle. No effect on CNOT.
    pub fn set_angle(&mut self, value: f64) {
        match self {
            Gate::Rx { angle, .. } | Gate::Ry { angle, .. } | Gate::Rz { angle, .. } => {
                *angle = value
            }
            Gate::Cnot { .. } => {}
        }
    }

    /// Checks the gate against a register of `n_qubits`.
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let target = self.target();
        if target >= n_qubits {
            return Err(Error::QubitIndexOutOfRange { index: target, n_qubits });
        }
        if let Some(control) = self.control() {
            if control >= n_qubits {
                return Err(Error::QubitIndexOutOfRange { index: control, n_qubits });
            }
            if control == target {
                return Err(Error::ControlEqualsTarget(control));
            }
        }
        Ok(())
    }

    pub fn matrix(&self) -> GateMatrix {
        match *self {
            Gate::Rx { angle, .. } => {
                let (s, c) = (angle / 2.0).sin_cos();
                let off = Complex64::new(0.0, -s);
                GateMatrix::Single([[Complex64::new(c, 0.0), off], [off, Complex64::new(c, 0.0)]])
            }
            Gate::Ry { angle, .. } => {
                let (s, c) = (angle / 2.0).sin_cos();
                GateMatrix::Single([
                    [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
                    [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
                ])
            }
            Gate::Rz { angle, .. } => {
                let (s, c) = (angle / 2.0).sin_cos();
                GateMatrix::Single([[Complex64::new(c, -s), ZERO], [ZERO, Complex64::new(c, s)]])
            }
            Gate::Cnot { .. } => GateMatrix::Two([
                [ONE, ZERO, ZERO, ZERO],
                [ZERO, ONE, ZERO, ZERO],
                [ZERO, ZERO, ZERO, ONE],
                [ZERO, ZERO, ONE, ZERO],
            ]),
        }
    }
}

/// Free-function form of [`Gate::matrix`].
pub fn gate_matrix(gate: &Gate) -> GateMatrix {
    gate.matrix()
}
