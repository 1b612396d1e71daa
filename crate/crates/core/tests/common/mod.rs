//! Test-only helpers: a dense matrix-chain circuit oracle and random circuit
//! generation. The oracle builds every gate as a full 2^n x 2^n Kronecker
//! product from its own 2x2 literals and shares no code with the simulator.

#![allow(dead_code)]

use num_complex::Complex64;
use qnn_core::quantum::Gate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Matrix = Vec<Vec<Complex64>>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(dim: usize) -> Matrix {
    (0..dim).map(|i| (0..dim).map(|j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) }).collect()).collect()
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ra, rb) = (a.len(), b.len());
    let mut out = vec![vec![c(0.0, 0.0); ra * rb]; ra * rb];
    for i in 0..ra {
        for j in 0..ra {
            for k in 0..rb {
                for l in 0..rb {
                    out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let mut out = vec![vec![c(0.0, 0.0); n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            for j in 0..n {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn matvec(a: &Matrix, v: &[Complex64]) -> Vec<Complex64> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

fn single_qubit_literal(gate: &Gate) -> Matrix {
    match *gate {
        Gate::Rx { angle, .. } => {
            let (co, si) = ((angle / 2.0).cos(), (angle / 2.0).sin());
            vec![vec![c(co, 0.0), c(0.0, -si)], vec![c(0.0, -si), c(co, 0.0)]]
        }
        Gate::Ry { angle, .. } => {
            let (co, si) = ((angle / 2.0).cos(), (angle / 2.0).sin());
            vec![vec![c(co, 0.0), c(-si, 0.0)], vec![c(si, 0.0), c(co, 0.0)]]
        }
        Gate::Rz { angle, .. } => {
            let half = angle / 2.0;
            vec![vec![c(half.cos(), -half.sin()), c(0.0, 0.0)], vec![c(0.0, 0.0), c(half.cos(), half.sin())]]
        }
        Gate::Cnot { .. } => unreachable!(),
    }
}

/// Kronecker product over qubits n-1 (leftmost) down to 0, with `ops[q]`
/// acting on qubit q.
fn tensor_over_qubits(ops: &[Matrix]) -> Matrix {
    let mut full = ops[ops.len() - 1].clone();
    for q in (0..ops.len() - 1).rev() {
        full = kron(&full, &ops[q]);
    }
    full
}

pub fn full_unitary(gate: &Gate, n_qubits: usize) -> Matrix {
    match *gate {
        Gate::Cnot { control, target } => {
            let p0 = vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]];
            let p1 = vec![vec![c(0.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]];
            let x = vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]];
            let mut keep = vec![identity(2); n_qubits];
            keep[control] = p0;
            let mut flip = vec![identity(2); n_qubits];
            flip[control] = p1;
            flip[target] = x;
            let a = tensor_over_qubits(&keep);
            let b = tensor_over_qubits(&flip);
            a.iter().zip(&b).map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect()).collect()
        }
        _ => {
            let mut ops = vec![identity(2); n_qubits];
            ops[gate.target()] = single_qubit_literal(gate);
            tensor_over_qubits(&ops)
        }
    }
}

/// Product `U_k ... U_1` of the full unitaries of `gates`.
pub fn circuit_unitary(gates: &[Gate], n_qubits: usize) -> Matrix {
    gates.iter().fold(identity(1 << n_qubits), |acc, g| matmul(&full_unitary(g, n_qubits), &acc))
}

pub fn random_gate(rng: &mut ChaCha8Rng, n_qubits: usize) -> Gate {
    let kind = if n_qubits >= 2 { rng.random_range(0..4) } else { rng.random_range(0..3) };
    let target = rng.random_range(0..n_qubits);
    let angle = rng.random_range(-2.0 * std::f64::consts::TAU..2.0 * std::f64::consts::TAU);
    match kind {
        0 => Gate::rx(target, angle),
        1 => Gate::ry(target, angle),
        2 => Gate::rz(target, angle),
        _ => {
            let mut control = rng.random_range(0..n_qubits - 1);
            if control >= target {
                control += 1;
            }
            Gate::cnot(control, target)
        }
    }
}

pub fn random_gates(rng: &mut ChaCha8Rng, n_qubits: usize, len: usize) -> Vec<Gate> {
    (0..len).map(|_| random_gate(rng, n_qubits)).collect()
}

pub fn random_state(rng: &mut ChaCha8Rng, n_qubits: usize) -> Vec<Complex64> {
    let raw: Vec<Complex64> =
        (0..1 << n_qubits).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    raw.into_iter().map(|a| a / norm).collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn max_deviation(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
