//! Angle encoding of the scalar cycle feature.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{Circuit, Gate};

/// Cycle range seen during training; maps onto `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureBounds {
    pub min_cycle: u32,
    pub max_cycle: u32,
}

impl FeatureBounds {
    pub fn new(min_cycle: u32, max_cycle: u32) -> Result<Self> {
        let bounds = Self { min_cycle, max_cycle };
        bounds.validate()?;
        Ok(bounds)
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_cycle >= self.max_cycle {
            return Err(Error::DegenerateBounds { min: self.min_cycle, max: self.max_cycle });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EncodingMode {
    /// `RY(arcsin x)` then `RZ(arccos x^2)` on every qubit.
    #[default]
    Arc,
    /// `RY(arccos x)` on every qubit; the angle lies in `[0, pi]`.
    Simple,
}

impl std::str::FromStr for EncodingMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "arc" => Ok(EncodingMode::Arc),
            "simple" => Ok(EncodingMode::Simple),
            other => Err(format!("unknown encoding `{other}` (expected arc|simple)")),
        }
    }
}

impl std::fmt::Display for EncodingMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EncodingMode::Arc => "arc",
            EncodingMode::Simple => "simple",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EncodingSpec {
    pub n_qubits: usize,
    pub mode: EncodingMode,
}

/// Affine map of `cycle` onto `[-1, 1]`, clamped outside the bounds.
pub fn normalize_cycle(cycle: f64, bounds: &FeatureBounds) -> Result<f64> {
    bounds.validate()?;
    let lo = f64::from(bounds.min_cycle);
    let hi = f64::from(bounds.max_cycle);
    let x = 2.0 * (cycle - lo) / (hi - lo) - 1.0;
    Ok(x.clamp(-1.0, 1.0))
}

/// Builds the encoding circuit `U(x)`; every qubit receives the same encoding.
pub fn encoding_circuit(x_norm: f64, spec: &EncodingSpec) -> Result<Circuit> {
    if !(x_norm.abs() <= 1.0 + 1e-12) {
        return Err(Error::FeatureOutOfRange(x_norm));
    }
    let x = x_norm.clamp(-1.0, 1.0);
    let mut circuit = Circuit::new(spec.n_qubits)?;
    match spec.mode {
        EncodingMode::Arc => {
            let (ry, rz) = (x.asin(), (x * x).acos());
            for q in 0..spec.n_qubits {
                circuit.push(Gate::ry(q, ry))?;
                circuit.push(Gate::rz(q, rz))?;
            }
        }
        EncodingMode::Simple => {
            let ry = x.acos();
            for q in 0..spec.n_qubits {
                circuit.push(Gate::ry(q, ry))?;
            }
        }
    }
    Ok(circuit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{apply_circuit, new_zero_state};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_6};

    fn spec(n_qubits: usize, mode: EncodingMode) -> EncodingSpec {
        EncodingSpec { n_qubits, mode }
    }

    #[test]
    fn normalize_endpoints_and_midpoint() {
        let b = FeatureBounds::new(1, 168).unwrap();
        assert_eq!(normalize_cycle(1.0, &b).unwrap(), -1.0);
        assert_eq!(normalize_cycle(168.0, &b).unwrap(), 1.0);
        assert_eq!(normalize_cycle(84.5, &b).unwrap(), 0.0);
        assert_eq!(normalize_cycle(500.0, &b).unwrap(), 1.0);
        assert_eq!(normalize_cycle(0.0, &b).unwrap(), -1.0);
    }

    #[test]
    fn degenerate_bounds() {
        assert!(matches!(FeatureBounds::new(5, 5), Err(Error::DegenerateBounds { min: 5, max: 5 })));
        let b = FeatureBounds { min_cycle: 9, max_cycle: 9 };
        assert!(normalize_cycle(9.0, &b).is_err());
    }

    #[test]
    fn simple_mode_gates() {
        let c = encoding_circuit(0.0, &spec(1, EncodingMode::Simple)).unwrap();
        assert_eq!(c.gates(), &[Gate::ry(0, FRAC_PI_2)]);
        let c = encoding_circuit(1.0, &spec(1, EncodingMode::Simple)).unwrap();
        assert_eq!(c.gates(), &[Gate::ry(0, 0.0)]);
        let s = apply_circuit(&new_zero_state(1).unwrap(), &c).unwrap();
        assert_eq!(s.expectation_z(0).unwrap(), 1.0);
    }

    #[test]
    fn arc_mode_gates_and_expectation() {
        let c = encoding_circuit(0.5, &spec(2, EncodingMode::Arc)).unwrap();
        assert_eq!(c.len(), 4);
        for q in 0..2 {
            let ry = c.gates()[2 * q];
            let rz = c.gates()[2 * q + 1];
            assert!(matches!(ry, Gate::Ry { target, .. } if target == q));
            assert!((ry.angle().unwrap() - FRAC_PI_6).abs() < 1e-15);
            assert!(matches!(rz, Gate::Rz { target, .. } if target == q));
            assert_eq!(rz.angle().unwrap(), 0.25f64.acos());
        }
        let s = apply_circuit(&new_zero_state(2).unwrap(), &c).unwrap();
        for q in 0..2 {
            assert!((s.expectation_z(q).unwrap() - 0.8660254037844386).abs() < 1e-12);
        }
    }

    #[test]
    fn feature_range_guard() {
        let sp = spec(1, EncodingMode::Arc);
        assert!(matches!(encoding_circuit(1.1, &sp), Err(Error::FeatureOutOfRange(_))));
        assert!(encoding_circuit(f64::NAN, &sp).is_err());
        assert!(encoding_circuit(1.0 + 1e-13, &sp).is_ok());
    }

    #[test]
    fn mode_parse_roundtrip() {
        for mode in [EncodingMode::Arc, EncodingMode::Simple] {
            assert_eq!(mode.to_string().parse::<EncodingMode>().unwrap(), mode);
        }
        assert!("amplitude".parse::<EncodingMode>().is_err());
    }

    proptest! {
        #[test]
        fn simple_mode_roundtrips_feature(x in -1.0f64..=1.0, n in 1usize..4) {
            let c = encoding_circuit(x, &spec(n, EncodingMode::Simple)).unwrap();
            let s = apply_circuit(&new_zero_state(n).unwrap(), &c).unwrap();
            for q in 0..n {
                prop_assert!((s.expectation_z(q).unwrap() - x).abs() < 1e-12);
            }
        }

        #[test]
        fn arc_mode_expectation_is_sqrt_one_minus_x2(x in -1.0f64..=1.0, n in 1usize..4) {
            let c = encoding_circuit(x, &spec(n, EncodingMode::Arc)).unwrap();
            let s = apply_circuit(&new_zero_state(n).unwrap(), &c).unwrap();
            let expect = (1.0 - x * x).sqrt();
            for q in 0..n {
                prop_assert!((s.expectation_z(q).unwrap() - expect).abs() < 1e-12);
            }
        }

        #[test]
        fn normalize_is_monotone(a in 0u32..400, b in 0u32..400) {
            let bounds = FeatureBounds::new(10, 300).unwrap();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(normalize_cycle(lo.into(), &bounds).unwrap() <= normalize_cycle(hi.into(), &bounds).unwrap());
        }

        #[test]
        fn encoding_is_deterministic(x in -1.0f64..=1.0) {
            let sp = spec(3, EncodingMode::Arc);
            prop_assert_eq!(encoding_circuit(x, &sp).unwrap(), encoding_circuit(x, &sp).unwrap());
        }
    }
}
