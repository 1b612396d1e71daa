//! Quantum-neural-network regression of battery capacity fade.
//!
//! A cycle count is angle-encoded into an n-qubit register, a layered
//! rotation/CNOT circuit is applied, and `<Z>` on one qubit is decoded into
//! capacity through an affine head. Circuit and head parameters are fitted
//! with BFGS, using parameter-shift gradients for the circuit angles. All
//! simulation is exact statevector arithmetic.

pub mod ansatz;
pub mod dataset;
pub mod encoder;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod model;
pub mod optim;
pub mod quantum;
pub mod sweep;
pub mod trainer;

pub use ansatz::{ansatz_circuit, init_params, param_count, AnsatzSpec, ParameterVector};
pub use dataset::{
    chronological_split, eol_cycle, fit_bounds, load_csv, random_split, soh, write_csv, CapacityRecord,
    CapacitySeries, SyntheticFade,
};
pub use encoder::{encoding_circuit, normalize_cycle, EncodingMode, EncodingSpec, FeatureBounds};
pub use error::{Error, Result};
pub use experiment::{run_experiment, ExperimentConfig, ExperimentOutcome, RunReport, SplitMode};
pub use metrics::{mape, rmse, MetricPair};
pub use model::{load_model, save_model, QnnModel};
pub use quantum::{Circuit, Gate, StateVector};
pub use sweep::{run_sweep, sweep_csv, SweepGrid, SweepRow};
pub use trainer::{evaluate, finite_diff_gradient, gradient, loss, train, TrainConfig, TrainReport};
