//! RMSE minimization over `(theta, out_scale, out_bias)` with BFGS.
//!
//! Circuit-angle derivatives come from the parameter-shift rule, which is
//! exact here because every angle drives exactly one Pauli rotation:
//! `d<Z>/d(theta_k) = (<Z>(theta_k + pi/2) - <Z>(theta_k - pi/2)) / 2`.
//! They are chained through the loss analytically, as
//! `dRMSE/dp = sum_i r_i * d(y_hat_i)/dp / (N * RMSE)` with `r_i = y_hat_i - y_i`.

use std::f64::consts::FRAC_PI_2;
use std::time::Instant;

use rayon::prelude::*;
use rayon::ThreadPool;
use serde::{Deserialize, Serialize};

use crate::ansatz::parameter_gate_indices;
use crate::dataset::CapacitySeries;
use crate::error::{Error, Result};
use crate::metrics::{rmse, MetricPair};
use crate::model::QnnModel;
use crate::optim::{minimize, BfgsOptions, Objective, Termination};
use crate::quantum::StateVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossKind {
    #[default]
    Rmse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub max_iters: usize,
    pub grad_tol: f64,
    pub seed: u64,
    pub loss_kind: LossKind,
    pub armijo_c: f64,
    pub backtrack_factor: f64,
    pub max_backtracks: usize,
    /// Worker threads for per-sample circuit evaluation. Results do not
    /// depend on this value.
    pub threads: usize,
    /// Train only the output head; circuit angles stay fixed.
    pub freeze_circuit: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            max_iters: 200,
            grad_tol: 1e-6,
            seed: 0,
            loss_kind: LossKind::Rmse,
            armijo_c: 1e-4,
            backtrack_factor: 0.5,
            max_backtracks: 40,
            threads: 1,
            freeze_circuit: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.max_iters < 1 {
            return bad("max_iters must be at least 1".into());
        }
        if !(self.armijo_c > 0.0 && self.armijo_c < 1.0) {
            return bad(format!("armijo_c {} must lie in (0, 1)", self.armijo_c));
        }
        if !(self.backtrack_factor > 0.0 && self.backtrack_factor < 1.0) {
            return bad(format!("backtrack_factor {} must lie in (0, 1)", self.backtrack_factor));
        }
        if !(self.grad_tol >= 0.0) {
            return bad(format!("grad_tol {} must be >= 0", self.grad_tol));
        }
        if self.threads < 1 {
            return bad("threads must be at least 1".into());
        }
        Ok(())
    }

    fn bfgs(&self) -> BfgsOptions {
        BfgsOptions {
            max_iters: self.max_iters,
            grad_tol: self.grad_tol,
            armijo_c: self.armijo_c,
            backtrack_factor: self.backtrack_factor,
            max_backtracks: self.max_backtracks,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub iterations: usize,
    /// Loss at the initial model, then after each accepted iteration (Ah).
    pub loss_history: Vec<f64>,
    pub final_grad_norm: f64,
    pub train_rmse: f64,
    pub test_rmse: f64,
    pub train_mape: f64,
    pub test_mape: f64,
    pub termination: Termination,
    /// seconds
    pub wall_time: f64,
}

/// Loss surface of a model over a fixed dataset, with encoded input states
/// cached (they do not depend on trainable values).
struct QnnObjective<'a> {
    template: &'a QnnModel,
    encoded: Vec<StateVector>,
    targets: Vec<f64>,
    gate_of_param: Vec<usize>,
    freeze_circuit: bool,
    pool: Option<ThreadPool>,
}

struct SampleEval {
    z: f64,
    dz: Vec<f64>,
}

impl<'a> QnnObjective<'a> {
    fn new(template: &'a QnnModel, data: &CapacitySeries, threads: usize, freeze_circuit: bool) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::EmptyDataset);
        }
        template.validate()?;
        let encoded = data
            .records()
            .iter()
            .map(|r| template.encoded_state(template.normalize(r.cycle)))
            .collect::<Result<Vec<_>>>()?;
        let pool = if threads > 1 {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build()
                    .map_err(|e| Error::InvalidConfig(e.to_string()))?,
            )
        } else {
            None
        };
        Ok(Self {
            template,
            encoded,
            targets: data.capacities(),
            gate_of_param: parameter_gate_indices(&template.ansatz),
            freeze_circuit,
            pool,
        })
    }

    /// Runs `work` for every sample index, returning results in index order.
    fn per_sample<T: Send>(&self, work: impl Fn(usize) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
        let n = self.encoded.len();
        match &self.pool {
            Some(pool) => pool.install(|| (0..n).into_par_iter().map(&work).collect()),
            None => (0..n).map(work).collect(),
        }
    }

    fn predictions(&self, model: &QnnModel) -> Result<Vec<f64>> {
        let circuit = model.ansatz_circuit()?;
        self.per_sample(|i| {
            let mut state = self.encoded[i].clone();
            state.apply_circuit(&circuit)?;
            Ok(model.out_scale * state.expectation_z(model.readout_qubit)? + model.out_bias)
        })
    }

    fn sample_evals(&self, model: &QnnModel) -> Result<Vec<SampleEval>> {
        let base = model.ansatz_circuit()?;
        let readout = model.readout_qubit;
        self.per_sample(|i| {
            let run = |circuit: &crate::quantum::Circuit| -> Result<f64> {
                let mut state = self.encoded[i].clone();
                state.apply_circuit(circuit)?;
                state.expectation_z(readout)
            };
            let z = run(&base)?;
            let mut dz = vec![0.0; self.gate_of_param.len()];
            if !self.freeze_circuit {
                let mut shifted = base.clone();
                for (k, &g) in self.gate_of_param.iter().enumerate() {
                    let theta = model.theta.0[k];
                    shifted.set_angle(g, theta + FRAC_PI_2);
                    let plus = run(&shifted)?;
                    shifted.set_angle(g, theta - FRAC_PI_2);
                    let minus = run(&shifted)?;
                    shifted.set_angle(g, theta);
                    dz[k] = (plus - minus) / 2.0;
                }
            }
            Ok(SampleEval { z, dz })
        })
    }
}

impl Objective for QnnObjective<'_> {
    fn value(&self, x: &[f64]) -> Result<f64> {
        let model = self.template.with_trainable(x)?;
        rmse(&self.targets, &self.predictions(&model)?)
    }

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let model = self.template.with_trainable(x)?;
        let evals = self.sample_evals(&model)?;
        let n_theta = model.theta.len();
        let n = evals.len() as f64;

        let residuals: Vec<f64> = evals
            .iter()
            .zip(&self.targets)
            .map(|(e, y)| model.out_scale * e.z + model.out_bias - y)
            .collect();
        let loss = (residuals.iter().map(|r| r * r).sum::<f64>() / n).sqrt();
        let mut grad = vec![0.0; n_theta + 2];
        if loss == 0.0 {
            // exact fit: RMSE is not differentiable here; report the minimum
            return Ok(grad);
        }
        for (e, r) in evals.iter().zip(&residuals) {
            for (g, d) in grad[..n_theta].iter_mut().zip(&e.dz) {
                *g += r * model.out_scale * d;
            }
            grad[n_theta] += r * e.z;
            grad[n_theta + 1] += r;
        }
        let scale = 1.0 / (n * loss);
        grad.iter_mut().for_each(|g| *g *= scale);
        Ok(grad)
    }
}

/// RMSE of the model's predictions on `data` (Ah).
pub fn loss(model: &QnnModel, data: &CapacitySeries) -> Result<f64> {
    QnnObjective::new(model, data, 1, false)?.value(&model.trainable())
}

/// Gradient of [`loss`] with respect to `theta ++ [out_scale, out_bias]`.
/// Returns the zero vector when the loss is exactly zero.
pub fn gradient(model: &QnnModel, data: &CapacitySeries) -> Result<Vec<f64>> {
    QnnObjective::new(model, data, 1, false)?.gradient(&model.trainable())
}

/// Central differences of [`loss`] with step `h`. Test oracle for [`gradient`].
pub fn finite_diff_gradient(model: &QnnModel, data: &CapacitySeries, h: f64) -> Result<Vec<f64>> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidStep(h));
    }
    let objective = QnnObjective::new(model, data, 1, false)?;
    let x = model.trainable();
    let mut grad = Vec::with_capacity(x.len());
    let mut probe = x.clone();
    for k in 0..x.len() {
        probe[k] = x[k] + h;
        let up = objective.value(&probe)?;
        probe[k] = x[k] - h;
        let down = objective.value(&probe)?;
        probe[k] = x[k];
        grad.push((up - down) / (2.0 * h));
    }
    Ok(grad)
}

pub fn evaluate(model: &QnnModel, data: &CapacitySeries) -> Result<MetricPair> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    MetricPair::compute(&data.capacities(), &model.predict_batch(&data.cycles()))
}

pub fn train(
    initial: &QnnModel,
    train_data: &CapacitySeries,
    test_data: &CapacitySeries,
    cfg: &TrainConfig,
) -> Result<(QnnModel, TrainReport)> {
    cfg.validate()?;
    if test_data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let started = Instant::now();
    let objective = QnnObjective::new(initial, train_data, cfg.threads, cfg.freeze_circuit)?;
    let outcome = minimize(&objective, initial.trainable(), &cfg.bfgs(), |e| Error::NonFiniteLoss {
        value: e.value,
        iteration: e.iteration,
    })?;
    let model = initial.with_trainable(&outcome.x)?;
    let train_metrics = evaluate(&model, train_data)?;
    let test_metrics = evaluate(&model, test_data)?;
    let report = TrainReport {
        iterations: outcome.iterations,
        loss_history: outcome.history,
        final_grad_norm: outcome.grad_norm,
        train_rmse: train_metrics.rmse,
        test_rmse: test_metrics.rmse,
        train_mape: train_metrics.mape,
        test_mape: test_metrics.mape,
        termination: outcome.termination,
        wall_time: started.elapsed().as_secs_f64(),
    };
    Ok((model, report))
}
