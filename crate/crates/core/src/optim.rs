//! Dense BFGS with Armijo backtracking.

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// A differentiable scalar objective.
pub trait Objective {
    fn value(&self, x: &[f64]) -> Result<f64>;
    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BfgsOptions {
    pub max_iters: usize,
    pub grad_tol: f64,
    pub armijo_c: f64,
    pub backtrack_factor: f64,
    pub max_backtracks: usize,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        Self { max_iters: 200, grad_tol: 1e-6, armijo_c: 1e-4, backtrack_factor: 0.5, max_backtracks: 40 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    GradientTolerance,
    MaxIterations,
    LineSearchFailed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BfgsOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    /// Objective at the start point and after every accepted step.
    pub history: Vec<f64>,
    pub termination: Termination,
}

/// Raised through `on_nonfinite` when the objective or gradient stops being
/// finite at an accepted point.
pub struct NonFinite {
    pub value: f64,
    pub iteration: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Row-major symmetric inverse-Hessian approximation.
struct InverseHessian {
    n: usize,
    h: Vec<f64>,
}

impl InverseHessian {
    fn identity(n: usize) -> Self {
        let mut h = vec![0.0; n * n];
        for i in 0..n {
            h[i * n + i] = 1.0;
        }
        Self { n, h }
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| dot(&self.h[i * self.n..(i + 1) * self.n], v)).collect()
    }

    /// `H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T`
    fn update(&mut self, s: &[f64], y: &[f64], ys: f64) {
        let n = self.n;
        let rho = 1.0 / ys;
        let hy = self.apply(y);
        let yhy = dot(y, &hy);
        let coef = rho + rho * rho * yhy;
        for i in 0..n {
            for j in 0..n {
                self.h[i * n + j] += coef * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
            }
        }
    }
}

/// Minimizes `f` from `x0`. Returns `Err` only when `f` fails; a failed
/// line search ends the run with the last accepted point.
pub fn minimize<F: Objective>(
    f: &F,
    x0: Vec<f64>,
    opts: &BfgsOptions,
    on_nonfinite: impl Fn(NonFinite) -> crate::error::Error,
) -> Result<BfgsOutcome> {
    let n = x0.len();
    let mut x = x0;
    let mut fx = f.value(&x)?;
    let mut g = f.gradient(&x)?;
    if !fx.is_finite() || g.iter().any(|v| !v.is_finite()) {
        return Err(on_nonfinite(NonFinite { value: fx, iteration: 0 }));
    }
    let mut hinv = InverseHessian::identity(n);
    let mut history = vec![fx];
    let mut iterations = 0;

    let termination = loop {
        if norm(&g) < opts.grad_tol {
            break Termination::GradientTolerance;
        }
        if iterations >= opts.max_iters {
            break Termination::MaxIterations;
        }

        let mut dir: Vec<f64> = hinv.apply(&g).into_iter().map(|v| -v).collect();
        let mut slope = dot(&g, &dir);
        if !(slope < 0.0) {
            // lost positive definiteness numerically; fall back to steepest descent
            hinv = InverseHessian::identity(n);
            dir = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
        }

        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_backtracks {
            let trial: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| xi + step * di).collect();
            let ft = f.value(&trial)?;
            if ft <= fx + opts.armijo_c * step * slope {
                accepted = Some((trial, ft));
                break;
            }
            step *= opts.backtrack_factor;
        }
        let Some((x_new, f_new)) = accepted else {
            break Termination::LineSearchFailed;
        };

        let g_new = f.gradient(&x_new)?;
        iterations += 1;
        if !f_new.is_finite() || g_new.iter().any(|v| !v.is_finite()) {
            return Err(on_nonfinite(NonFinite { value: f_new, iteration: iterations }));
        }

        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let ys = dot(&y, &s);
        if ys > 1e-10 {
            hinv.update(&s, &y, ys);
        }

        x = x_new;
        fx = f_new;
        g = g_new;
        history.push(fx);
    };

    Ok(BfgsOutcome { grad_norm: norm(&g), x, value: fx, iterations, history, termination })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    struct Quadratic {
        // f(x) = 0.5 x^T A x - b^T x, A = diag(scales)
        scales: Vec<f64>,
        b: Vec<f64>,
    }

    impl Objective for Quadratic {
        fn value(&self, x: &[f64]) -> Result<f64> {
            Ok(x.iter().zip(&self.scales).zip(&self.b).map(|((xi, a), bi)| 0.5 * a * xi * xi - bi * xi).sum())
        }
        fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
            Ok(x.iter().zip(&self.scales).zip(&self.b).map(|((xi, a), bi)| a * xi - bi).collect())
        }
    }

    struct Rosenbrock;

    impl Objective for Rosenbrock {
        fn value(&self, x: &[f64]) -> Result<f64> {
            Ok((1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2))
        }
        fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
            Ok(vec![
                -2.0 * (1.0 - x[0]) - 400.0 * x[0] * (x[1] - x[0] * x[0]),
                200.0 * (x[1] - x[0] * x[0]),
            ])
        }
    }

    fn nonfinite(e: NonFinite) -> Error {
        Error::NonFiniteLoss { value: e.value, iteration: e.iteration }
    }

    #[test]
    fn solves_ill_conditioned_quadratic() {
        let q = Quadratic { scales: vec![1.0, 10.0, 0.1, 3.0], b: vec![1.0, -2.0, 0.5, 3.0] };
        let out = minimize(&q, vec![0.0; 4], &BfgsOptions::default(), nonfinite).unwrap();
        assert_eq!(out.termination, Termination::GradientTolerance);
        for ((x, a), b) in out.x.iter().zip(&q.scales).zip(&q.b) {
            assert!((x - b / a).abs() < 1e-5);
        }
    }

    #[test]
    fn solves_rosenbrock_monotonically() {
        let opts = BfgsOptions { max_iters: 500, ..Default::default() };
        let out = minimize(&Rosenbrock, vec![-1.2, 1.0], &opts, nonfinite).unwrap();
        assert!((out.x[0] - 1.0).abs() < 1e-5 && (out.x[1] - 1.0).abs() < 1e-5, "{:?}", out);
        assert!(out.history.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(out.history.len(), out.iterations + 1);
    }

    #[test]
    fn zero_iterations_when_already_converged() {
        let q = Quadratic { scales: vec![2.0], b: vec![4.0] };
        let out = minimize(&q, vec![2.0], &BfgsOptions::default(), nonfinite).unwrap();
        assert_eq!(out.iterations, 0);
        assert_eq!(out.x, vec![2.0]);
        assert_eq!(out.termination, Termination::GradientTolerance);
    }

    #[test]
    fn respects_iteration_cap() {
        let opts = BfgsOptions { max_iters: 3, ..Default::default() };
        let out = minimize(&Rosenbrock, vec![-1.2, 1.0], &opts, nonfinite).unwrap();
        assert_eq!(out.iterations, 3);
        assert_eq!(out.termination, Termination::MaxIterations);
    }

    struct Kinked;

    impl Objective for Kinked {
        // |x| with a gradient that lies about the descent direction
        fn value(&self, x: &[f64]) -> Result<f64> {
            Ok(x[0].abs())
        }
        fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
            Ok(vec![-x[0].signum()])
        }
    }

    #[test]
    fn line_search_failure_returns_last_point() {
        let out = minimize(&Kinked, vec![1.0], &BfgsOptions::default(), nonfinite).unwrap();
        assert_eq!(out.termination, Termination::LineSearchFailed);
        assert_eq!(out.x, vec![1.0]);
    }

    struct NanAtStart;

    impl Objective for NanAtStart {
        fn value(&self, _: &[f64]) -> Result<f64> {
            Ok(f64::NAN)
        }
        fn gradient(&self, _: &[f64]) -> Result<Vec<f64>> {
            Ok(vec![0.0])
        }
    }

    #[test]
    fn non_finite_start_aborts() {
        assert!(matches!(
            minimize(&NanAtStart, vec![0.0], &BfgsOptions::default(), nonfinite),
            Err(Error::NonFiniteLoss { iteration: 0, .. })
        ));
    }
}
