//! FISTA on `x` and its matrix form on `X` for the Tikhonov objective
//! `1/2 ||A x - b||^2 + lambda^2/2 ||x||^2`.

mod history;
mod lipschitz;
mod tikhonov;

use std::time::{Duration, Instant};

use ndarray::{Array, Array1, Array2, ArrayView, ArrayView1, ArrayView2, Dimension};

use crate::error::{Error, Result};
use crate::kronecker::KronOperator;
use crate::operator::LinearOperator;

pub use history::{write_history_csv, HISTORY_HEADER};
pub use lipschitz::{estimate_lipschitz, LipschitzEstimate, SAFETY_FACTOR};
pub use tikhonov::{
    choose_lambda_auto, objective, objective_matrix, tikhonov_direct, LambdaChoice, AUTO_GRID_POINTS,
    AUTO_PROBE_ITERS, DIRECT_AUTO_LIMIT,
};

/// Solver parameters. Builder-style setters; [`SolveConfig::validate`] runs before every solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub lambda: f64,
    pub lipschitz: f64,
    pub max_iter: usize,
    /// Stop once `||x_k - x_{k-1}|| / ||x_{k-1}|| < rel_tol`; 0 runs to `max_iter`.
    pub rel_tol: f64,
    pub record_history: bool,
    /// Evaluate Kronecker terms concurrently (matrix form only).
    pub parallel: bool,
}

impl SolveConfig {
    pub fn new(lambda: f64, lipschitz: f64) -> Result<Self> {
        let cfg = Self {
            lambda,
            lipschitz,
            max_iter: 50,
            rel_tol: 0.0,
            record_history: false,
            parallel: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn max_iter(mut self, n: usize) -> Self {
        self.max_iter = n;
        self
    }

    pub fn rel_tol(mut self, tol: f64) -> Self {
        self.rel_tol = tol;
        self
    }

    pub fn record_history(mut self, on: bool) -> Self {
        self.record_history = on;
        self
    }

    pub fn parallel(mut self, on: bool) -> Self {
        self.parallel = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::arg(format!("lambda must be positive, got {}", self.lambda)));
        }
        if !(self.lipschitz.is_finite() && self.lipschitz > 0.0) {
            return Err(Error::arg(format!("L must be positive, got {}", self.lipschitz)));
        }
        if self.max_iter < 1 {
            return Err(Error::arg("max_iter must be at least 1"));
        }
        if !(self.rel_tol.is_finite() && self.rel_tol >= 0.0) {
            return Err(Error::arg(format!("rel_tol must be nonnegative, got {}", self.rel_tol)));
        }
        Ok(())
    }
}

/// One recorded iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct IterRecord {
    pub iter: usize,
    /// `t_k` used to form `y_{k+1}`
    pub t: f64,
    pub objective: f64,
    pub eta: Option<f64>,
    pub gamma: Option<f64>,
    /// cumulative solver time up to this iteration
    pub ms: f64,
}

/// Optional quality numbers supplied by a monitor callback.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Probe {
    pub eta: Option<f64>,
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SolveRun<X> {
    pub x: X,
    pub iterations: usize,
    pub history: Vec<IterRecord>,
    /// Wall time of the iteration loop, excluding objective and monitor evaluation.
    pub solve_ms: f64,
}

/// `(1 + sqrt(1 + 4 t^2)) / 2`
pub fn momentum_next(t: f64) -> f64 {
    (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0
}

type Monitor<'a, D> = &'a mut dyn FnMut(ArrayView<f64, D>) -> Probe;

fn norm<D: Dimension>(a: &Array<f64, D>) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Shared iteration; `apply`/`adjoint` act on arrays of the iterate's shape.
fn run<D, F, G>(
    apply: F,
    adjoint: G,
    b: ArrayView<f64, D>,
    cfg: &SolveConfig,
    x0: Array<f64, D>,
    mut monitor: Option<Monitor<'_, D>>,
) -> Result<SolveRun<Array<f64, D>>>
where
    D: Dimension,
    F: Fn(ArrayView<f64, D>) -> Array<f64, D>,
    G: Fn(ArrayView<f64, D>) -> Array<f64, D>,
{
    cfg.validate()?;
    if b.shape() != x0.shape() {
        return Err(Error::arg(format!(
            "data has shape {:?} but the starting point has {:?}",
            b.shape(),
            x0.shape()
        )));
    }
    let l = cfg.lipschitz;
    let lam2 = cfg.lambda * cfg.lambda;
    let denom = l + lam2;
    let mut x_prev = x0;
    let mut y = x_prev.clone();
    let mut t = 1.0;
    let mut elapsed = Duration::ZERO;
    let mut history = Vec::new();
    let mut iterations = 0;
    for k in 1..=cfg.max_iter {
        let start = Instant::now();
        let mut r = apply(y.view());
        r -= &b;
        let g = adjoint(r.view());
        // x_k = (L y_k - A^T (A y_k - b)) / (L + lambda^2)
        let mut x = y;
        x.zip_mut_with(&g, |xv, &gv| *xv = (l * *xv - gv) / denom);
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::numeric(format!(
                "non-finite iterate at iteration {k}; L may be underestimated"
            )));
        }
        let t_next = momentum_next(t);
        let beta = (t - 1.0) / t_next;
        let diff = &x - &x_prev;
        y = &x + &(&diff * beta);
        elapsed += start.elapsed();
        iterations = k;

        if cfg.record_history {
            let probe = monitor.as_mut().map(|m| m(x.view())).unwrap_or_default();
            let mut ax = apply(x.view());
            ax -= &b;
            let phi = 0.5 * ax.iter().map(|v| v * v).sum::<f64>()
                + 0.5 * lam2 * x.iter().map(|v| v * v).sum::<f64>();
            history.push(IterRecord {
                iter: k,
                t,
                objective: phi,
                eta: probe.eta,
                gamma: probe.gamma,
                ms: elapsed.as_secs_f64() * 1e3,
            });
        }

        let change = norm(&diff);
        let base = norm(&x_prev);
        x_prev = x;
        t = t_next;
        if cfg.rel_tol > 0.0 && base > 0.0 && change / base < cfg.rel_tol {
            break;
        }
    }
    Ok(SolveRun {
        x: x_prev,
        iterations,
        history,
        solve_ms: elapsed.as_secs_f64() * 1e3,
    })
}

fn check_operator<A: LinearOperator>(a: &A, b: usize, x0: usize) -> Result<()> {
    if a.rows() != b || a.cols() != x0 {
        return Err(Error::arg(format!(
            "operator is {}x{} but b has {} entries and x0 has {}",
            a.rows(),
            a.cols(),
            b,
            x0
        )));
    }
    if a.rows() != a.cols() {
        return Err(Error::arg("FISTA here expects a square operator"));
    }
    Ok(())
}

/// FISTA on the vectorized problem with any linear operator.
pub fn fista<A: LinearOperator>(
    a: &A,
    b: ArrayView1<f64>,
    cfg: &SolveConfig,
    x0: Array1<f64>,
) -> Result<SolveRun<Array1<f64>>> {
    check_operator(a, b.len(), x0.len())?;
    run(|v| a.apply(v), |v| a.apply_adjoint(v), b, cfg, x0, None)
}

/// [`fista`] with a callback evaluated on each recorded iterate.
pub fn fista_monitored<A: LinearOperator>(
    a: &A,
    b: ArrayView1<f64>,
    cfg: &SolveConfig,
    x0: Array1<f64>,
    monitor: &mut dyn FnMut(ArrayView1<f64>) -> Probe,
) -> Result<SolveRun<Array1<f64>>> {
    check_operator(a, b.len(), x0.len())?;
    run(|v| a.apply(v), |v| a.apply_adjoint(v), b, cfg, x0, Some(monitor))
}

/// Matrix-form FISTA on `sum_i H_i X K_i^T = B`.
pub fn sfista(
    op: &KronOperator,
    b: ArrayView2<f64>,
    cfg: &SolveConfig,
    x0: Array2<f64>,
) -> Result<SolveRun<Array2<f64>>> {
    sfista_inner(op, b, cfg, x0, None)
}

pub fn sfista_monitored(
    op: &KronOperator,
    b: ArrayView2<f64>,
    cfg: &SolveConfig,
    x0: Array2<f64>,
    monitor: &mut dyn FnMut(ArrayView2<f64>) -> Probe,
) -> Result<SolveRun<Array2<f64>>> {
    sfista_inner(op, b, cfg, x0, Some(monitor))
}

fn sfista_inner(
    op: &KronOperator,
    b: ArrayView2<f64>,
    cfg: &SolveConfig,
    x0: Array2<f64>,
    monitor: Option<Monitor<'_, ndarray::Ix2>>,
) -> Result<SolveRun<Array2<f64>>> {
    if b.dim() != op.dims() || x0.dim() != op.dims() {
        return Err(Error::arg(format!(
            "operator acts on {:?} images, got B {:?} and X0 {:?}",
            op.dims(),
            b.dim(),
            x0.dim()
        )));
    }
    if cfg.parallel {
        run(
            |v| op.apply_parallel(v).expect("dims checked"),
            |v| op.apply_adjoint_parallel(v).expect("dims checked"),
            b,
            cfg,
            x0,
            monitor,
        )
    } else {
        run(
            |v| op.apply(v).expect("dims checked"),
            |v| op.apply_adjoint(v).expect("dims checked"),
            b,
            cfg,
            x0,
            monitor,
        )
    }
}
