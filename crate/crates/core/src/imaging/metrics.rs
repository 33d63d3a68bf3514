use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};

/// Relative error `eta` and relative residual `gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub eta: f64,
    pub gamma: f64,
}

fn fro(a: ArrayView2<f64>) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `||x - x_true|| / ||x_true||`
pub fn relative_error(x: ArrayView2<f64>, x_true: ArrayView2<f64>) -> Result<f64> {
    if x.dim() != x_true.dim() {
        return Err(Error::arg("relative error of differently sized images"));
    }
    let d = fro(x_true);
    if d == 0.0 {
        return Err(Error::arg("relative error against an all-zero reference"));
    }
    Ok(fro((&x - &x_true).view()) / d)
}

/// `||A x - b|| / ||b||`
pub fn relative_residual(ax: ArrayView2<f64>, b: ArrayView2<f64>) -> Result<f64> {
    if ax.dim() != b.dim() {
        return Err(Error::arg("residual of differently sized images"));
    }
    let d = fro(b);
    if d == 0.0 {
        return Err(Error::arg("relative residual against all-zero data"));
    }
    Ok(fro((&ax - &b).view()) / d)
}

/// Both metrics, with `apply` the exact blur.
pub fn compute_metrics<F>(x: ArrayView2<f64>, x_true: ArrayView2<f64>, b: ArrayView2<f64>, apply: F) -> Result<Metrics>
where
    F: FnOnce(ArrayView2<f64>) -> Result<Array2<f64>>,
{
    let eta = relative_error(x, x_true)?;
    let ax = apply(x)?;
    let gamma = relative_residual(ax.view(), b)?;
    Ok(Metrics { eta, gamma })
}
