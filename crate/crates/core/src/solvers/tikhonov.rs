use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use super::{sfista, SolveConfig};
use crate::error::{check_dense, Error, Result};
use crate::image::vec_of;
use crate::kronecker::KronOperator;
use crate::linalg::{norm2, spd_solve};
use crate::operator::LinearOperator;

/// Grid size of the discrepancy search over `[1e-4, 1] * sqrt(L)`.
pub const AUTO_GRID_POINTS: usize = 25;
/// Largest pixel count for which the automatic choice solves Tikhonov directly.
pub const DIRECT_AUTO_LIMIT: usize = 1024;
/// Iterations of the matrix-form probe used above [`DIRECT_AUTO_LIMIT`].
pub const AUTO_PROBE_ITERS: usize = 50;

/// Solve `(A^T A + lambda^2 I) x = A^T b` densely.
pub fn tikhonov_direct(a: &Array2<f64>, b: ArrayView1<f64>, lambda: f64) -> Result<Array1<f64>> {
    check_dense(a.ncols().max(a.nrows()), "tikhonov_direct")?;
    if a.nrows() != b.len() {
        return Err(Error::arg(format!("A has {} rows but b has {}", a.nrows(), b.len())));
    }
    let mut g = a.t().dot(a);
    g.diag_mut().mapv_inplace(|d| d + lambda * lambda);
    spd_solve(&g, a.t().dot(&b).view())
}

/// `1/2 ||A x - b||^2 + lambda^2/2 ||x||^2`
pub fn objective<A: LinearOperator>(a: &A, x: ArrayView1<f64>, b: ArrayView1<f64>, lambda: f64) -> Result<f64> {
    if a.cols() != x.len() || a.rows() != b.len() {
        return Err(Error::arg("objective: dimensions do not conform"));
    }
    let r = a.apply(x) - b;
    Ok(0.5 * r.dot(&r) + 0.5 * lambda * lambda * x.dot(&x))
}

/// Objective evaluated on images, `1/2 ||sum H_i X K_i^T - B||_F^2 + lambda^2/2 ||X||_F^2`.
pub fn objective_matrix(op: &KronOperator, x: ArrayView2<f64>, b: ArrayView2<f64>, lambda: f64) -> Result<f64> {
    if b.dim() != op.dims() {
        return Err(Error::arg("objective: dimensions do not conform"));
    }
    let r = op.apply(x)? - b;
    let rr: f64 = r.iter().map(|v| v * v).sum();
    let xx: f64 = x.iter().map(|v| v * v).sum();
    Ok(0.5 * rr + 0.5 * lambda * lambda * xx)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaChoice {
    pub lambda: f64,
    pub residual: f64,
    pub target: f64,
    /// true when residuals came from the direct solve rather than the probe
    pub direct: bool,
}

/// Discrepancy principle on a log grid: the `lambda` whose Tikhonov residual is
/// closest to `noise_level * ||b||`, with `||b||` estimated from the noisy data.
///
/// The residual grows with `lambda`, so the grid is bisected for the crossing.
pub fn choose_lambda_auto(
    op: &KronOperator,
    b_noisy: ArrayView2<f64>,
    noise_level: f64,
    lipschitz: f64,
) -> Result<LambdaChoice> {
    if !(noise_level.is_finite() && noise_level >= 0.0) {
        return Err(Error::arg(format!("noise level must be nonnegative, got {noise_level}")));
    }
    if !(lipschitz.is_finite() && lipschitz > 0.0) {
        return Err(Error::arg("automatic lambda needs a positive L"));
    }
    if b_noisy.dim() != op.dims() {
        return Err(Error::arg("data does not match the operator size"));
    }
    let bn: f64 = b_noisy.iter().map(|v| v * v).sum::<f64>().sqrt();
    let target = noise_level * bn / (1.0 + noise_level * noise_level).sqrt();
    let scale = lipschitz.sqrt();
    let grid: Vec<f64> = (0..AUTO_GRID_POINTS)
        .map(|i| scale * 10f64.powf(-4.0 + 4.0 * i as f64 / (AUTO_GRID_POINTS - 1) as f64))
        .collect();

    let (m, n) = op.dims();
    let direct = m * n <= DIRECT_AUTO_LIMIT;
    let mut residual: Box<dyn FnMut(f64) -> Result<f64> + '_> = if direct {
        let a = op.to_dense()?;
        let bv = vec_of(&b_noisy.to_owned());
        let mut g = a.t().dot(&a);
        let atb = a.t().dot(&bv);
        let diag = g.diag().to_owned();
        Box::new(move |lam: f64| {
            for (i, d) in diag.iter().enumerate() {
                g[[i, i]] = d + lam * lam;
            }
            let x = spd_solve(&g, atb.view())?;
            Ok(norm2((a.dot(&x) - &bv).view()))
        })
    } else {
        Box::new(move |lam: f64| {
            let cfg = SolveConfig::new(lam, lipschitz)?.max_iter(AUTO_PROBE_ITERS);
            let run = sfista(op, b_noisy, &cfg, Array2::zeros(op.dims()))?;
            let r = op.apply(run.x.view())? - b_noisy;
            Ok(r.iter().map(|v| v * v).sum::<f64>().sqrt())
        })
    };

    // first grid index whose residual reaches the target
    let mut cache = vec![None; grid.len()];
    let mut eval = |i: usize| -> Result<f64> {
        if let Some(r) = cache[i] {
            return Ok(r);
        }
        let r = residual(grid[i])?;
        cache[i] = Some(r);
        Ok(r)
    };
    let (mut lo, mut hi) = (0, grid.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        if eval(mid)? >= target {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let mut best = lo.min(grid.len() - 1);
    if lo > 0 {
        let below = eval(lo - 1)?;
        if lo == grid.len() || (target - below).abs() <= (eval(lo)? - target).abs() {
            best = lo - 1;
        }
    }
    Ok(LambdaChoice {
        lambda: grid[best],
        residual: eval(best)?,
        target,
        direct,
    })
}
