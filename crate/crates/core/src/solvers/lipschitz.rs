use ndarray::Array1;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::operator::LinearOperator;
use crate::rng::{self, Stream};

/// Multiplier applied to the Rayleigh quotient so the estimate bounds `lambda_max(A^T A)` from above.
pub const SAFETY_FACTOR: f64 = 1.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzEstimate {
    /// `SAFETY_FACTOR * rayleigh`, floored at machine epsilon
    pub value: f64,
    pub rayleigh: f64,
    /// set when `A^T A` annihilated the iterate (zero operator)
    pub degenerate: bool,
}

/// Power iteration on `x -> A^T A x` from a seeded Gaussian start.
pub fn estimate_lipschitz<A: LinearOperator>(a: &A, iters: usize, seed: u64) -> Result<LipschitzEstimate> {
    if iters < 1 {
        return Err(Error::arg("power iteration needs at least one step"));
    }
    let n = a.cols();
    let mut rng = rng::stream(seed, Stream::Lipschitz, 0);
    let mut x: Array1<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let nx = x.dot(&x).sqrt();
    x /= nx;
    let mut rayleigh = 0.0;
    for _ in 0..iters {
        let y = a.apply_adjoint(a.apply(x.view()).view());
        rayleigh = x.dot(&y);
        let ny = y.dot(&y).sqrt();
        if !(ny > 0.0) || !ny.is_finite() {
            break;
        }
        x = y / ny;
    }
    if !rayleigh.is_finite() {
        return Err(Error::numeric("power iteration overflowed"));
    }
    let degenerate = rayleigh <= f64::EPSILON;
    Ok(LipschitzEstimate {
        value: (SAFETY_FACTOR * rayleigh).max(f64::EPSILON),
        rayleigh: rayleigh.max(0.0),
        degenerate,
    })
}
