//! Weighted PSF whose truncated SVD error equals the Kronecker operator error.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::linalg::{cholesky_upper, solve_upper};
use crate::psf::{BoundaryCondition, Psf};

#[derive(Debug, Clone, PartialEq)]
pub enum Weights {
    /// Zero BC: `P_bar = W_a P W_b` with diagonal `W_a` (rows) and `W_b` (columns).
    Diagonal { rows: Vec<f64>, cols: Vec<f64> },
    /// Reflective BC: `P_bar = R_rows P R_cols^T` with upper triangular factors.
    Cholesky { rows: Array2<f64>, cols: Array2<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedPsf {
    pub pbar: Array2<f64>,
    pub weights: Weights,
}

impl WeightedPsf {
    pub fn new(psf: &Psf, bc: BoundaryCondition) -> Result<Self> {
        match bc {
            BoundaryCondition::Zero => weight_zero_bc(psf),
            BoundaryCondition::Reflective => weight_reflective(psf),
        }
    }

    /// Map a left singular vector of `P_bar` back to a row generator direction.
    pub(crate) fn unweight_rows(&self, u: ndarray::ArrayView1<f64>) -> Array1<f64> {
        match &self.weights {
            Weights::Diagonal { rows, .. } => {
                Array1::from_iter(u.iter().zip(rows).map(|(x, w)| x / w))
            }
            Weights::Cholesky { rows, .. } => solve_upper(rows, u),
        }
    }

    pub(crate) fn unweight_cols(&self, v: ndarray::ArrayView1<f64>) -> Array1<f64> {
        match &self.weights {
            Weights::Diagonal { cols, .. } => {
                Array1::from_iter(v.iter().zip(cols).map(|(x, w)| x / w))
            }
            Weights::Cholesky { cols, .. } => solve_upper(cols, v),
        }
    }
}

/// `sqrt(n - |i - c|)` for `i = 1..=n`, peaking at the 1-based center `c`.
pub fn zero_bc_weights(n: usize, c: usize) -> Vec<f64> {
    (1..=n)
        .map(|i| ((n - i.abs_diff(c)) as f64).sqrt())
        .collect()
}

pub fn weight_zero_bc(psf: &Psf) -> Result<WeightedPsf> {
    let p = psf.data();
    let n = p.nrows();
    if p.ncols() != n {
        return Err(Error::arg("PSF must be square"));
    }
    let (l, q) = psf.center();
    let rows = zero_bc_weights(n, l);
    let cols = zero_bc_weights(n, q);
    let pbar = Array2::from_shape_fn((n, n), |(i, j)| rows[i] * p[[i, j]] * cols[j]);
    Ok(WeightedPsf {
        pbar,
        weights: Weights::Diagonal { rows, cols },
    })
}

/// Symmetric Toeplitz Gram matrix of `toep(c, j) + hank(c, j)`: diagonal `n`,
/// ones on odd off-diagonals, zeros on even ones.
pub fn reflective_gram(n: usize) -> Array2<f64> {
    Array2::from_shape_fn((n, n), |(i, k)| {
        let d = i.abs_diff(k);
        if d == 0 {
            n as f64
        } else if d % 2 == 1 {
            1.0
        } else {
            0.0
        }
    })
}

pub fn weight_reflective(psf: &Psf) -> Result<WeightedPsf> {
    let p = psf.data();
    let n = p.nrows();
    if p.ncols() != n {
        return Err(Error::arg("PSF must be square"));
    }
    let r = cholesky_upper(&reflective_gram(n))?;
    let pbar = r.dot(p).dot(&r.t());
    Ok(WeightedPsf {
        pbar,
        weights: Weights::Cholesky {
            rows: r.clone(),
            cols: r,
        },
    })
}
