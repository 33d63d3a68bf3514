//! Kronecker product approximation of a spatially invariant blur.
//!
//! The blur matrix acting on `vec(X)` is written as `A = sum_i K_i (x) H_i`,
//! i.e. `A vec(X) = vec(sum_i H_i X K_i^T)`. The terms come from the SVD of a
//! weighted PSF `P_bar`; with that weighting, dropping terms past `s` costs
//! exactly `||A - A_s||_F = sqrt(sum_{i>s} sigma_i^2)`.
//!
//! Row-direction factors `H_i` (size `m`) are built from the left singular
//! vectors with the PSF center row `l`; column-direction factors `K_i` (size
//! `n`) from the right singular vectors with the center column `q`.

mod svd;
mod weights;

use std::fmt::Write as _;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use rayon::prelude::*;

use crate::error::{check_dense, Error, Result};
use crate::image::{unvec, vec_of};
use crate::operator::LinearOperator;
use crate::psf::{BoundaryCondition, Psf};
use crate::structured::{ApplyMode, FactorApplyPlan, StructuredFactor, DEFAULT_CROSSOVER};

pub use svd::{svd, Svd};
pub use weights::{
    reflective_gram, weight_reflective, weight_zero_bc, zero_bc_weights, WeightedPsf, Weights,
};

/// `sqrt(sum_{i>s} sigma_i^2)`.
pub fn truncation_error(sigma: &[f64], s: usize) -> Result<f64> {
    if s > sigma.len() {
        return Err(Error::arg(format!(
            "term count {s} exceeds {} singular values",
            sigma.len()
        )));
    }
    // smallest first
    Ok(sigma[s..].iter().rev().map(|x| x * x).sum::<f64>().sqrt())
}

/// Weighted SVD of a PSF, from which operators of any rank are cut.
#[derive(Debug, Clone)]
pub struct KronDecomposition {
    psf: Psf,
    bc: BoundaryCondition,
    dims: (usize, usize),
    weighted: WeightedPsf,
    svd: Svd,
}

impl KronDecomposition {
    /// Decompose `psf` for `m x n` images. The PSF is zero-padded to the
    /// image size first; images must be square.
    pub fn new(psf: &Psf, bc: BoundaryCondition, dims: (usize, usize)) -> Result<Self> {
        let (m, n) = dims;
        if m != n {
            return Err(Error::arg(format!(
                "Kronecker decomposition needs a square image, got {m}x{n}"
            )));
        }
        let psf = psf.pad_to(m)?;
        let weighted = WeightedPsf::new(&psf, bc)?;
        let svd = svd(&weighted.pbar)?;
        Ok(Self {
            psf,
            bc,
            dims,
            weighted,
            svd,
        })
    }

    /// Singular values of `P_bar`, descending.
    pub fn sigma(&self) -> &[f64] {
        &self.svd.sigma
    }

    pub fn weighted(&self) -> &WeightedPsf {
        &self.weighted
    }

    pub fn svd(&self) -> &Svd {
        &self.svd
    }

    /// The PSF after padding to the image size.
    pub fn psf(&self) -> &Psf {
        &self.psf
    }

    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    /// Number of singular values above `sigma_1 * n * eps`.
    pub fn numerical_rank(&self) -> usize {
        let s = &self.svd.sigma;
        let cutoff = s[0] * s.len() as f64 * f64::EPSILON;
        s.iter().filter(|&&x| x > cutoff).count().max(1)
    }

    /// Row and column generators of term `i` (0-based).
    pub fn generators(&self, i: usize) -> (Array1<f64>, Array1<f64>) {
        let root = self.svd.sigma[i].sqrt();
        let a = self.weighted.unweight_rows(self.svd.u.column(i)) * root;
        let b = self.weighted.unweight_cols(self.svd.v.column(i)) * root;
        (a, b)
    }

    /// Operator keeping the first `s` terms.
    pub fn operator(&self, s: usize) -> Result<KronOperator> {
        self.operator_with_crossover(s, DEFAULT_CROSSOVER)
    }

    pub fn operator_with_crossover(&self, s: usize, crossover: usize) -> Result<KronOperator> {
        let np = self.svd.sigma.len();
        if s < 1 || s > np {
            return Err(Error::arg(format!("term count {s} outside 1..={np}")));
        }
        let (l, q) = self.psf.center();
        let build = |c: &[f64], center| match self.bc {
            BoundaryCondition::Zero => StructuredFactor::toep(c, center),
            BoundaryCondition::Reflective => StructuredFactor::toep_plus_hank(c, center),
        };
        let mut terms = Vec::with_capacity(s);
        for i in 0..s {
            let (a, b) = self.generators(i);
            let h = build(a.as_slice().expect("contiguous"), l)?;
            let k = build(b.as_slice().expect("contiguous"), q)?;
            terms.push(KronTerm::new(h, k, crossover));
        }
        Ok(KronOperator {
            terms,
            sigma: self.svd.sigma.clone(),
            eps_s: truncation_error(&self.svd.sigma, s)?,
            bc: self.bc,
            dims: self.dims,
        })
    }

    /// Untruncated operator (all numerically nonzero terms); equals the exact blur.
    pub fn full_operator(&self) -> Result<KronOperator> {
        self.operator(self.numerical_rank())
    }

    /// Text table of `i`, `sigma_i`, and the error `eps_i` left after keeping `i` terms.
    pub fn report(&self) -> String {
        decomposition_report(&self.svd.sigma)
    }
}

/// Plain-text decomposition table consumed by the CLI.
pub fn decomposition_report(sigma: &[f64]) -> String {
    let mut out = String::from("# i sigma_i eps_i\n");
    for i in 1..=sigma.len() {
        let eps = truncation_error(sigma, i).expect("i within range");
        writeln!(out, "{i} {:.17e} {:.17e}", sigma[i - 1], eps).expect("write to string");
    }
    out
}

/// Decompose `psf` and keep `s` terms.
pub fn decompose(
    psf: &Psf,
    bc: BoundaryCondition,
    s: usize,
    image_dims: (usize, usize),
) -> Result<KronOperator> {
    KronDecomposition::new(psf, bc, image_dims)?.operator(s)
}

/// One `K (x) H` pair with its multiplication plans.
#[derive(Debug, Clone)]
pub struct KronTerm {
    h: StructuredFactor,
    k: StructuredFactor,
    h_plan: FactorApplyPlan,
    k_plan: FactorApplyPlan,
}

impl KronTerm {
    pub fn new(h: StructuredFactor, k: StructuredFactor, crossover: usize) -> Self {
        let h_plan = FactorApplyPlan::with_crossover(&h, crossover);
        let k_plan = FactorApplyPlan::with_crossover(&k, crossover);
        Self { h, k, h_plan, k_plan }
    }

    /// Row-direction factor (size `m`).
    pub fn h(&self) -> &StructuredFactor {
        &self.h
    }

    /// Column-direction factor (size `n`).
    pub fn k(&self) -> &StructuredFactor {
        &self.k
    }

    /// `H X K^T`
    fn forward(&self, x: ArrayView2<f64>) -> Array2<f64> {
        let hx = self.h_plan.apply(x, ApplyMode::Left).expect("dims checked");
        // (H X) K^T = (K (H X)^T)^T
        let w = self.k_plan.apply(hx.t(), ApplyMode::Left).expect("dims checked");
        w.reversed_axes()
    }

    /// `H^T Y K`
    fn adjoint(&self, y: ArrayView2<f64>) -> Array2<f64> {
        // Y K = (K^T Y^T)^T
        let w = self.k_plan.apply(y.t(), ApplyMode::LeftTranspose).expect("dims checked");
        self.h_plan.apply(w.t(), ApplyMode::LeftTranspose).expect("dims checked")
    }
}

/// `A_s = sum_{i<=s} K_i (x) H_i` in factored form.
#[derive(Debug, Clone)]
pub struct KronOperator {
    terms: Vec<KronTerm>,
    sigma: Vec<f64>,
    eps_s: f64,
    bc: BoundaryCondition,
    dims: (usize, usize),
}

impl KronOperator {
    /// Assemble an operator from explicit factor pairs `(H_i, K_i)`.
    pub fn from_terms(
        pairs: Vec<(StructuredFactor, StructuredFactor)>,
        bc: BoundaryCondition,
    ) -> Result<Self> {
        let Some((h0, k0)) = pairs.first() else {
            return Err(Error::arg("operator needs at least one term"));
        };
        let dims = (h0.n(), k0.n());
        if pairs.iter().any(|(h, k)| h.n() != dims.0 || k.n() != dims.1) {
            return Err(Error::arg("all terms must share factor sizes"));
        }
        let terms = pairs
            .into_iter()
            .map(|(h, k)| KronTerm::new(h, k, DEFAULT_CROSSOVER))
            .collect();
        Ok(Self {
            terms,
            sigma: Vec::new(),
            eps_s: 0.0,
            bc,
            dims,
        })
    }

    pub fn terms(&self) -> &[KronTerm] {
        &self.terms
    }

    pub fn s(&self) -> usize {
        self.terms.len()
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    /// Frobenius norm of the discarded singular value tail.
    pub fn eps_s(&self) -> f64 {
        self.eps_s
    }

    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    fn check(&self, x: &ArrayView2<f64>) -> Result<()> {
        if x.dim() != self.dims {
            return Err(Error::arg(format!(
                "operator expects {:?} images, got {:?}",
                self.dims,
                x.dim()
            )));
        }
        Ok(())
    }

    /// `sum_i H_i X K_i^T`, summed in term order.
    pub fn apply(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        self.check(&x)?;
        let mut y = Array2::zeros(self.dims);
        for term in &self.terms {
            y += &term.forward(x);
        }
        Ok(y)
    }

    /// `sum_i H_i^T Y K_i`, summed in term order.
    pub fn apply_adjoint(&self, y: ArrayView2<f64>) -> Result<Array2<f64>> {
        self.check(&y)?;
        let mut x = Array2::zeros(self.dims);
        for term in &self.terms {
            x += &term.adjoint(y);
        }
        Ok(x)
    }

    /// Terms evaluated concurrently, reduced in term order; bitwise equal to [`Self::apply`].
    pub fn apply_parallel(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        self.check(&x)?;
        let parts: Vec<Array2<f64>> = self.terms.par_iter().map(|t| t.forward(x)).collect();
        Ok(reduce_in_order(parts, self.dims))
    }

    pub fn apply_adjoint_parallel(&self, y: ArrayView2<f64>) -> Result<Array2<f64>> {
        self.check(&y)?;
        let parts: Vec<Array2<f64>> = self.terms.par_iter().map(|t| t.adjoint(y)).collect();
        Ok(reduce_in_order(parts, self.dims))
    }

    /// Dense `sum_i K_i (x) H_i`, block `(r, c)` being `K[r, c] * H`.
    pub fn to_dense(&self) -> Result<Array2<f64>> {
        let (m, n) = self.dims;
        check_dense(m * n, "kron_to_dense")?;
        let mut a = Array2::zeros((m * n, m * n));
        for term in &self.terms {
            let h = term.h.to_dense()?;
            let k = term.k.to_dense()?;
            for br in 0..n {
                for bc in 0..n {
                    let kv = k[[br, bc]];
                    if kv == 0.0 {
                        continue;
                    }
                    let mut block = a.slice_mut(ndarray::s![br * m..(br + 1) * m, bc * m..(bc + 1) * m]);
                    block.scaled_add(kv, &h);
                }
            }
        }
        Ok(a)
    }
}

fn reduce_in_order(parts: Vec<Array2<f64>>, dims: (usize, usize)) -> Array2<f64> {
    let mut acc = Array2::zeros(dims);
    for p in parts {
        acc += &p;
    }
    acc
}

/// `vec(kron_apply(op, X))`
pub fn kron_apply(op: &KronOperator, x: ArrayView2<f64>) -> Result<Array2<f64>> {
    op.apply(x)
}

pub fn kron_apply_adjoint(op: &KronOperator, y: ArrayView2<f64>) -> Result<Array2<f64>> {
    op.apply_adjoint(y)
}

pub fn kron_to_dense(op: &KronOperator) -> Result<Array2<f64>> {
    op.to_dense()
}

impl LinearOperator for KronOperator {
    fn rows(&self) -> usize {
        self.dims.0 * self.dims.1
    }

    fn cols(&self) -> usize {
        self.rows()
    }

    fn apply(&self, x: ArrayView1<f64>) -> Array1<f64> {
        let (m, n) = self.dims;
        let xm = unvec(m, n, x).expect("length checked by caller");
        vec_of(&KronOperator::apply(self, xm.view()).expect("dims match"))
    }

    fn apply_adjoint(&self, y: ArrayView1<f64>) -> Array1<f64> {
        let (m, n) = self.dims;
        let ym = unvec(m, n, y).expect("length checked by caller");
        vec_of(&KronOperator::apply_adjoint(self, ym.view()).expect("dims match"))
    }
}

#[cfg(test)]
mod tests;
