//! Small dense kernels: Cholesky factorization and triangular solves.

use ndarray::{Array1, Array2, ArrayView1};

use crate::error::{Error, Result};

/// Lower Cholesky factor `L` with `G = L L^T`.
pub fn cholesky_lower(g: &Array2<f64>) -> Result<Array2<f64>> {
    let n = g.nrows();
    if g.ncols() != n {
        return Err(Error::arg("Cholesky needs a square matrix"));
    }
    let mut l = Array2::<f64>::zeros((n, n));
    {
        let buf = l.as_slice_mut().expect("fresh array is contiguous");
        for j in 0..n {
            let (head, tail) = buf.split_at_mut((j + 1) * n);
            let row_j = &head[j * n..j * n + j];
            let diag = g[[j, j]] - dot(row_j, row_j);
            if !(diag > 0.0) || !diag.is_finite() {
                return Err(Error::numeric(format!(
                    "matrix is not positive definite (pivot {j} = {diag:e})"
                )));
            }
            let ljj = diag.sqrt();
            head[j * n + j] = ljj;
            let row_j = &head[j * n..j * n + j];
            for i in j + 1..n {
                let off = (i - j - 1) * n;
                let row_i = &tail[off..off + j];
                let v = (g[[i, j]] - dot(row_i, row_j)) / ljj;
                tail[off + j] = v;
            }
        }
    }
    Ok(l)
}

/// Upper Cholesky factor `R` with `G = R^T R`.
pub fn cholesky_upper(g: &Array2<f64>) -> Result<Array2<f64>> {
    Ok(cholesky_lower(g)?.reversed_axes().as_standard_layout().into_owned())
}

/// Solve `L y = b` for lower-triangular `L`.
pub fn solve_lower(l: &Array2<f64>, b: ArrayView1<f64>) -> Array1<f64> {
    let n = l.nrows();
    let mut y = Array1::zeros(n);
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[[i, k]] * y[k];
        }
        y[i] = s / l[[i, i]];
    }
    y
}

/// Solve `U x = b` for upper-triangular `U`.
pub fn solve_upper(u: &Array2<f64>, b: ArrayView1<f64>) -> Array1<f64> {
    let n = u.nrows();
    let mut x = Array1::zeros(n);
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= u[[i, k]] * x[k];
        }
        x[i] = s / u[[i, i]];
    }
    x
}

/// Solve `L^T x = b` given the lower factor `L`.
pub fn solve_lower_transposed(l: &Array2<f64>, b: ArrayView1<f64>) -> Array1<f64> {
    let n = l.nrows();
    let mut x = b.to_owned();
    for i in (0..n).rev() {
        x[i] /= l[[i, i]];
        let xi = x[i];
        for k in 0..i {
            x[k] -= l[[i, k]] * xi;
        }
    }
    x
}

/// Solve `G x = b` for symmetric positive definite `G`.
pub fn spd_solve(g: &Array2<f64>, b: ArrayView1<f64>) -> Result<Array1<f64>> {
    let l = cholesky_lower(g)?;
    let y = solve_lower(&l, b);
    Ok(solve_lower_transposed(&l, y.view()))
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn frobenius(a: &Array2<f64>) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn norm2(a: ArrayView1<f64>) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_spd(n: usize, seed: u64) -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Array2::from_shape_fn((n, n), |_| rng.random_range(-1.0..1.0));
        a.t().dot(&a) + Array2::<f64>::eye(n) * 0.5
    }

    #[test]
    fn factors_reconstruct() {
        let g = random_spd(9, 1);
        let l = cholesky_lower(&g).unwrap();
        assert!(frobenius(&(l.dot(&l.t()) - &g)) < 1e-12 * frobenius(&g));
        let r = cholesky_upper(&g).unwrap();
        assert!(frobenius(&(r.t().dot(&r) - &g)) < 1e-12 * frobenius(&g));
        for i in 0..9 {
            for k in 0..i {
                assert_eq!(r[[i, k]], 0.0);
            }
        }
    }

    #[test]
    fn solves() {
        let g = random_spd(12, 2);
        let b = Array1::from_iter((0..12).map(|i| i as f64 - 3.0));
        let x = spd_solve(&g, b.view()).unwrap();
        assert!(norm2((g.dot(&x) - &b).view()) < 1e-10 * norm2(b.view()));
        let r = cholesky_upper(&g).unwrap();
        let y = solve_upper(&r, b.view());
        assert!(norm2((r.dot(&y) - &b).view()) < 1e-10 * norm2(b.view()));
    }

    #[test]
    fn indefinite_fails() {
        let g = array![[1.0, 2.0], [2.0, 1.0]];
        assert!(matches!(cholesky_lower(&g), Err(Error::Numeric(_))));
    }
}
