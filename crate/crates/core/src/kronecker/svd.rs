//! One-sided (Hestenes) Jacobi SVD for small dense matrices.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::linalg::dot;

const MAX_SWEEPS: usize = 80;
const TOL: f64 = 1e-15;

/// Thin SVD `M = U diag(sigma) V^T`, singular values descending.
#[derive(Debug, Clone)]
pub struct Svd {
    /// `rows x k`, orthonormal columns
    pub u: Array2<f64>,
    pub sigma: Vec<f64>,
    /// `cols x k`, orthonormal columns
    pub v: Array2<f64>,
}

pub fn svd(m: &Array2<f64>) -> Result<Svd> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::arg("SVD input has non-finite entries"));
    }
    let (r, c) = m.dim();
    if r == 0 || c == 0 {
        return Err(Error::arg("SVD input is empty"));
    }
    if r >= c {
        jacobi_tall(m)
    } else {
        let t = jacobi_tall(&m.t().to_owned())?;
        Ok(Svd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        })
    }
}

/// Requires `rows >= cols`.
fn jacobi_tall(m: &Array2<f64>) -> Result<Svd> {
    let (r, c) = m.dim();
    // column-major working copies
    let mut u: Vec<f64> = m.t().iter().copied().collect();
    let mut v = vec![0.0; c * c];
    for i in 0..c {
        v[i * c + i] = 1.0;
    }
    let fro2: f64 = u.iter().map(|x| x * x).sum();
    // columns below this squared norm are roundoff and are left alone
    let negligible = (f64::EPSILON * f64::EPSILON) * fro2;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..c.saturating_sub(1) {
            for q in p + 1..c {
                let (alpha, beta, gamma) = {
                    let up = &u[p * r..(p + 1) * r];
                    let uq = &u[q * r..(q + 1) * r];
                    (dot(up, up), dot(uq, uq), dot(up, uq))
                };
                if alpha <= negligible || beta <= negligible {
                    continue;
                }
                if gamma.abs() <= TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                rotate(&mut u, r, p, q, cs, sn);
                rotate(&mut v, c, p, q, cs, sn);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::numeric(format!(
            "Jacobi SVD did not converge in {MAX_SWEEPS} sweeps"
        )));
    }

    let norms: Vec<f64> = (0..c).map(|j| dot(&u[j * r..(j + 1) * r], &u[j * r..(j + 1) * r]).sqrt()).collect();
    let mut order: Vec<usize> = (0..c).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));

    let sigma_max = norms[order[0]];
    let cutoff = sigma_max * f64::EPSILON * r as f64;
    let mut uo = Array2::zeros((r, c));
    let mut vo = Array2::zeros((c, c));
    let mut sigma = Vec::with_capacity(c);
    let mut missing = Vec::new();
    for (dst, &src) in order.iter().enumerate() {
        let s = norms[src];
        sigma.push(s);
        for i in 0..c {
            vo[[i, dst]] = v[src * c + i];
        }
        if s > cutoff && s > 0.0 {
            for i in 0..r {
                uo[[i, dst]] = u[src * r + i] / s;
            }
        } else {
            missing.push(dst);
        }
    }
    complete_basis(&mut uo, &missing);
    Ok(Svd { u: uo, sigma, v: vo })
}

fn rotate(buf: &mut [f64], len: usize, p: usize, q: usize, cs: f64, sn: f64) {
    let (lo, hi) = buf.split_at_mut(q * len);
    let cp = &mut lo[p * len..(p + 1) * len];
    let cq = &mut hi[..len];
    for (a, b) in cp.iter_mut().zip(cq.iter_mut()) {
        let (x, y) = (*a, *b);
        *a = cs * x - sn * y;
        *b = sn * x + cs * y;
    }
}

/// Fill the listed columns with unit vectors orthogonal to all other columns.
fn complete_basis(u: &mut Array2<f64>, missing: &[usize]) {
    let r = u.nrows();
    let mut candidate = 0;
    for &col in missing {
        loop {
            assert!(candidate < r, "cannot complete an orthonormal basis");
            let mut w = ndarray::Array1::<f64>::zeros(r);
            w[candidate] = 1.0;
            candidate += 1;
            // two Gram-Schmidt passes
            for _ in 0..2 {
                for k in 0..u.ncols() {
                    if k == col {
                        continue;
                    }
                    let proj = u.column(k).dot(&w);
                    w.scaled_add(-proj, &u.column(k));
                }
            }
            let nw = w.dot(&w).sqrt();
            if nw > 0.5 {
                u.column_mut(col).assign(&(w / nw));
                break;
            }
        }
    }
}
