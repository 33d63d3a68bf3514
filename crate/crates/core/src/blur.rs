//! Spatial-domain blur under zero and reflective boundary conditions.
//!
//! `Y(i,j) = sum_{a,b} P(a,b) X~(i - a + l, j - b + q)` where `X~` extends `X`
//! by the boundary rule. This is the reference operator the Kronecker
//! decomposition must reproduce; it costs `O(n_p^2 m n)` and is not meant for
//! the solver loop.

use ndarray::Array2;

use crate::error::{check_dense, Result};
use crate::image::ImageGrid;
use crate::psf::{BoundaryCondition, Psf};

/// Map a 0-based, possibly out-of-range index into `0..len`; `None` means zero.
///
/// Reflection is whole-sample: index `-1` reads element 0, `len` reads `len - 1`.
#[inline]
pub(crate) fn fold(idx: isize, len: usize, bc: BoundaryCondition) -> Option<usize> {
    let len_i = len as isize;
    if (0..len_i).contains(&idx) {
        return Some(idx as usize);
    }
    match bc {
        BoundaryCondition::Zero => None,
        BoundaryCondition::Reflective => {
            let period = 2 * len_i;
            let r = idx.rem_euclid(period);
            Some(if r < len_i { r } else { period - 1 - r } as usize)
        }
    }
}

/// Blur `x` with `psf` under boundary condition `bc`.
pub fn blur_direct(psf: &Psf, x: &ImageGrid, bc: BoundaryCondition) -> ImageGrid {
    let (m, n) = x.dims();
    let p = psf.data();
    let np = psf.size();
    let (l, q) = psf.center();
    let xs = x.data();
    let mut y = Array2::zeros((m, n));
    for i in 0..m {
        for j in 0..n {
            let mut acc = 0.0;
            for a in 0..np {
                // 0-based source row: i - a + (l - 1)
                let Some(si) = fold(i as isize - a as isize + l as isize - 1, m, bc) else {
                    continue;
                };
                for b in 0..np {
                    let w = p[[a, b]];
                    if w == 0.0 {
                        continue;
                    }
                    if let Some(sj) = fold(j as isize - b as isize + q as isize - 1, n, bc) {
                        acc += w * xs[[si, sj]];
                    }
                }
            }
            y[[i, j]] = acc;
        }
    }
    ImageGrid::new(y)
}

/// Materialize the `mn x mn` blur matrix acting on column-stacked images.
///
/// Built row by row from the same summation as [`blur_direct`]; column `t`
/// equals `vec(blur_direct(P, unvec(e_t)))`.
pub fn blur_matrix_dense(
    psf: &Psf,
    bc: BoundaryCondition,
    m: usize,
    n: usize,
) -> Result<Array2<f64>> {
    let big = m * n;
    check_dense(big, "blur_matrix_dense")?;
    let p = psf.data();
    let np = psf.size();
    let (l, q) = psf.center();
    let mut a = Array2::zeros((big, big));
    for j in 0..n {
        for i in 0..m {
            let row = i + j * m;
            for pa in 0..np {
                let Some(si) = fold(i as isize - pa as isize + l as isize - 1, m, bc) else {
                    continue;
                };
                for pb in 0..np {
                    let w = p[[pa, pb]];
                    if w == 0.0 {
                        continue;
                    }
                    if let Some(sj) = fold(j as isize - pb as isize + q as isize - 1, n, bc) {
                        a[[row, si + sj * m]] += w;
                    }
                }
            }
        }
    }
    Ok(a)
}
