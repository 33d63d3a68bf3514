//! Linear operators on column-stacked vectors.

use ndarray::{Array1, Array2, ArrayView1};

use crate::blur::{blur_direct, fold};
use crate::image::{unvec, vec_of, ImageGrid};
use crate::psf::{BoundaryCondition, Psf};

/// A real linear map `R^cols -> R^rows` with its adjoint.
///
/// Callers guarantee conforming lengths; implementations may panic otherwise.
pub trait LinearOperator {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    fn apply(&self, x: ArrayView1<f64>) -> Array1<f64>;
    fn apply_adjoint(&self, y: ArrayView1<f64>) -> Array1<f64>;
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn rows(&self) -> usize {
        (**self).rows()
    }
    fn cols(&self) -> usize {
        (**self).cols()
    }
    fn apply(&self, x: ArrayView1<f64>) -> Array1<f64> {
        (**self).apply(x)
    }
    fn apply_adjoint(&self, y: ArrayView1<f64>) -> Array1<f64> {
        (**self).apply_adjoint(y)
    }
}

/// Explicit matrix.
#[derive(Debug, Clone)]
pub struct DenseOperator(pub Array2<f64>);

impl LinearOperator for DenseOperator {
    fn rows(&self) -> usize {
        self.0.nrows()
    }
    fn cols(&self) -> usize {
        self.0.ncols()
    }
    fn apply(&self, x: ArrayView1<f64>) -> Array1<f64> {
        self.0.dot(&x)
    }
    fn apply_adjoint(&self, y: ArrayView1<f64>) -> Array1<f64> {
        self.0.t().dot(&y)
    }
}

/// Exact blur evaluated in the spatial domain.
#[derive(Debug, Clone)]
pub struct BlurOperator {
    psf: Psf,
    bc: BoundaryCondition,
    dims: (usize, usize),
}

impl BlurOperator {
    pub fn new(psf: Psf, bc: BoundaryCondition, dims: (usize, usize)) -> Self {
        Self { psf, bc, dims }
    }

    pub fn apply_image(&self, x: &ImageGrid) -> ImageGrid {
        blur_direct(&self.psf, x, self.bc)
    }

    /// Transpose of [`blur_direct`]: scatter each output pixel back along the stencil.
    pub fn apply_adjoint_image(&self, y: &ImageGrid) -> ImageGrid {
        let (m, n) = self.dims;
        let p = self.psf.data();
        let np = self.psf.size();
        let (l, q) = self.psf.center();
        let ys = y.data();
        let mut x = Array2::zeros((m, n));
        for i in 0..m {
            for j in 0..n {
                let v = ys[[i, j]];
                for a in 0..np {
                    let Some(si) = fold(i as isize - a as isize + l as isize - 1, m, self.bc) else {
                        continue;
                    };
                    for b in 0..np {
                        if let Some(sj) = fold(j as isize - b as isize + q as isize - 1, n, self.bc) {
                            x[[si, sj]] += p[[a, b]] * v;
                        }
                    }
                }
            }
        }
        ImageGrid::new(x)
    }
}

impl LinearOperator for BlurOperator {
    fn rows(&self) -> usize {
        self.dims.0 * self.dims.1
    }
    fn cols(&self) -> usize {
        self.rows()
    }
    fn apply(&self, x: ArrayView1<f64>) -> Array1<f64> {
        let (m, n) = self.dims;
        let img = ImageGrid::new(unvec(m, n, x).expect("length checked by caller"));
        self.apply_image(&img).vec()
    }
    fn apply_adjoint(&self, y: ArrayView1<f64>) -> Array1<f64> {
        let (m, n) = self.dims;
        let img = ImageGrid::new(unvec(m, n, y).expect("length checked by caller"));
        vec_of(self.apply_adjoint_image(&img).data())
    }
}
