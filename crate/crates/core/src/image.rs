use ndarray::{Array1, Array2, ArrayView1, ShapeBuilder};

use crate::error::{Error, Result};

/// A single-channel `m x n` real image.
///
/// Vectorization stacks columns one after the other, so pixel `(i, j)`
/// (0-based) sits at `vec` index `i + j * m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid {
    data: Array2<f64>,
}

impl ImageGrid {
    pub fn new(data: Array2<f64>) -> Self {
        Self { data }
    }

    pub fn zeros(m: usize, n: usize) -> Self {
        Self::new(Array2::zeros((m, n)))
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.data.dim()
    }

    pub fn data(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut Array2<f64> {
        &mut self.data
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.data
    }

    pub fn vec(&self) -> Array1<f64> {
        vec_of(&self.data)
    }

    pub fn from_vec(m: usize, n: usize, v: ArrayView1<f64>) -> Result<Self> {
        unvec(m, n, v).map(Self::new)
    }
}

impl From<Array2<f64>> for ImageGrid {
    fn from(data: Array2<f64>) -> Self {
        Self::new(data)
    }
}

/// Column-stacking vectorization.
pub fn vec_of(x: &Array2<f64>) -> Array1<f64> {
    // iterating the transposed view visits columns in order
    x.t().iter().copied().collect()
}

/// Inverse of [`vec_of`].
pub fn unvec(m: usize, n: usize, v: ArrayView1<f64>) -> Result<Array2<f64>> {
    if v.len() != m * n {
        return Err(Error::arg(format!(
            "cannot reshape vector of length {} into {m}x{n}",
            v.len()
        )));
    }
    let buf: Vec<f64> = v.iter().copied().collect();
    let fortran = Array2::from_shape_vec((m, n).f(), buf).expect("length checked");
    Ok(fortran.as_standard_layout().into_owned())
}
