//! Point spread functions.

use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use rand::RngCore;

use crate::error::{Error, Result};
use crate::rng::{self, Stream};

/// Boundary assumption for the scene outside the image frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryCondition {
    /// Black outside the frame; block Toeplitz with Toeplitz blocks.
    Zero,
    /// Mirror image across each border; Toeplitz-plus-Hankel structure.
    Reflective,
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundaryCondition::Zero => "zero",
            BoundaryCondition::Reflective => "reflective",
        })
    }
}

impl FromStr for BoundaryCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(BoundaryCondition::Zero),
            "reflective" | "reflexive" | "neumann" => Ok(BoundaryCondition::Reflective),
            other => Err(Error::arg(format!("unknown boundary condition '{other}'"))),
        }
    }
}

/// A square, normalized point spread function with a 1-based center `(l, q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Psf {
    data: Array2<f64>,
    center: (usize, usize),
}

impl Psf {
    /// Validate and normalize a PSF array.
    ///
    /// Entries must be finite and nonnegative with a positive sum; the array is
    /// rescaled to unit sum. Non-square arrays are zero-padded at the bottom and
    /// right to the smallest enclosing odd square, which keeps the center pixel.
    pub fn new(data: Array2<f64>, center: (usize, usize)) -> Result<Self> {
        let (r, c) = data.dim();
        if r == 0 || c == 0 {
            return Err(Error::arg("PSF must be non-empty"));
        }
        if center.0 < 1 || center.0 > r || center.1 < 1 || center.1 > c {
            return Err(Error::arg(format!(
                "PSF center ({}, {}) outside {r}x{c} array",
                center.0, center.1
            )));
        }
        if data.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::arg("PSF entries must be finite and nonnegative"));
        }
        let total: f64 = data.sum();
        if total <= 0.0 {
            return Err(Error::arg("PSF has zero total mass"));
        }
        let mut data = data / total;
        if r != c {
            let mut side = r.max(c);
            if side % 2 == 0 {
                side += 1;
            }
            let mut padded = Array2::zeros((side, side));
            padded.slice_mut(ndarray::s![..r, ..c]).assign(&data);
            data = padded;
        }
        Ok(Self { data, center })
    }

    /// Single unit pixel at the middle of an `n_p x n_p` array.
    pub fn delta(n_p: usize) -> Result<Self> {
        check_odd(n_p)?;
        let mid = n_p / 2;
        let mut data = Array2::zeros((n_p, n_p));
        data[[mid, mid]] = 1.0;
        Self::new(data, (mid + 1, mid + 1))
    }

    /// Isotropic Gaussian; `sigma < 1e-3` is treated as the delta limit.
    pub fn gaussian(n_p: usize, sigma: f64) -> Result<Self> {
        check_odd(n_p)?;
        if !(sigma > 0.0) {
            return Err(Error::arg("Gaussian sigma must be positive"));
        }
        if sigma < 1e-3 {
            return Self::delta(n_p);
        }
        let mid = (n_p / 2) as f64;
        let data = Array2::from_shape_fn((n_p, n_p), |(i, j)| {
            let (di, dj) = (i as f64 - mid, j as f64 - mid);
            (-(di * di + dj * dj) / (2.0 * sigma * sigma)).exp()
        });
        Self::new(data, (n_p / 2 + 1, n_p / 2 + 1))
    }

    /// Uniform disk of radius `r` (out-of-focus blur); `r < 1` is the delta limit.
    pub fn disk(n_p: usize, radius: f64) -> Result<Self> {
        check_odd(n_p)?;
        let half = ((n_p - 1) / 2) as f64;
        if !(radius > 0.0) || radius > half {
            return Err(Error::arg(format!(
                "disk radius {radius} outside (0, {half}] for a {n_p}x{n_p} PSF"
            )));
        }
        let mid = (n_p / 2) as isize;
        let r2 = radius * radius;
        let data = Array2::from_shape_fn((n_p, n_p), |(i, j)| {
            let (di, dj) = ((i as isize - mid) as f64, (j as isize - mid) as f64);
            if di * di + dj * dj <= r2 {
                1.0
            } else {
                0.0
            }
        });
        Self::new(data, (n_p / 2 + 1, n_p / 2 + 1))
    }

    /// Camera shake: unit mass deposited along a seeded 8-neighbor random walk.
    ///
    /// The walk starts at the center and deposits at the start and after each
    /// step; positions are clamped to the array.
    pub fn shake(n_p: usize, steps: usize, seed: u64) -> Result<Self> {
        check_odd(n_p)?;
        if steps < 1 {
            return Err(Error::arg("shake walk needs at least one step"));
        }
        const DIRS: [(isize, isize); 8] = [
            (-1, -1),
            (-1, 0),
            (-1, 1),
            (0, -1),
            (0, 1),
            (1, -1),
            (1, 0),
            (1, 1),
        ];
        let mut rng = rng::stream(seed, Stream::Shake, 0);
        let mid = (n_p / 2) as isize;
        let last = n_p as isize - 1;
        let (mut i, mut j) = (mid, mid);
        let mut data = Array2::zeros((n_p, n_p));
        data[[i as usize, j as usize]] += 1.0;
        for _ in 0..steps {
            let (di, dj) = DIRS[(rng.next_u64() % 8) as usize];
            i = (i + di).clamp(0, last);
            j = (j + dj).clamp(0, last);
            data[[i as usize, j as usize]] += 1.0;
        }
        Self::new(data, (n_p / 2 + 1, n_p / 2 + 1))
    }

    pub fn data(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn size(&self) -> usize {
        self.data.nrows()
    }

    /// 1-based `(l, q)`.
    pub fn center(&self) -> (usize, usize) {
        self.center
    }

    /// Embed into an `m x m` zero array so the center lands at `(m/2 + 1, m/2 + 1)`
    /// (1-based), or as close as the support allows.
    pub fn pad_to(&self, m: usize) -> Result<Self> {
        let np = self.size();
        if np > m {
            return Err(Error::arg(format!(
                "PSF of size {np} does not fit a {m}x{m} grid"
            )));
        }
        if np == m {
            return Ok(self.clone());
        }
        let target = m / 2 + 1;
        let offset = |c: usize| -> usize {
            // keep the whole support inside 0..m
            let want = target as isize - c as isize;
            want.clamp(0, (m - np) as isize) as usize
        };
        let (oi, oj) = (offset(self.center.0), offset(self.center.1));
        let mut data = Array2::zeros((m, m));
        data.slice_mut(ndarray::s![oi..oi + np, oj..oj + np])
            .assign(&self.data);
        Ok(Self {
            data,
            center: (self.center.0 + oi, self.center.1 + oj),
        })
    }
}

fn check_odd(n_p: usize) -> Result<()> {
    if n_p % 2 == 0 || n_p < 1 {
        Err(Error::arg(format!("PSF size must be odd, got {n_p}")))
    } else {
        Ok(())
    }
}
