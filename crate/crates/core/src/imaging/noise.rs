use std::fmt;
use std::str::FromStr;

use ndarray::{Array, Dimension};
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::rng::{self, open01, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseKind {
    Gauss,
    Laplace,
    /// Gaussian scaled pointwise by the signal
    Multiplicative,
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoiseKind::Gauss => "gauss",
            NoiseKind::Laplace => "laplace",
            NoiseKind::Multiplicative => "multiplicative",
        })
    }
}

impl FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gauss" | "gaussian" => Ok(NoiseKind::Gauss),
            "laplace" => Ok(NoiseKind::Laplace),
            "multiplicative" => Ok(NoiseKind::Multiplicative),
            other => Err(Error::arg(format!("unknown noise kind '{other}'"))),
        }
    }
}

/// Noise of a given kind scaled to `||noise|| = level * ||b||`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub level: f64,
    pub seed: u64,
}

const MAX_RETRIES: u64 = 8;

/// Unscaled draw `g` for substream `sub`.
pub fn raw_noise<D: Dimension>(kind: NoiseKind, b: &Array<f64, D>, seed: u64, sub: u64) -> Array<f64, D> {
    let mut rng = rng::stream(seed, Stream::Noise, sub);
    match kind {
        NoiseKind::Gauss => b.map(|_| StandardNormal.sample(&mut rng)),
        NoiseKind::Laplace => b.map(|_| {
            let u = open01(&mut rng);
            if u < 0.5 {
                (2.0 * u).ln()
            } else {
                -(2.0 * (1.0 - u)).ln()
            }
        }),
        NoiseKind::Multiplicative => b.map(|&v| {
            let w: f64 = StandardNormal.sample(&mut rng);
            v * w
        }),
    }
}

fn norm<D: Dimension>(a: &Array<f64, D>) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `b + level * ||b|| * g / ||g||`.
pub fn add_noise<D: Dimension>(b: &Array<f64, D>, spec: &NoiseSpec) -> Result<Array<f64, D>> {
    if !(spec.level.is_finite() && spec.level >= 0.0) {
        return Err(Error::arg(format!("noise level must be nonnegative, got {}", spec.level)));
    }
    let nb = norm(b);
    if !(nb > 0.0 && nb.is_finite()) {
        return Err(Error::arg("noise is relative to the data norm, which is zero"));
    }
    if spec.level == 0.0 {
        return Ok(b.clone());
    }
    for sub in 0..MAX_RETRIES {
        let g = raw_noise(spec.kind, b, spec.seed, sub);
        let ng = norm(&g);
        if ng > 0.0 {
            let scale = spec.level * nb / ng;
            return Ok(b + &(g * scale));
        }
    }
    Err(Error::numeric("noise draw was identically zero on every substream"))
}
