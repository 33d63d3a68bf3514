use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use rand::Rng;

use crate::error::{Error, Result};
use crate::image::ImageGrid;
use crate::rng::{self, Stream};

/// Synthetic test scenes. Analytic stand-ins, all valued in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ImageKind {
    /// nested rectangle, disk and bar
    Pattern1,
    /// the same shapes shifted by a quarter of the frame
    Pattern2,
    /// sparse random blocks
    Ppower,
    /// three broad Gaussians
    Smooth,
    Dot2,
    Dotk,
    Delta,
}

impl ImageKind {
    pub const ALL: [ImageKind; 7] = [
        ImageKind::Pattern1,
        ImageKind::Pattern2,
        ImageKind::Ppower,
        ImageKind::Smooth,
        ImageKind::Dot2,
        ImageKind::Dotk,
        ImageKind::Delta,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ImageKind::Pattern1 => "pattern1",
            ImageKind::Pattern2 => "pattern2",
            ImageKind::Ppower => "ppower",
            ImageKind::Smooth => "smooth",
            ImageKind::Dot2 => "dot2",
            ImageKind::Dotk => "dotk",
            ImageKind::Delta => "delta",
        }
    }
}

impl fmt::Display for ImageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ImageKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ImageKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::arg(format!("unknown image kind '{s}'")))
    }
}

/// Standard deviation, in pixels, of the dots in `dot2` and `dotk`.
const DOT_WIDTH: f64 = 0.8;

/// Largest finite-difference step allowed in the `smooth` scene.
const SMOOTH_MAX_STEP: f64 = 0.19;

pub fn generate_image(kind: ImageKind, m: usize, n: usize, seed: u64) -> Result<ImageGrid> {
    if m < 8 || n < 8 {
        return Err(Error::arg(format!("test images need at least 8x8 pixels, got {m}x{n}")));
    }
    let mut rng = rng::stream(seed, Stream::Image, kind as u64);
    let data = match kind {
        ImageKind::Pattern1 => pattern(m, n, 0.0),
        ImageKind::Pattern2 => pattern(m, n, 0.25),
        ImageKind::Ppower => ppower(m, n, &mut rng),
        ImageKind::Smooth => smooth(m, n, &mut rng),
        ImageKind::Dot2 => dots(
            m,
            n,
            &[(m as f64 / 3.0, n as f64 / 3.0), (2.0 * m as f64 / 3.0, 2.0 * n as f64 / 3.0)],
            DOT_WIDTH,
        ),
        ImageKind::Dotk => {
            let count = (m.max(n) / 2).min(m * n / 2);
            let centers: Vec<(f64, f64)> = (0..count)
                .map(|_| (rng.random_range(1.0..m as f64 - 1.0), rng.random_range(1.0..n as f64 - 1.0)))
                .collect();
            dots(m, n, &centers, DOT_WIDTH)
        }
        ImageKind::Delta => {
            let mut a = Array2::zeros((m, n));
            a[[m / 2, n / 2]] = 1.0;
            a
        }
    };
    Ok(ImageGrid::new(data))
}

/// Shapes in normalized coordinates `(u, v)` in `[0, 1)`, wrapped by `phase`.
fn pattern(m: usize, n: usize, phase: f64) -> Array2<f64> {
    Array2::from_shape_fn((m, n), |(i, j)| {
        let u = ((i as f64 + 0.5) / m as f64 + phase).fract();
        let v = ((j as f64 + 0.5) / n as f64 + phase).fract();
        let mut val = 0.0;
        if (0.1..0.9).contains(&u) && (0.1..0.9).contains(&v) {
            val = 0.35;
        }
        if (u - 0.4).powi(2) + (v - 0.45).powi(2) < 0.06 {
            val = 0.7;
        }
        if (0.3..0.5).contains(&u) && (0.35..0.55).contains(&v) {
            val = 1.0;
        }
        if (0.7..0.8).contains(&u) && (0.2..0.8).contains(&v) {
            val = 0.55;
        }
        val
    })
}

fn ppower(m: usize, n: usize, rng: &mut impl Rng) -> Array2<f64> {
    let mut a = Array2::<f64>::zeros((m, n));
    let count = (m * n / 64).max(6);
    for _ in 0..count {
        let h = rng.random_range(1..=(m / 8).max(2));
        let w = rng.random_range(1..=(n / 8).max(2));
        let r0 = rng.random_range(0..m - h);
        let c0 = rng.random_range(0..n - w);
        let val: f64 = rng.random_range(0.2..1.0);
        a.slice_mut(ndarray::s![r0..r0 + h, c0..c0 + w])
            .mapv_inplace(|x| x.max(val));
    }
    a
}

fn smooth(m: usize, n: usize, rng: &mut impl Rng) -> Array2<f64> {
    let base = (0.4 * m.min(n) as f64).max(4.0);
    let bumps: Vec<(f64, f64, f64, f64)> = (0..3)
        .map(|_| {
            (
                rng.random_range(0.2..0.8) * m as f64,
                rng.random_range(0.2..0.8) * n as f64,
                base * rng.random_range(1.0..1.5),
                rng.random_range(0.5..1.0),
            )
        })
        .collect();
    let mut a = Array2::from_shape_fn((m, n), |(i, j)| {
        bumps
            .iter()
            .map(|&(ci, cj, s, amp)| {
                let d2 = (i as f64 - ci).powi(2) + (j as f64 - cj).powi(2);
                amp * (-d2 / (2.0 * s * s)).exp()
            })
            .sum::<f64>()
    });
    let peak = a.iter().cloned().fold(0.0, f64::max);
    a /= peak;
    let step = max_step(&a);
    if step > SMOOTH_MAX_STEP {
        a *= SMOOTH_MAX_STEP / step;
    }
    a
}

/// Largest absolute forward difference along either axis.
fn max_step(a: &Array2<f64>) -> f64 {
    let (m, n) = a.dim();
    let mut s: f64 = 0.0;
    for i in 0..m {
        for j in 0..n {
            if i + 1 < m {
                s = s.max((a[[i + 1, j]] - a[[i, j]]).abs());
            }
            if j + 1 < n {
                s = s.max((a[[i, j + 1]] - a[[i, j]]).abs());
            }
        }
    }
    s
}

fn dots(m: usize, n: usize, centers: &[(f64, f64)], width: f64) -> Array2<f64> {
    Array2::from_shape_fn((m, n), |(i, j)| {
        centers
            .iter()
            .map(|&(ci, cj)| {
                let d2 = (i as f64 - ci).powi(2) + (j as f64 - cj).powi(2);
                (-d2 / (2.0 * width * width)).exp()
            })
            .fold(0.0, f64::max)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_kinds_in_unit_range_and_deterministic() {
        for kind in ImageKind::ALL {
            for &(m, n) in &[(8, 8), (16, 24), (64, 64)] {
                let a = generate_image(kind, m, n, 3).unwrap();
                assert_eq!(a.dims(), (m, n));
                assert!(a.data().iter().all(|&v| (0.0..=1.0).contains(&v)), "{kind}");
                assert!(a.data().iter().any(|&v| v > 0.0), "{kind} is blank");
                assert_eq!(a, generate_image(kind, m, n, 3).unwrap());
            }
        }
    }

    #[test]
    fn seeds_change_random_scenes() {
        for kind in [ImageKind::Ppower, ImageKind::Smooth, ImageKind::Dotk] {
            assert_ne!(generate_image(kind, 32, 32, 1).unwrap(), generate_image(kind, 32, 32, 2).unwrap());
        }
    }

    #[test]
    fn delta_has_one_unit_pixel() {
        let a = generate_image(ImageKind::Delta, 9, 12, 0).unwrap();
        assert_eq!(a.data().iter().filter(|&&v| v != 0.0).count(), 1);
        assert_eq!(a.data()[[4, 6]], 1.0);
    }

    #[test]
    fn smooth_is_gently_varying() {
        for seed in 0..20 {
            for &(m, n) in &[(8, 8), (9, 31), (64, 64), (128, 96)] {
                let a = generate_image(ImageKind::Smooth, m, n, seed).unwrap();
                assert!(max_step(a.data()) < 0.2);
                let max = a.data().iter().cloned().fold(f64::MIN, f64::max);
                let min = a.data().iter().cloned().fold(f64::MAX, f64::min);
                assert!(max <= 1.0 && min >= 0.0);
            }
        }
    }

    #[test]
    fn names_round_trip_and_unknown_is_rejected() {
        for kind in ImageKind::ALL {
            assert_eq!(kind.name().parse::<ImageKind>().unwrap(), kind);
        }
        assert!(matches!("hst".parse::<ImageKind>(), Err(Error::Argument(_))));
        assert!(generate_image(ImageKind::Dot2, 7, 8, 0).is_err());
    }

    #[test]
    fn dotk_places_half_dimension_dots() {
        let a = generate_image(ImageKind::Dotk, 32, 32, 5).unwrap();
        let peaks = (1..31)
            .flat_map(|i| (1..31).map(move |j| (i, j)))
            .filter(|&(i, j)| {
                let v = a.data()[[i, j]];
                v > 0.3 && [(0, 1), (2, 1), (1, 0), (1, 2)].iter().all(|&(di, dj)| v >= a.data()[[i + di - 1, j + dj - 1]])
            })
            .count();
        assert!(peaks >= 8 && peaks <= 16, "{peaks}");
    }
}
