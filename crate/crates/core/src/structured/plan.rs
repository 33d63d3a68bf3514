use std::sync::Arc;

use ndarray::{Array2, ArrayView2};
use rustfft::{num_complex::Complex64, Fft, FftPlanner};

use super::{ApplyMode, StructuredFactor};
use crate::error::{Error, Result};

/// Below this size the plan multiplies by the materialized dense matrix.
pub const DEFAULT_CROSSOVER: usize = 128;

/// Precomputed multiplication plan for one [`StructuredFactor`].
///
/// Immutable once built; share freely across threads.
#[derive(Clone)]
pub struct FactorApplyPlan {
    n: usize,
    strategy: Strategy,
}

#[derive(Clone)]
enum Strategy {
    Dense(Array2<f64>),
    Fft(Box<FftPlan>),
}

/// Circulant embedding of the Toeplitz part and of the reversed Hankel part.
#[derive(Clone)]
struct FftPlan {
    len: usize,
    toeplitz: Option<Spectra>,
    /// spectrum of `H J`; `H` is symmetric, so this serves both modes
    hankel: Option<Vec<Complex64>>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

#[derive(Clone)]
struct Spectra {
    direct: Vec<Complex64>,
    transposed: Vec<Complex64>,
}

impl std::fmt::Debug for FactorApplyPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match &self.strategy {
            Strategy::Dense(_) => "dense".to_string(),
            Strategy::Fft(p) => format!("fft(len={})", p.len),
        };
        f.debug_struct("FactorApplyPlan")
            .field("n", &self.n)
            .field("strategy", &kind)
            .finish()
    }
}

impl FactorApplyPlan {
    /// Plan with the default dense/FFT crossover.
    pub fn new(factor: &StructuredFactor) -> Self {
        Self::with_crossover(factor, DEFAULT_CROSSOVER)
    }

    /// FFT path when `n >= crossover`, dense otherwise.
    pub fn with_crossover(factor: &StructuredFactor, crossover: usize) -> Self {
        if factor.n() >= crossover {
            Self::fft(factor)
        } else {
            Self::dense(factor)
        }
    }

    pub fn dense(factor: &StructuredFactor) -> Self {
        let n = factor.n();
        let m = Array2::from_shape_fn((n, n), |(i, k)| factor.entry(i, k));
        Self {
            n,
            strategy: Strategy::Dense(m),
        }
    }

    pub fn fft(factor: &StructuredFactor) -> Self {
        let n = factor.n();
        let len = (2 * n - 1).next_power_of_two();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(len);
        let inverse = planner.plan_fft_inverse(len);

        let spectrum = |diags: &[f64], flip: bool| -> Vec<Complex64> {
            // first column of the circulant: g(0..n-1) then g(-(n-1)..-1) at the tail
            let g = |d: isize| {
                let d = if flip { -d } else { d };
                diags[(d + n as isize - 1) as usize]
            };
            let mut col = vec![Complex64::new(0.0, 0.0); len];
            for r in 0..n {
                col[r].re = g(r as isize);
            }
            for r in 1..n {
                col[len - r].re = g(-(r as isize));
            }
            forward.process(&mut col);
            col
        };

        let toeplitz = factor.kind.has_toeplitz().then(|| {
            let diags = factor.toeplitz_diagonals();
            Spectra {
                direct: spectrum(&diags, false),
                transposed: spectrum(&diags, true),
            }
        });
        let hankel = factor
            .kind
            .has_hankel()
            .then(|| spectrum(&factor.hankel_reversed_diagonals(), false));

        Self {
            n,
            strategy: Strategy::Fft(Box::new(FftPlan {
                len,
                toeplitz,
                hankel,
                forward,
                inverse,
            })),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_fft(&self) -> bool {
        matches!(self.strategy, Strategy::Fft(_))
    }

    /// `F X` (`Left`) or `F^T X` (`LeftTranspose`) for `X` with `n` rows.
    pub fn apply(&self, x: ArrayView2<f64>, mode: ApplyMode) -> Result<Array2<f64>> {
        if x.nrows() != self.n {
            return Err(Error::arg(format!(
                "factor of size {} cannot multiply a matrix with {} rows",
                self.n,
                x.nrows()
            )));
        }
        Ok(match &self.strategy {
            Strategy::Dense(m) => match mode {
                ApplyMode::Left => m.dot(&x),
                ApplyMode::LeftTranspose => m.t().dot(&x),
            },
            Strategy::Fft(plan) => plan.apply(self.n, x, mode),
        })
    }
}

impl FftPlan {
    fn apply(&self, n: usize, x: ArrayView2<f64>, mode: ApplyMode) -> Array2<f64> {
        let p = x.ncols();
        let mut out = Array2::zeros((n, p));
        let zero = Complex64::new(0.0, 0.0);
        let mut buf = vec![zero; self.len];
        let mut rev = vec![zero; self.len];
        let mut scratch = vec![
            zero;
            self.forward
                .get_inplace_scratch_len()
                .max(self.inverse.get_inplace_scratch_len())
        ];
        let scale = 1.0 / self.len as f64;
        let toeplitz = self.toeplitz.as_ref().map(|s| match mode {
            ApplyMode::Left => &s.direct,
            ApplyMode::LeftTranspose => &s.transposed,
        });

        // two real columns ride in one complex transform: the circulant is real,
        // so real and imaginary parts never mix
        let mut col = 0;
        while col < p {
            let second = (col + 1 < p).then_some(col + 1);
            buf.fill(zero);
            for i in 0..n {
                buf[i] = Complex64::new(x[[i, col]], second.map_or(0.0, |c| x[[i, c]]));
            }
            if self.hankel.is_some() {
                rev.fill(zero);
                for i in 0..n {
                    rev[i] = buf[n - 1 - i];
                }
                self.forward.process_with_scratch(&mut rev, &mut scratch);
            }
            self.forward.process_with_scratch(&mut buf, &mut scratch);

            match (toeplitz, &self.hankel) {
                (Some(t), Some(h)) => {
                    for ((b, r), (ts, hs)) in buf.iter_mut().zip(&rev).zip(t.iter().zip(h)) {
                        *b = *b * ts + r * hs;
                    }
                }
                (Some(t), None) => {
                    for (b, ts) in buf.iter_mut().zip(t) {
                        *b *= ts;
                    }
                }
                (None, Some(h)) => {
                    for (b, (r, hs)) in buf.iter_mut().zip(rev.iter().zip(h)) {
                        *b = r * hs;
                    }
                }
                (None, None) => unreachable!("factor has at least one part"),
            }
            self.inverse.process_with_scratch(&mut buf, &mut scratch);

            for i in 0..n {
                out[[i, col]] = buf[i].re * scale;
                if let Some(c) = second {
                    out[[i, c]] = buf[i].im * scale;
                }
            }
            col += 2;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structured::FactorKind;
    use ndarray::Array2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_factor(rng: &mut ChaCha8Rng, n: usize, kind: FactorKind) -> StructuredFactor {
        let j = rng.random_range(1..=n);
        let c: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        match kind {
            FactorKind::Toeplitz => StructuredFactor::toep(&c, j),
            FactorKind::Hankel => StructuredFactor::hank(&c, j),
            FactorKind::ToeplitzPlusHankel => StructuredFactor::toep_plus_hank(&c, j),
        }
        .unwrap()
    }

    fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Array2<f64> {
        Array2::from_shape_fn((r, c), |_| rng.random_range(-1.0..1.0))
    }

    /// Plain triple loop, independent of both plan strategies.
    fn triple_loop(f: &StructuredFactor, x: &Array2<f64>, mode: ApplyMode) -> Array2<f64> {
        let n = f.n();
        let mut y = Array2::zeros(x.dim());
        for i in 0..n {
            for col in 0..x.ncols() {
                let mut acc = 0.0;
                for k in 0..n {
                    let a = match mode {
                        ApplyMode::Left => f.entry(i, k),
                        ApplyMode::LeftTranspose => f.entry(k, i),
                    };
                    acc += a * x[[k, col]];
                }
                y[[i, col]] = acc;
            }
        }
        y
    }

    fn rel(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
        let d = (a - b).mapv(|v| v * v).sum().sqrt();
        d / b.mapv(|v| v * v).sum().sqrt().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn both_paths_match_triple_loop_n16() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for kind in [FactorKind::Toeplitz, FactorKind::Hankel, FactorKind::ToeplitzPlusHankel] {
            let f = random_factor(&mut rng, 16, kind);
            let x = random_matrix(&mut rng, 16, 4);
            for mode in [ApplyMode::Left, ApplyMode::LeftTranspose] {
                let oracle = triple_loop(&f, &x, mode);
                let d = FactorApplyPlan::dense(&f).apply(x.view(), mode).unwrap();
                let s = FactorApplyPlan::fft(&f).apply(x.view(), mode).unwrap();
                assert!(rel(&d, &oracle) <= 1e-12, "{kind:?} {mode:?}");
                assert!(rel(&s, &oracle) <= 1e-10, "{kind:?} {mode:?}");
            }
        }
    }

    #[test]
    fn fft_odd_column_count_and_tiny_sizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..6 {
            let f = random_factor(&mut rng, n, FactorKind::ToeplitzPlusHankel);
            let x = random_matrix(&mut rng, n, 3);
            let oracle = triple_loop(&f, &x, ApplyMode::Left);
            let s = FactorApplyPlan::fft(&f).apply(x.view(), ApplyMode::Left).unwrap();
            assert!(rel(&s, &oracle) <= 1e-12);
        }
    }

    #[test]
    fn identity_factor_and_identity_input() {
        let f = StructuredFactor::toep(&[0.0, 0.0, 1.0, 0.0], 3).unwrap();
        let x = Array2::from_shape_fn((4, 2), |(i, j)| (i * 2 + j) as f64);
        assert_eq!(f.apply(x.view(), ApplyMode::Left).unwrap(), x);
        let t = StructuredFactor::toep(&[1.0, 2.0, 3.0], 2).unwrap();
        let eye = Array2::eye(3);
        assert_eq!(t.apply(eye.view(), ApplyMode::Left).unwrap(), t.to_dense().unwrap());
    }

    #[test]
    fn dimension_mismatch() {
        let f = StructuredFactor::toep(&[1.0, 2.0, 3.0], 2).unwrap();
        let x = Array2::zeros((4, 1));
        assert!(matches!(f.apply(x.view(), ApplyMode::Left), Err(Error::Argument(_))));
    }

    #[test]
    fn crossover_selects_strategy() {
        let small = StructuredFactor::toep(&vec![1.0; 127], 1).unwrap();
        let large = StructuredFactor::toep(&vec![1.0; 128], 1).unwrap();
        assert!(!FactorApplyPlan::new(&small).is_fft());
        assert!(FactorApplyPlan::new(&large).is_fft());
        assert!(FactorApplyPlan::with_crossover(&small, 8).is_fft());
    }

    #[test]
    fn linearity_and_transpose_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in [7usize, 40, 200] {
            let f = random_factor(&mut rng, n, FactorKind::ToeplitzPlusHankel);
            let plan = FactorApplyPlan::new(&f);
            let x = random_matrix(&mut rng, n, 1);
            let y = random_matrix(&mut rng, n, 1);
            let (a, b) = (0.7, -1.3);
            let combo = plan.apply((&x * a + &y * b).view(), ApplyMode::Left).unwrap();
            let sep = plan.apply(x.view(), ApplyMode::Left).unwrap() * a
                + plan.apply(y.view(), ApplyMode::Left).unwrap() * b;
            assert!(rel(&combo, &sep) <= 1e-12);

            let fx = plan.apply(x.view(), ApplyMode::Left).unwrap();
            let fty = plan.apply(y.view(), ApplyMode::LeftTranspose).unwrap();
            let lhs: f64 = (&fx * &y).sum();
            let rhs: f64 = (&x * &fty).sum();
            let scale = fx.mapv(|v| v * v).sum().sqrt() * y.mapv(|v| v * v).sum().sqrt();
            assert!((lhs - rhs).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn plans_are_send_and_sync() {
        fn check<T: Send + Sync>() {}
        check::<FactorApplyPlan>();
        check::<StructuredFactor>();
    }
}
