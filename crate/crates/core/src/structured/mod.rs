//! Banded Toeplitz and Hankel matrices stored by a single generator column.
//!
//! A factor of size `n` is described by a generator `c` of length `n` and a
//! 1-based center index `j`:
//!
//! * `toep(c, j)` has `T[i,k] = c[j + i - k]` (1-based, zero outside `1..=n`),
//!   so its `j`-th column is exactly `c`.
//! * `hank(c, j)` has first row `[c[j+1], .., c[n], 0, ..]` and last column
//!   `[0, .., c[1], .., c[j-1]]^T`, constant along anti-diagonals.
//!
//! These are the one-dimensional blur factors of a separable PSF term under
//! zero (Toeplitz) and reflective (Toeplitz plus Hankel) boundary conditions.

mod plan;

use ndarray::{Array2, ArrayView2};

use crate::error::{check_dense, Error, Result};

pub use plan::{FactorApplyPlan, DEFAULT_CROSSOVER};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorKind {
    Toeplitz,
    Hankel,
    ToeplitzPlusHankel,
}

impl FactorKind {
    fn has_toeplitz(self) -> bool {
        matches!(self, FactorKind::Toeplitz | FactorKind::ToeplitzPlusHankel)
    }

    fn has_hankel(self) -> bool {
        matches!(self, FactorKind::Hankel | FactorKind::ToeplitzPlusHankel)
    }
}

/// Whether to multiply by the factor or by its transpose (both from the left).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApplyMode {
    Left,
    LeftTranspose,
}

/// An `n x n` structured matrix in generator form.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuredFactor {
    kind: FactorKind,
    generator: Vec<f64>,
    /// 1-based
    center: usize,
}

impl StructuredFactor {
    fn build(kind: FactorKind, c: &[f64], j: usize) -> Result<Self> {
        let n = c.len();
        if n == 0 {
            return Err(Error::arg("generator must be non-empty"));
        }
        if j < 1 || j > n {
            return Err(Error::arg(format!("center index {j} outside 1..={n}")));
        }
        Ok(Self {
            kind,
            generator: c.to_vec(),
            center: j,
        })
    }

    /// Banded Toeplitz matrix whose `j`-th column is `c`.
    pub fn toep(c: &[f64], j: usize) -> Result<Self> {
        Self::build(FactorKind::Toeplitz, c, j)
    }

    /// Banded Hankel matrix paired with `toep(c, j)` under reflection.
    pub fn hank(c: &[f64], j: usize) -> Result<Self> {
        Self::build(FactorKind::Hankel, c, j)
    }

    /// `toep(c, j) + hank(c, j)`.
    pub fn toep_plus_hank(c: &[f64], j: usize) -> Result<Self> {
        Self::build(FactorKind::ToeplitzPlusHankel, c, j)
    }

    pub fn kind(&self) -> FactorKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.generator.len()
    }

    pub fn center(&self) -> usize {
        self.center
    }

    pub fn generator(&self) -> &[f64] {
        &self.generator
    }

    /// Toeplitz part at 0-based `(i, k)`.
    fn toeplitz_entry(&self, i: usize, k: usize) -> f64 {
        // 0-based generator index: (j - 1) + i - k
        let idx = (self.center - 1 + i) as isize - k as isize;
        self.gen_at(idx)
    }

    /// Hankel part at 0-based `(i, k)`.
    fn hankel_entry(&self, i: usize, k: usize) -> f64 {
        let n = self.n() as isize;
        // 1-based anti-diagonal index iota = i + k + j - 1, shifted to 0-based
        let idx = (i + k + self.center) as isize;
        if idx < n {
            self.gen_at(idx)
        } else {
            // wrap from the far border, valid for c_1 .. c_{j-1}
            let low = idx - 2 * n;
            if low >= 0 && low <= self.center as isize - 2 {
                self.gen_at(low)
            } else {
                0.0
            }
        }
    }

    fn gen_at(&self, idx: isize) -> f64 {
        if idx >= 0 && (idx as usize) < self.generator.len() {
            self.generator[idx as usize]
        } else {
            0.0
        }
    }

    /// Entry at 0-based `(i, k)`.
    pub fn entry(&self, i: usize, k: usize) -> f64 {
        let mut v = 0.0;
        if self.kind.has_toeplitz() {
            v += self.toeplitz_entry(i, k);
        }
        if self.kind.has_hankel() {
            v += self.hankel_entry(i, k);
        }
        v
    }

    /// Materialize the dense `n x n` matrix.
    pub fn to_dense(&self) -> Result<Array2<f64>> {
        let n = self.n();
        check_dense(n, "factor_to_dense")?;
        Ok(Array2::from_shape_fn((n, n), |(i, k)| self.entry(i, k)))
    }

    /// Diagonal values `g(d)` with `T[i,k] = g(i - k)`, stored at `d + n - 1`.
    pub(crate) fn toeplitz_diagonals(&self) -> Vec<f64> {
        let n = self.n() as isize;
        (-(n - 1)..n)
            .map(|d| self.gen_at(self.center as isize - 1 + d))
            .collect()
    }

    /// Diagonals of `H J` where `J` reverses the order of a vector, so that
    /// `H x = (H J)(J x)` is a Toeplitz product.
    pub(crate) fn hankel_reversed_diagonals(&self) -> Vec<f64> {
        let n = self.n();
        let d_of = |d: isize| {
            // (H J)[i,k'] = H[i, n-1-k'] with d = i - k'
            let (i, k) = if d >= 0 {
                (d as usize, n - 1)
            } else {
                (0, (n as isize - 1 + d) as usize)
            };
            self.hankel_entry(i, k)
        };
        (-(n as isize - 1)..n as isize).map(d_of).collect()
    }

    /// `F X` or `F^T X` through a freshly built plan.
    pub fn apply(&self, x: ArrayView2<f64>, mode: ApplyMode) -> Result<Array2<f64>> {
        FactorApplyPlan::new(self).apply(x, mode)
    }
}

/// Free-function form of [`StructuredFactor::apply`].
pub fn factor_apply(
    factor: &StructuredFactor,
    x: ArrayView2<f64>,
    mode: ApplyMode,
) -> Result<Array2<f64>> {
    factor.apply(x, mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Symbolic 5x5 matrices from the worked examples, with `c_i` encoded as the integer `i`.
    fn symbolic(f: &StructuredFactor) -> Vec<Vec<i64>> {
        let d = f.to_dense().unwrap();
        d.rows().into_iter().map(|r| r.iter().map(|&v| v as i64).collect()).collect()
    }

    #[test]
    fn toep_worked_example() {
        let c = [1.0, 2.0, 3.0, 4.0, 5.0];
        let t = StructuredFactor::toep(&c, 4).unwrap();
        assert_eq!(
            symbolic(&t),
            vec![
                vec![4, 3, 2, 1, 0],
                vec![5, 4, 3, 2, 1],
                vec![0, 5, 4, 3, 2],
                vec![0, 0, 5, 4, 3],
                vec![0, 0, 0, 5, 4],
            ]
        );
    }

    #[test]
    fn hank_worked_example() {
        let c = [1.0, 2.0, 3.0, 4.0, 5.0];
        let h = StructuredFactor::hank(&c, 3).unwrap();
        assert_eq!(
            symbolic(&h),
            vec![
                vec![4, 5, 0, 0, 0],
                vec![5, 0, 0, 0, 0],
                vec![0, 0, 0, 0, 0],
                vec![0, 0, 0, 0, 1],
                vec![0, 0, 0, 1, 2],
            ]
        );
    }

    #[test]
    fn small_dense_forms() {
        let t = StructuredFactor::toep(&[1.0, 2.0, 3.0], 2).unwrap();
        assert_eq!(t.to_dense().unwrap(), array![[2.0, 1.0, 0.0], [3.0, 2.0, 1.0], [0.0, 3.0, 2.0]]);
        let h = StructuredFactor::hank(&[1.0, 2.0, 3.0], 1).unwrap();
        assert_eq!(h.to_dense().unwrap(), array![[2.0, 3.0, 0.0], [3.0, 0.0, 0.0], [0.0, 0.0, 0.0]]);
        let z = StructuredFactor::hank(&[0.0; 4], 2).unwrap();
        assert_eq!(z.to_dense().unwrap(), Array2::<f64>::zeros((4, 4)));
    }

    #[test]
    fn unit_generator_is_identity() {
        for n in 1..7 {
            for j in 1..=n {
                let mut c = vec![0.0; n];
                c[j - 1] = 1.0;
                let t = StructuredFactor::toep(&c, j).unwrap();
                assert_eq!(t.to_dense().unwrap(), Array2::eye(n));
            }
        }
    }

    #[test]
    fn center_out_of_range() {
        assert!(matches!(StructuredFactor::toep(&[1.0, 2.0], 0), Err(Error::Argument(_))));
        assert!(matches!(StructuredFactor::hank(&[1.0, 2.0], 3), Err(Error::Argument(_))));
        assert!(StructuredFactor::toep(&[], 1).is_err());
    }

    #[test]
    fn rule_matches_definitions_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.random_range(1..=32usize);
            let j = rng.random_range(1..=n);
            let c: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let t = StructuredFactor::toep(&c, j).unwrap().to_dense().unwrap();
            for i in 0..n {
                assert_eq!(t[[i, j - 1]], c[i]);
            }
            let h = StructuredFactor::hank(&c, j).unwrap().to_dense().unwrap();
            for k in 0..n {
                let first_row = if j + k < n { c[j + k] } else { 0.0 };
                assert_eq!(h[[0, k]], first_row);
                // last column: zeros then c_1..c_{j-1}
                let i = k;
                let last_col = if i + j >= n + 1 { c[i + j - n - 1] } else { 0.0 };
                assert_eq!(h[[i, n - 1]], last_col);
            }
            for i in 0..n {
                for k in 0..n {
                    if i + 1 < n && k > 0 {
                        assert_eq!(h[[i, k]], h[[i + 1, k - 1]]);
                    }
                }
            }
        }
    }

    #[test]
    fn size_guard() {
        let f = StructuredFactor::toep(&vec![0.0; 4097], 1).unwrap();
        assert!(matches!(f.to_dense(), Err(Error::Capacity(_))));
    }

    #[test]
    fn reversed_hankel_diagonals_reproduce_dense() {
        let c = [0.3, -1.0, 2.0, 0.7, 1.5, -0.2];
        for j in 1..=6 {
            let f = StructuredFactor::hank(&c, j).unwrap();
            let h = f.to_dense().unwrap();
            let g = f.hankel_reversed_diagonals();
            let n = 6;
            for i in 0..n {
                for kp in 0..n {
                    let d = i as isize - kp as isize + n as isize - 1;
                    assert_eq!(h[[i, n - 1 - kp]], g[d as usize]);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn hankel_part_is_symmetric(n in 1usize..20, jr in 0.0f64..1.0, seed in any::<u64>()) {
            let j = 1 + ((n as f64 - 1.0) * jr) as usize;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let h = StructuredFactor::hank(&c, j).unwrap().to_dense().unwrap();
            prop_assert_eq!(h.t().to_owned(), h);
        }
    }
}
