//! Structured Tikhonov image restoration.
//!
//! A spatially invariant blur `A` is approximated by a short sum of Kronecker
//! products of banded Toeplitz(-plus-Hankel) factors, and the Tikhonov problem
//! `min 1/2 ||A x - b||^2 + lambda^2/2 ||x||^2` is solved with FISTA on vectors
//! or with its matrix form (structured FISTA) on `sum_i H_i X K_i^T`.

pub mod blur;
pub mod error;
pub mod harness;
pub mod image;
pub mod imaging;
pub mod kronecker;
pub mod linalg;
pub mod operator;
pub mod psf;
pub mod rng;
pub mod solvers;
pub mod structured;

pub use blur::{blur_direct, blur_matrix_dense};
pub use error::{Error, Result};
pub use image::ImageGrid;
pub use kronecker::{decompose, KronDecomposition, KronOperator};
pub use operator::{BlurOperator, DenseOperator, LinearOperator};
pub use psf::{BoundaryCondition, Psf};
pub use solvers::{fista, sfista, SolveConfig, SolveRun};
pub use structured::{ApplyMode, FactorApplyPlan, StructuredFactor};
