//! Shared fixtures for the criterion benches.

use ndarray::Array2;
use sfista_core::harness::{blur_psf, BlurKind, BlurLevel};
use sfista_core::imaging::{generate_image, ImageKind};
use sfista_core::{blur_direct, BoundaryCondition, KronDecomposition};

/// A blurred `pattern1` scene with its decomposition.
pub struct Fixture {
    pub dec: KronDecomposition,
    pub x: Array2<f64>,
    pub b: Array2<f64>,
}

pub fn fixture(n: usize, level: BlurLevel) -> Fixture {
    let x = generate_image(ImageKind::Pattern1, n, n, 1).expect("image");
    let psf = blur_psf(BlurKind::Defocus, level, n, 1).expect("psf");
    let bc = BoundaryCondition::Reflective;
    let b = blur_direct(&psf, &x, bc).into_inner();
    let dec = KronDecomposition::new(&psf, bc, (n, n)).expect("decomposition");
    Fixture {
        dec,
        x: x.into_inner(),
        b,
    }
}
