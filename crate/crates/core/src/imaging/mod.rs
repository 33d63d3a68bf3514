//! Test scenes, noise, quality metrics and file formats.

mod generate;
mod matrix;
mod metrics;
mod noise;
mod pgm;
mod scan;

use std::path::Path;

pub use generate::{generate_image, ImageKind};
pub use matrix::{decode_matrix, encode_matrix, read_matrix, read_psf, write_matrix, write_psf, MatrixFile};
pub use metrics::{compute_metrics, relative_error, relative_residual, Metrics};
pub use noise::{add_noise, raw_noise, NoiseKind, NoiseSpec};
pub use pgm::{decode_pgm, encode_pgm, quantize, read_pgm, write_pgm, PgmFormat, PGM_MAXVAL};

use crate::error::Result;
use crate::image::ImageGrid;

fn is_pgm(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("pgm"))
}

/// Read an image, as PGM when the extension is `.pgm` and as a matrix file otherwise.
pub fn read_image(path: impl AsRef<Path>) -> Result<ImageGrid> {
    let path = path.as_ref();
    if is_pgm(path) {
        read_pgm(path)
    } else {
        Ok(ImageGrid::new(read_matrix(path)?.data))
    }
}

/// Write an image, as binary PGM for `.pgm` paths and as a matrix file otherwise.
pub fn write_image(path: impl AsRef<Path>, img: &ImageGrid) -> Result<()> {
    let path = path.as_ref();
    if is_pgm(path) {
        write_pgm(path, img, PgmFormat::Binary)
    } else {
        write_matrix(path, img.data(), None)
    }
}
