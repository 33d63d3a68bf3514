use std::path::Path;

use ndarray::Array2;

use super::scan::Scanner;
use crate::error::{Error, Result};
use crate::image::ImageGrid;

pub const PGM_MAXVAL: u32 = 255;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmFormat {
    /// `P2`
    Ascii,
    /// `P5`
    Binary,
}

/// `[0, 1] -> {0..255}`, rounding half up; out-of-range values saturate.
pub fn quantize(v: f64) -> u8 {
    (v * PGM_MAXVAL as f64 + 0.5).floor().clamp(0.0, 255.0) as u8
}

pub fn encode_pgm(img: &ImageGrid, format: PgmFormat) -> Result<Vec<u8>> {
    if img.data().iter().any(|v| !v.is_finite()) {
        return Err(Error::arg("cannot quantize non-finite pixels"));
    }
    let (m, n) = img.dims();
    let magic = match format {
        PgmFormat::Ascii => "P2",
        PgmFormat::Binary => "P5",
    };
    let mut out = format!("{magic}\n{n} {m}\n{PGM_MAXVAL}\n").into_bytes();
    match format {
        PgmFormat::Binary => out.extend(img.data().iter().map(|&v| quantize(v))),
        PgmFormat::Ascii => {
            for row in img.data().rows() {
                let mut line = String::new();
                for &v in row {
                    let s = quantize(v).to_string();
                    if !line.is_empty() && line.len() + 1 + s.len() > 70 {
                        out.extend(line.as_bytes());
                        out.push(b'\n');
                        line.clear();
                    }
                    if !line.is_empty() {
                        line.push(' ');
                    }
                    line.push_str(&s);
                }
                out.extend(line.as_bytes());
                out.push(b'\n');
            }
        }
    }
    Ok(out)
}

pub fn decode_pgm(bytes: &[u8]) -> Result<ImageGrid> {
    let binary = match bytes.get(..2) {
        Some(b"P2") => false,
        Some(b"P5") => true,
        _ => return Err(Error::format(0, "not a PGM file (expected P2 or P5)")),
    };
    let mut sc = Scanner::new(bytes, 2, true);
    if bytes.len() > 2 && !bytes[2].is_ascii_whitespace() && bytes[2] != b'#' {
        return Err(Error::format(2, "expected whitespace after magic number"));
    }
    let width: usize = sc.parse("width")?;
    let height: usize = sc.parse("height")?;
    let (at, tok) = sc.expect("maxval")?;
    let maxval: u32 = tok
        .parse()
        .map_err(|_| Error::format(at, format!("expected maxval, found '{tok}'")))?;
    if maxval != PGM_MAXVAL {
        return Err(Error::format(at, format!("only maxval 255 is supported, found {maxval}")));
    }
    if width == 0 || height == 0 {
        return Err(Error::format(at, "image has zero size"));
    }
    let count = width
        .checked_mul(height)
        .ok_or_else(|| Error::format(at, "image dimensions overflow"))?;
    let mut data = Vec::with_capacity(count);
    if binary {
        // exactly one whitespace byte separates the header from the raster
        let start = sc.pos() + 1;
        if sc.pos() >= bytes.len() || !bytes[sc.pos()].is_ascii_whitespace() {
            return Err(Error::format(sc.pos(), "expected whitespace before raster"));
        }
        let avail = bytes.len().saturating_sub(start);
        if avail < count {
            return Err(Error::format(
                bytes.len(),
                format!("raster truncated: expected {count} bytes, found {avail}"),
            ));
        }
        data.extend(bytes[start..start + count].iter().map(|&b| b as f64 / PGM_MAXVAL as f64));
    } else {
        for _ in 0..count {
            let (at, tok) = sc.expect("pixel value")?;
            let v: u32 = tok
                .parse()
                .map_err(|_| Error::format(at, format!("bad pixel value '{tok}'")))?;
            if v > PGM_MAXVAL {
                return Err(Error::format(at, format!("pixel value {v} exceeds maxval")));
            }
            data.push(v as f64 / PGM_MAXVAL as f64);
        }
    }
    let a = Array2::from_shape_vec((height, width), data).expect("length checked");
    Ok(ImageGrid::new(a))
}

pub fn write_pgm(path: impl AsRef<Path>, img: &ImageGrid, format: PgmFormat) -> Result<()> {
    std::fs::write(path, encode_pgm(img, format)?)?;
    Ok(())
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<ImageGrid> {
    decode_pgm(&std::fs::read(path)?)
}
