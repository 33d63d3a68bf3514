use std::fmt::Write as _;
use std::path::Path;

use ndarray::Array2;

use super::scan::Scanner;
use crate::error::{Error, Result};
use crate::psf::Psf;

/// Contents of a matrix text file: values plus an optional 1-based center.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixFile {
    pub data: Array2<f64>,
    pub center: Option<(usize, usize)>,
}

/// `rows cols`, optional `center l q`, then one row per line at 17 significant digits.
pub fn encode_matrix(data: &Array2<f64>, center: Option<(usize, usize)>) -> String {
    let (m, n) = data.dim();
    let mut out = format!("{m} {n}\n");
    if let Some((l, q)) = center {
        writeln!(out, "center {l} {q}").unwrap();
    }
    for row in data.rows() {
        let line: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn decode_matrix(bytes: &[u8]) -> Result<MatrixFile> {
    let mut sc = Scanner::new(bytes, 0, false);
    let rows: usize = sc.parse("row count")?;
    let cols: usize = sc.parse("column count")?;
    if rows == 0 || cols == 0 {
        return Err(Error::format(0, "matrix has zero size"));
    }
    let count = rows
        .checked_mul(cols)
        .ok_or_else(|| Error::format(0, "matrix dimensions overflow"))?;
    let mut data = Vec::with_capacity(count.min(1 << 24));
    let mut center = None;
    let first = sc.expect("matrix entries")?;
    let mut pending = Some(first);
    if first.1 == "center" {
        let at = first.0;
        let l: usize = sc.parse("center row")?;
        let q: usize = sc.parse("center column")?;
        if l < 1 || l > rows || q < 1 || q > cols {
            return Err(Error::format(at, format!("center ({l}, {q}) outside the {rows}x{cols} matrix")));
        }
        center = Some((l, q));
        pending = None;
    }
    for _ in 0..count {
        let (at, tok) = match pending.take() {
            Some(t) => t,
            None => sc.expect("matrix entry")?,
        };
        let v: f64 = tok
            .parse()
            .map_err(|_| Error::format(at, format!("bad matrix entry '{tok}'")))?;
        data.push(v);
    }
    if let Some((at, tok)) = sc.next()? {
        return Err(Error::format(at, format!("trailing data '{tok}' after {count} entries")));
    }
    let data = Array2::from_shape_vec((rows, cols), data).expect("length checked");
    Ok(MatrixFile { data, center })
}

pub fn write_matrix(path: impl AsRef<Path>, data: &Array2<f64>, center: Option<(usize, usize)>) -> Result<()> {
    std::fs::write(path, encode_matrix(data, center))?;
    Ok(())
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<MatrixFile> {
    decode_matrix(&std::fs::read(path)?)
}

/// PSF from a matrix file; without a `center` line the middle pixel is used.
pub fn read_psf(path: impl AsRef<Path>) -> Result<Psf> {
    let f = read_matrix(path)?;
    let (r, c) = f.data.dim();
    let center = f.center.unwrap_or((r / 2 + 1, c / 2 + 1));
    Psf::new(f.data, center)
}

pub fn write_psf(path: impl AsRef<Path>, psf: &Psf) -> Result<()> {
    write_matrix(path, psf.data(), Some(psf.center()))
}
