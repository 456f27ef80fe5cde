//! Plain-text dense matrix format.
//!
//! ```text
//! # dense <rows> <cols>
//! <cols whitespace-separated values>   (repeated <rows> times)
//! ```
//!
//! Values are written with 17 significant digits so every `f64` round-trips.
//! Vectors are stored as single-column matrices.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_matrix<W: Write>(mut w: W, m: &DenseMatrix) -> Result<()> {
    writeln!(w, "# dense {} {}", m.rows(), m.cols())?;
    for r in 0..m.rows() {
        let line: Vec<String> = (0..m.cols()).map(|c| format_value(m.get(r, c))).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    Ok(())
}

pub fn matrix_to_string(m: &DenseMatrix) -> String {
    let mut buf = Vec::new();
    write_matrix(&mut buf, m).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("ascii output")
}

pub fn read_matrix<R: Read>(r: R) -> Result<DenseMatrix> {
    let mut lines = BufReader::new(r).lines();
    let header = loop {
        match lines.next() {
            Some(line) => {
                let line = line?;
                if !line.trim().is_empty() {
                    break line;
                }
            }
            None => return Err(Error::Parse("empty matrix file".into())),
        }
    };
    let fields: Vec<&str> = header.split_whitespace().collect();
    let (rows, cols) = match fields.as_slice() {
        ["#", "dense", r, c] => (parse_dim(r)?, parse_dim(c)?),
        _ => return Err(Error::Parse(format!("bad header line: {header:?}"))),
    };
    let mut entries = Vec::with_capacity(rows * cols);
    let mut row_count = 0;
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if row_count == rows {
            return Err(Error::Parse(format!("more than {rows} rows")));
        }
        let before = entries.len();
        for tok in line.split_whitespace() {
            let v: f64 =
                tok.parse().map_err(|_| Error::Parse(format!("bad number {tok:?} on row {}", row_count + 1)))?;
            entries.push(v);
        }
        if entries.len() - before != cols {
            return Err(Error::Parse(format!(
                "row {} has {} values, expected {cols}",
                row_count + 1,
                entries.len() - before
            )));
        }
        row_count += 1;
    }
    if row_count != rows {
        return Err(Error::Parse(format!("expected {rows} rows, found {row_count}")));
    }
    DenseMatrix::from_row_major(rows, cols, entries)
}

fn parse_dim(s: &str) -> Result<usize> {
    s.parse().map_err(|_| Error::Parse(format!("bad dimension {s:?}")))
}

pub fn read_matrix_file(path: &Path) -> Result<DenseMatrix> {
    read_matrix(fs::File::open(path)?)
}

pub fn write_matrix_file(path: &Path, m: &DenseMatrix) -> Result<()> {
    let mut f = std::io::BufWriter::new(fs::File::create(path)?);
    write_matrix(&mut f, m)?;
    f.flush()?;
    Ok(())
}

/// Reads a vector stored as an `n×1` (or `1×n`) matrix.
pub fn read_vector_file(path: &Path) -> Result<Vec<f64>> {
    let m = read_matrix_file(path)?;
    if m.cols() == 1 || m.rows() == 1 {
        Ok(m.to_row_major())
    } else {
        Err(Error::Parse(format!("expected a vector, got {}x{}", m.rows(), m.cols())))
    }
}

pub fn write_vector_file(path: &Path, v: &[f64]) -> Result<()> {
    write_matrix_file(path, &DenseMatrix::column_vector(v)?)
}
