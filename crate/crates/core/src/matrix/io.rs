//! Matrix ingestion: a JSON object `{"dim": n, "entries": [[...], ...]}` with
//! complex literals, or CSV of real rows.

use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Deserialize;

use super::operator::{CMatrix, SquareOperator};
use crate::error::{Error, Result};

#[derive(Deserialize)]
struct MatrixFile {
    dim: usize,
    entries: Vec<Vec<serde_json::Value>>,
}

/// Parses `"a"`, `"a+bi"`, `"a-bi"`, `"bi"`, `"-i"` and plain JSON numbers.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Parse(format!("malformed complex literal {s:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix(['i', 'j']) else {
        return t.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // Split at the last sign that is not part of an exponent.
    let bytes = body.as_bytes();
    let mut split = None;
    for k in (1..bytes.len()).rev() {
        if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
            split = Some(k);
            break;
        }
    }
    let (re_part, im_part) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let re = if re_part.is_empty() { 0.0 } else { re_part.parse::<f64>().map_err(|_| bad())? };
    let im = match im_part {
        "" | "+" => 1.0,
        "-" => -1.0,
        p => p.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(Complex64::new(re, im))
}

fn value_to_complex(v: &serde_json::Value) -> Result<Complex64> {
    match v {
        serde_json::Value::Number(n) => n
            .as_f64()
            .map(|x| Complex64::new(x, 0.0))
            .ok_or_else(|| Error::Parse(format!("number {n} out of range"))),
        serde_json::Value::String(s) => parse_complex(s),
        other => Err(Error::Parse(format!("unexpected entry {other}"))),
    }
}

pub fn parse_json_matrix(text: &str) -> Result<SquareOperator> {
    let file: MatrixFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("matrix JSON: {e}")))?;
    let n = file.dim;
    if n == 0 || file.entries.len() != n || file.entries.iter().any(|r| r.len() != n) {
        return Err(Error::Parse(format!("entries must be a {n}x{n} array")));
    }
    let mut m = CMatrix::zeros(n, n);
    for (i, row) in file.entries.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            m[(i, j)] = value_to_complex(v)?;
        }
    }
    SquareOperator::new(m).map_err(|e| Error::Parse(e.to_string()))
}

pub fn parse_csv_matrix(text: &str) -> Result<SquareOperator> {
    let mut reader =
        csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::Parse(format!("matrix CSV: {e}")))?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let row = rec
            .iter()
            .map(|f| f.parse::<f64>().map_err(|_| Error::Parse(format!("bad CSV field {f:?}"))))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Parse("CSV matrix must have n rows of n fields".into()));
    }
    SquareOperator::from_real(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
        .map_err(|e| Error::Parse(e.to_string()))
}

/// Reads a matrix file, choosing the format from the extension (`.csv` or JSON otherwise).
pub fn read_matrix_file(path: &Path) -> Result<SquareOperator> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        parse_csv_matrix(&text)
    } else {
        parse_json_matrix(&text)
    }
}
