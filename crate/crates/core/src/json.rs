//! Serde helpers: complex values as `{"re": .., "im": ..}`, matrices as nested arrays.

use num_complex::Complex64;
use serde::ser::{SerializeSeq, Serializer};
use serde::Serialize;

use crate::matrix::{CMatrix, ComplexVector, SquareOperator};

#[derive(Serialize)]
struct Re<'a> {
    re: &'a f64,
    im: &'a f64,
}

pub fn complex<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    Re { re: &z.re, im: &z.im }.serialize(s)
}

pub fn complex_seq<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for z in v {
        seq.serialize_element(&Re { re: &z.re, im: &z.im })?;
    }
    seq.end()
}

pub fn vector<S: Serializer>(v: &ComplexVector, s: S) -> Result<S::Ok, S::Error> {
    complex_seq(v.as_slice(), s)
}

pub fn opt_vector<S: Serializer>(v: &Option<ComplexVector>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => vector(v, s),
        None => s.serialize_none(),
    }
}

pub fn matrix<S: Serializer>(m: &CMatrix, s: S) -> Result<S::Ok, S::Error> {
    let rows: Vec<Vec<Complex64>> = m.row_iter().map(|r| r.iter().copied().collect()).collect();
    let mut seq = s.serialize_seq(Some(rows.len()))?;
    for r in &rows {
        seq.serialize_element(&Row(r))?;
    }
    seq.end()
}

struct Row<'a>(&'a [Complex64]);

impl Serialize for Row<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        complex_seq(self.0, s)
    }
}

pub fn operator<S: Serializer>(a: &SquareOperator, s: S) -> Result<S::Ok, S::Error> {
    matrix(a.entries(), s)
}
