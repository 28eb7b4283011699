use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Imaginary parts at or below this magnitude count as zero when deciding realness.
pub const REALITY_TOL: f64 = 1e-12;

/// Largest dimension accepted by the dense kernels.
pub const MAX_DENSE_DIM: usize = 2048;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense square complex matrix, the finite-dimensional stand-in for a generator.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareOperator {
    entries: CMatrix,
    is_real: bool,
}

impl SquareOperator {
    pub fn new(entries: CMatrix) -> Result<Self> {
        let (r, c) = entries.shape();
        if r != c {
            return Err(Error::InvalidInput(format!("matrix is {r}x{c}, expected square")));
        }
        if r == 0 {
            return Err(Error::InvalidInput("matrix has dimension 0".into()));
        }
        if r > MAX_DENSE_DIM {
            return Err(Error::InvalidInput(format!(
                "dimension {r} exceeds dense limit {MAX_DENSE_DIM}"
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("matrix has non-finite entries".into()));
        }
        let is_real = entries.iter().all(|z| z.im.abs() <= REALITY_TOL);
        Ok(Self { entries, is_real })
    }

    pub fn from_real(m: DMatrix<f64>) -> Result<Self> {
        Self::new(m.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("rows have inconsistent lengths".into()));
        }
        if n == 0 {
            return Err(Error::InvalidInput("matrix has dimension 0".into()));
        }
        Self::from_real(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(CMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(CMatrix::identity(n, n))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn is_real(&self) -> bool {
        self.is_real
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i, j)]
    }

    pub fn real_part(&self) -> DMatrix<f64> {
        self.entries.map(|z| z.re)
    }

    /// Operator norm induced by the sup-norm (maximum absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        norm_inf(&self.entries)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// `A + c I`.
    pub fn shifted(&self, c: Complex64) -> Self {
        let mut m = self.entries.clone();
        for i in 0..self.dim() {
            m[(i, i)] += c;
        }
        Self { is_real: self.is_real && c.im.abs() <= REALITY_TOL, entries: m }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { entries: &self.entries * Complex64::new(c, 0.0), is_real: self.is_real }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.dim())?;
        Self::new(&self.entries * &other.entries)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.dim())?;
        Self::new(&self.entries - &other.entries)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.dim())?;
        Self::new(&self.entries + &other.entries)
    }

    pub fn adjoint(&self) -> Self {
        Self { entries: self.entries.adjoint(), is_real: self.is_real }
    }

    pub fn apply(&self, v: &ComplexVector) -> Result<ComplexVector> {
        self.check_dim(v.dim())?;
        Ok(ComplexVector(&self.entries * &v.0))
    }

    /// True when every off-diagonal entry has real part at least `-tol` and is real.
    pub fn is_metzler(&self, tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|i| {
            (0..n).all(|j| i == j || (self.entries[(i, j)].re >= -tol && self.entries[(i, j)].im.abs() <= tol))
        })
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.dim() {
            return Err(Error::InvalidInput(format!(
                "dimension mismatch: {} vs {}",
                self.dim(),
                n
            )));
        }
        Ok(())
    }
}

/// Complex vector with dimension fixed at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector(pub CVector);

impl ComplexVector {
    pub fn new(v: Vec<Complex64>) -> Self {
        Self(CVector::from_vec(v))
    }

    pub fn from_real(v: &[f64]) -> Self {
        Self(CVector::from_iterator(v.len(), v.iter().map(|&x| Complex64::new(x, 0.0))))
    }

    pub fn zeros(n: usize) -> Self {
        Self(CVector::from_element(n, ZERO))
    }

    pub fn ones(n: usize) -> Self {
        Self(CVector::from_element(n, ONE))
    }

    pub fn basis(n: usize, j: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[j] = ONE;
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        self.0.as_slice()
    }

    pub fn real_part(&self) -> Vec<f64> {
        self.0.iter().map(|z| z.re).collect()
    }

    pub fn norm_inf(&self) -> f64 {
        self.0.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// `sum conj(self_i) other_i`.
    pub fn dot(&self, other: &Self) -> Complex64 {
        self.0.dotc(&other.0)
    }
}

pub fn norm_inf(m: &CMatrix) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn norm_inf_real(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}
