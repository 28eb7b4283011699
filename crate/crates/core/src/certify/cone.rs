use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::ComplexVector;

/// Default relative margins: fractions of the largest entry magnitude of the tested object.
pub const DEFAULT_ZERO_TOL: f64 = 1e-9;
pub const DEFAULT_STRICT_MARGIN: f64 = 1e-6;

/// Thresholds for cone membership. With `relative` set, both are multiplied by the
/// largest entry magnitude of whatever is being classified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConeMargins {
    pub zero_tol: f64,
    pub strict_margin: f64,
    pub relative: bool,
}

impl Default for ConeMargins {
    fn default() -> Self {
        ConeMargins { zero_tol: DEFAULT_ZERO_TOL, strict_margin: DEFAULT_STRICT_MARGIN, relative: true }
    }
}

impl ConeMargins {
    pub fn relative(zero_tol: f64, strict_margin: f64) -> Result<Self> {
        Self::checked(zero_tol, strict_margin, true)
    }

    pub fn absolute(zero_tol: f64, strict_margin: f64) -> Result<Self> {
        Self::checked(zero_tol, strict_margin, false)
    }

    fn checked(zero_tol: f64, strict_margin: f64, relative: bool) -> Result<Self> {
        if !(zero_tol > 0.0 && zero_tol < strict_margin && strict_margin.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "margins need 0 < zero_tol < strict_margin, got {zero_tol} and {strict_margin}"
            )));
        }
        Ok(ConeMargins { zero_tol, strict_margin, relative })
    }

    /// Absolute `(zero_tol, strict_margin)` for an object whose largest entry magnitude is `scale`.
    pub fn resolve(&self, scale: f64) -> (f64, f64) {
        if self.relative {
            (self.zero_tol * scale, self.strict_margin * scale)
        } else {
            (self.zero_tol, self.strict_margin)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum ConeClass {
    NotPositive,
    Zero,
    PositiveNonzero,
    StronglyPositive,
}

impl ConeClass {
    pub fn is_positive(self) -> bool {
        self != ConeClass::NotPositive
    }

    pub fn is_strong(self) -> bool {
        self == ConeClass::StronglyPositive
    }
}

/// Classify a finite sequence of complex entries.
pub fn classify_entries<'a>(entries: impl Iterator<Item = &'a Complex64> + Clone, m: &ConeMargins) -> ConeClass {
    let scale = entries.clone().map(|z| z.norm()).fold(0.0, f64::max);
    let (zt, sm) = m.resolve(scale);
    let mut min_re = f64::INFINITY;
    let mut max_abs = 0.0f64;
    for z in entries {
        if z.re < -zt || z.im.abs() > zt || !z.re.is_finite() {
            return ConeClass::NotPositive;
        }
        min_re = min_re.min(z.re);
        max_abs = max_abs.max(z.re.abs());
    }
    if max_abs <= zt {
        ConeClass::Zero
    } else if min_re >= sm {
        ConeClass::StronglyPositive
    } else {
        ConeClass::PositiveNonzero
    }
}

pub fn cone_classify(f: &ComplexVector, m: &ConeMargins) -> ConeClass {
    classify_entries(f.as_slice().iter(), m)
}

/// Real-valued variant used on real trajectories and resolvents.
pub fn classify_real(values: &[f64], m: &ConeMargins) -> ConeClass {
    let scale = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let (zt, sm) = m.resolve(scale);
    if values.iter().any(|&v| v < -zt || !v.is_finite()) {
        return ConeClass::NotPositive;
    }
    if scale <= zt {
        ConeClass::Zero
    } else if values.iter().all(|&v| v >= sm) {
        ConeClass::StronglyPositive
    } else {
        ConeClass::PositiveNonzero
    }
}

/// Entrywise classification of a real matrix, margins scaled by its largest entry.
pub fn classify_matrix(m: &DMatrix<f64>, margins: &ConeMargins) -> ConeClass {
    classify_real(m.as_slice(), margins)
}

/// Rescale a vector so its largest-modulus entry is real and positive; `None` for the zero vector.
pub fn sign_normalized(v: &ComplexVector) -> Option<ComplexVector> {
    let (idx, mag) = v
        .as_slice()
        .iter()
        .enumerate()
        .map(|(i, z)| (i, z.norm()))
        .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    if mag == 0.0 {
        return None;
    }
    let phase = v.as_slice()[idx] / mag;
    Some(ComplexVector(v.0.map(|z| z / phase)))
}
