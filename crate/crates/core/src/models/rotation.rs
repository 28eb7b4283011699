//! Rotation about the diagonal axis in R³ and its damped and shifted variants.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::ExactEvaluators;
use crate::error::{Error, Result};
use crate::matrix::{CMatrix, ComplexVector, SquareOperator};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RotationVariant {
    /// `A x = u × x`.
    Plain,
    /// `A − μ(I − P)`.
    Damped,
    /// `A − μP`.
    Shifted,
}

#[derive(Debug, Clone)]
pub struct Rotation {
    pub variant: RotationVariant,
    pub mu: f64,
    generator: DMatrix<f64>,
    projection: DMatrix<f64>,
}

/// Unit axis `(1,1,1)/√3`.
pub fn axis() -> DVector<f64> {
    DVector::from_element(3, 1.0 / 3f64.sqrt())
}

/// Cross-product matrix `[u]×` for the diagonal axis.
pub fn cross_generator() -> DMatrix<f64> {
    let u = axis();
    DMatrix::from_row_slice(3, 3, &[0.0, -u[2], u[1], u[2], 0.0, -u[0], -u[1], u[0], 0.0])
}

pub fn build_rotation(variant: RotationVariant, mu: f64) -> Result<(SquareOperator, Rotation)> {
    if variant != RotationVariant::Plain && !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::InvalidParameters(format!("mu must be positive, got {mu}")));
    }
    let k = cross_generator();
    let u = axis();
    let p = &u * u.transpose();
    let id = DMatrix::<f64>::identity(3, 3);
    let a = match variant {
        RotationVariant::Plain => k.clone(),
        RotationVariant::Damped => &k - (&id - &p) * mu,
        RotationVariant::Shifted => &k - &p * mu,
    };
    let op = SquareOperator::from_real(a)?;
    let mu = if variant == RotationVariant::Plain { 0.0 } else { mu };
    Ok((op, Rotation { variant, mu, generator: k, projection: p }))
}

impl Rotation {
    pub fn projection(&self) -> &DMatrix<f64> {
        &self.projection
    }

    fn complement(&self) -> DMatrix<f64> {
        DMatrix::identity(3, 3) - &self.projection
    }

    /// Closed-form `e^{tA}`: `P + cos t (I−P) + sin t [u]×` with the variant's damping.
    pub fn semigroup_matrix(&self, t: f64) -> DMatrix<f64> {
        let rot = self.complement() * t.cos() + &self.generator * t.sin();
        match self.variant {
            RotationVariant::Plain => &self.projection + rot,
            RotationVariant::Damped => &self.projection + rot * (-self.mu * t).exp(),
            RotationVariant::Shifted => &self.projection * (-self.mu * t).exp() + rot,
        }
    }

    /// Closed-form `R(λ, A)`.
    pub fn resolvent_matrix(&self, lambda: Complex64) -> Result<CMatrix> {
        let c = |m: &DMatrix<f64>| m.map(|x| Complex64::new(x, 0.0));
        let (pp, q, k) = (c(&self.projection), c(&self.complement()), c(&self.generator));
        // On range(I−P) the generator acts as a rotation: (z − K)^{-1} = (z(I−P) + K)/(z²+1).
        let (zp, zq) = match self.variant {
            RotationVariant::Plain => (lambda, lambda),
            RotationVariant::Damped => (lambda, lambda + self.mu),
            RotationVariant::Shifted => (lambda + self.mu, lambda),
        };
        let den = zq * zq + 1.0;
        if zp.norm() < 1e-14 || den.norm() < 1e-14 {
            return Err(Error::SpectralValueHit { nearest: lambda, mode: None });
        }
        Ok(pp / zp + (q * zq + k) / den)
    }

    /// Smallest entry of the real resolvent `R(λ, A)`, `λ > s(A)`.
    pub fn resolvent_min_entry(&self, lambda: f64) -> Result<f64> {
        let r = self.resolvent_matrix(Complex64::new(lambda, 0.0))?;
        Ok(r.iter().map(|z| z.re).fold(f64::INFINITY, f64::min))
    }

    /// Largest `λ₁ ≤ lambda_max` with `R(λ, A) ≥ 0` on all of `(0, λ₁]`, located on a grid of
    /// 400 points and refined by bisection; `None` if positivity already fails near 0.
    pub fn resolvent_positivity_limit(&self, lambda_max: f64) -> Result<Option<f64>> {
        let ok = |l: f64| self.resolvent_min_entry(l).map(|m| m >= 0.0);
        if !ok(1e-9 * lambda_max)? {
            return Ok(None);
        }
        let steps = 400;
        let mut prev = 1e-9 * lambda_max;
        for k in 1..=steps {
            let l = lambda_max * k as f64 / steps as f64;
            if !ok(l)? {
                let (mut lo, mut hi) = (prev, l);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if ok(mid)? {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                return Ok(Some(lo));
            }
            prev = l;
        }
        Ok(Some(lambda_max))
    }
}

impl ExactEvaluators for Rotation {
    fn dim(&self) -> usize {
        3
    }

    fn semigroup_apply(&self, t: f64, f: &ComplexVector) -> Option<Result<ComplexVector>> {
        let e = self.semigroup_matrix(t).map(|x| Complex64::new(x, 0.0));
        Some(Ok(ComplexVector(e * &f.0)))
    }

    fn resolvent_apply(&self, lambda: Complex64, f: &ComplexVector) -> Option<Result<ComplexVector>> {
        Some(self.resolvent_matrix(lambda).map(|r| ComplexVector(r * &f.0)))
    }
}
