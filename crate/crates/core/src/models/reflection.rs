//! The reflection generator `A f = −2f − Sf + (3/2)φ(f)𝟙` on a symmetric grid of [−1, 1].

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::ExactEvaluators;
use crate::error::{Error, Result};
use crate::matrix::{ComplexVector, SquareOperator};

#[derive(Debug, Clone)]
pub struct Reflection {
    pub n: usize,
    /// Grid points `x_j = −1 + 2j/(n−1)`.
    pub x: Vec<f64>,
    /// Trapezoid weights, summing to 2.
    pub w: Vec<f64>,
}

pub fn build_reflection(n: usize) -> Result<(SquareOperator, Reflection)> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::InvalidGrid(format!("reflection grid needs odd n >= 3, got {n}")));
    }
    let h = 2.0 / (n - 1) as f64;
    let x: Vec<f64> = (0..n).map(|j| -1.0 + h * j as f64).collect();
    let mut w = vec![h; n];
    w[0] = 0.5 * h;
    w[n - 1] = 0.5 * h;
    let a = DMatrix::from_fn(n, n, |i, j| {
        let mut v = 1.5 * w[j];
        if i == j {
            v -= 2.0;
        }
        if i + j == n - 1 {
            v -= 1.0;
        }
        v
    });
    Ok((SquareOperator::from_real(a)?, Reflection { n, x, w }))
}

/// `ε` below which `e^{tA}f_ε(−1) < 0`: `2e^{−2t} sinh t / (1 − e^{−3t})`.
pub fn epsilon_threshold(t: f64) -> f64 {
    2.0 * (-2.0 * t).exp() * t.sinh() / (1.0 - (-3.0 * t).exp())
}

/// `e^{tA}f(−1)` for any `f` with `f(1)=1`, `f(−1)=0`, `φ(f)=ε`.
pub fn value_at_left_end(t: f64, eps: f64) -> f64 {
    0.5 * eps * (1.0 - (-3.0 * t).exp()) - (-2.0 * t).exp() * t.sinh()
}

impl Reflection {
    pub fn phi(&self, f: &[f64]) -> f64 {
        self.w.iter().zip(f).map(|(w, f)| w * f).sum()
    }

    pub fn step(&self) -> f64 {
        self.x[1] - self.x[0]
    }

    /// `P = ½ 𝟙 wᵀ`.
    pub fn projection(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |_, j| 0.5 * self.w[j])
    }

    fn split(&self, f: &[Complex64]) -> (Complex64, Vec<Complex64>, Vec<Complex64>) {
        let p: Complex64 = self.w.iter().zip(f).map(|(w, z)| z * *w).sum::<Complex64>() * 0.5;
        let g: Vec<Complex64> = f.iter().map(|z| z - p).collect();
        let sg: Vec<Complex64> = g.iter().rev().copied().collect();
        (p, g, sg)
    }

    /// Grid function with `f(−1)=0`, `f(1)=1` and trapezoid integral `ε`:
    /// ramp to a plateau `c` over the first cell, ramp to 1 over the last.
    pub fn f_eps_grid(&self, eps: f64) -> Result<Vec<f64>> {
        let h = self.step();
        let c = (eps - 0.5 * h) / (h * (self.n - 2) as f64);
        if !(0.0..=1.0).contains(&c) {
            return Err(Error::InvalidParameters(format!(
                "epsilon {eps} not realizable on this grid (needs >= {})",
                0.5 * h
            )));
        }
        let mut f = vec![c; self.n];
        f[0] = 0.0;
        f[self.n - 1] = 1.0;
        Ok(f)
    }
}

/// Piecewise-linear `f_ε` on [−1, 1]: 0 at −1, plateau `c` on [−1+ε, 1−ε], 1 at 1, `∫f_ε = ε`.
#[derive(Debug, Clone, Copy)]
pub struct FEpsilon {
    pub eps: f64,
    plateau: f64,
}

impl FEpsilon {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParameters(format!("epsilon must lie in (0, 1), got {eps}")));
        }
        Ok(Self { eps, plateau: 0.5 * eps / (2.0 - eps) })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (d, c) = (self.eps, self.plateau);
        if x <= -1.0 + d {
            c * (x + 1.0) / d
        } else if x < 1.0 - d {
            c
        } else {
            c + (1.0 - c) * (x - 1.0 + d) / d
        }
    }

    pub fn integral(&self) -> f64 {
        self.eps
    }

    /// Exact `e^{tA}f_ε(x)` for the continuum operator.
    pub fn semigroup_at(&self, t: f64, x: f64) -> f64 {
        let p = 0.5 * self.eps;
        let e2 = (-2.0 * t).exp();
        p + e2 * (t.cosh() * (self.eval(x) - p) - t.sinh() * (self.eval(-x) - p))
    }
}

impl ExactEvaluators for Reflection {
    fn dim(&self) -> usize {
        self.n
    }

    /// `P f + e^{−2t}(cosh t (I−P)f − sinh t S(I−P)f)`.
    fn semigroup_apply(&self, t: f64, f: &ComplexVector) -> Option<Result<ComplexVector>> {
        let (p, g, sg) = self.split(f.as_slice());
        let (c, s) = ((-2.0 * t).exp() * t.cosh(), (-2.0 * t).exp() * t.sinh());
        Some(Ok(ComplexVector::new((0..self.n).map(|i| p + g[i] * c - sg[i] * s).collect())))
    }

    /// `P f/λ + ((λ+2)(I−P)f − S(I−P)f)/((λ+2)² − 1)`.
    fn resolvent_apply(&self, lambda: Complex64, f: &ComplexVector) -> Option<Result<ComplexVector>> {
        let z = lambda + 2.0;
        let den = z * z - 1.0;
        if lambda.norm() < 1e-14 || den.norm() < 1e-14 {
            return Some(Err(Error::SpectralValueHit { nearest: lambda, mode: None }));
        }
        let (p, g, sg) = self.split(f.as_slice());
        Some(Ok(ComplexVector::new((0..self.n).map(|i| p / lambda + (g[i] * z - sg[i]) / den).collect())))
    }
}
