//! Truncated sequence-space model: coordinates `y_n` for `|n| ≤ N` plus a constant tail `y_∞`.
//!
//! A vector `y` stands for the convergent sequence equal to `y_n` on `|n| ≤ N` and to `y_∞`
//! beyond; write `y = c𝟙 + x` with `c = y_∞`. The generator is `A = −B^{-1}(0 ⊕ M)B` with
//! `B(c𝟙 + x) = (c + ⟨g, x⟩)𝟙 + x` and `M = β(x + Sx)/2 + α(x − Sx)/2`, `(Sx)_n = x_{−n}`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::ExactEvaluators;
use crate::error::{Error, Result};
use crate::matrix::{ComplexVector, SquareOperator};

/// Fraction of each admissible bound `(e^{−nα} − e^{−nβ})/2` used for `gₙ`.
pub const G_FRACTION: f64 = 0.9;
/// Mass of `g` carried by indices beyond the truncation.
pub const TAIL_MASS: f64 = 0.05;

#[derive(Debug, Clone)]
pub struct SequenceModel {
    pub big_n: usize,
    /// Indexed by `n + N`.
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub g: Vec<f64>,
    pub tail_mass: f64,
}

fn rates(n: i64) -> (f64, f64) {
    if n == 0 {
        (1.0, 1.0)
    } else {
        let a = (1.0 + n.unsigned_abs() as f64).ln();
        (a, 2.0 * a)
    }
}

/// The inequality `2gₙ + e^{−nβₙ} − e^{−nαₙ}`; must be negative for every `1 ≤ n ≤ N`.
pub fn inequality_value(model: &SequenceModel, n: usize) -> f64 {
    let i = model.big_n + n;
    let nf = n as f64;
    2.0 * model.g[i] + (-nf * model.beta[i]).exp() - (-nf * model.alpha[i]).exp()
}

pub fn build_sequence(big_n: usize) -> Result<(SquareOperator, SequenceModel)> {
    if big_n < 2 {
        return Err(Error::InvalidParameters(format!("sequence model needs N >= 2, got {big_n}")));
    }
    let len = 2 * big_n + 1;
    let mut alpha = vec![0.0; len];
    let mut beta = vec![0.0; len];
    let mut g = vec![0.0; len];
    for (i, n) in (-(big_n as i64)..=big_n as i64).enumerate() {
        let (a, b) = rates(n);
        alpha[i] = a;
        beta[i] = b;
        if n != 0 {
            let k = n.unsigned_abs() as f64;
            g[i] = 0.5 * G_FRACTION * ((-k * a).exp() - (-k * b).exp());
        }
    }
    let off: f64 = g.iter().sum();
    g[big_n] = 1.0 - TAIL_MASS - off;
    if g[big_n] <= 0.0 {
        return Err(Error::InvalidParameters("no mass left for g_0".into()));
    }
    let model = SequenceModel { big_n, alpha, beta, g, tail_mass: TAIL_MASS };
    for n in 1..=big_n {
        let v = inequality_value(&model, n);
        if !(v < 0.0) {
            return Err(Error::InvalidParameters(format!("inequality fails at n={n}: {v:e}")));
        }
    }
    let a = model.generator_matrix();
    Ok((SquareOperator::from_real(a)?, model))
}

impl SequenceModel {
    pub fn dim(&self) -> usize {
        2 * self.big_n + 2
    }

    /// Slot of index `n` (`|n| ≤ N`); the tail sits in the last slot.
    pub fn slot(&self, n: i64) -> usize {
        (n + self.big_n as i64) as usize
    }

    fn split(&self, y: &[Complex64]) -> (Complex64, Vec<Complex64>) {
        let c = y[self.dim() - 1];
        (c, y[..self.dim() - 1].iter().map(|v| v - c).collect())
    }

    fn join(&self, c: Complex64, x: &[Complex64]) -> Vec<Complex64> {
        let mut y: Vec<Complex64> = x.iter().map(|v| v + c).collect();
        y.push(c);
        y
    }

    fn pair(&self, x: &[Complex64], i: usize) -> (Complex64, Complex64) {
        let j = 2 * self.big_n - i;
        (0.5 * (x[i] + x[j]), 0.5 * (x[i] - x[j]))
    }

    fn g_dot(&self, x: &[Complex64]) -> Complex64 {
        self.g.iter().zip(x).map(|(g, v)| v * *g).sum()
    }

    /// Applies the diagonal-in-parity map `x ↦ f(β)(x+Sx)/2 + f(α)(x−Sx)/2`.
    fn parity_map(&self, x: &[Complex64], f: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
        (0..x.len())
            .map(|i| {
                let (even, odd) = self.pair(x, i);
                even * f(self.beta[i]) + odd * f(self.alpha[i])
            })
            .collect()
    }

    fn generator_matrix(&self) -> DMatrix<f64> {
        let d = self.dim();
        let mut a = DMatrix::zeros(d, d);
        for j in 0..d {
            let col = self.apply_generator(ComplexVector::basis(d, j).0.as_slice());
            for i in 0..d {
                a[(i, j)] = col[i].re;
            }
        }
        a
    }

    /// `A(c𝟙 + x) = ⟨g, Mx⟩𝟙 − Mx`.
    fn apply_generator(&self, y: &[Complex64]) -> Vec<Complex64> {
        let (_, x) = self.split(y);
        let mx = self.parity_map(&x, |r| Complex64::new(r, 0.0));
        let c = self.g_dot(&mx);
        self.join(c, &mx.iter().map(|v| -v).collect::<Vec<_>>())
    }

    /// `P(c𝟙 + x) = (c + ⟨g, x⟩)𝟙`.
    pub fn projection_apply(&self, y: &[Complex64]) -> Vec<Complex64> {
        let (c, x) = self.split(y);
        let v = c + self.g_dot(&x);
        vec![v; self.dim()]
    }

    pub fn projection_matrix(&self) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |_, j| if j == d - 1 { self.tail_mass } else { self.g[j] })
    }

    /// Indicator `𝟙_{n}` in y-coordinates.
    pub fn indicator(&self, n: i64) -> ComplexVector {
        ComplexVector::basis(self.dim(), self.slot(n))
    }
}

impl ExactEvaluators for SequenceModel {
    fn dim(&self) -> usize {
        SequenceModel::dim(self)
    }

    /// `e^{tA}(c𝟙 + x) = (c + ⟨g, x − e^{−tM}x⟩)𝟙 + e^{−tM}x`.
    fn semigroup_apply(&self, t: f64, f: &ComplexVector) -> Option<Result<ComplexVector>> {
        let (c, x) = self.split(f.as_slice());
        let ex = self.parity_map(&x, |r| Complex64::new((-t * r).exp(), 0.0));
        let diff: Vec<Complex64> = x.iter().zip(&ex).map(|(a, b)| a - b).collect();
        let c_new = c + self.g_dot(&diff);
        Some(Ok(ComplexVector::new(self.join(c_new, &ex))))
    }

    /// `R(λ)(c𝟙 + x) = ((c + ⟨g,x⟩)/λ − ⟨g, (λ+M)^{-1}x⟩)𝟙 + (λ+M)^{-1}x`.
    fn resolvent_apply(&self, lambda: Complex64, f: &ComplexVector) -> Option<Result<ComplexVector>> {
        let hit = std::iter::once(0.0).chain(self.alpha.iter().chain(&self.beta).map(|r| -r));
        for s in hit {
            if (lambda - s).norm() < 1e-14 {
                return Some(Err(Error::SpectralValueHit { nearest: Complex64::new(s, 0.0), mode: None }));
            }
        }
        let (c, x) = self.split(f.as_slice());
        let rx = self.parity_map(&x, |r| 1.0 / (lambda + r));
        let c_new = (c + self.g_dot(&x)) / lambda - self.g_dot(&rx);
        Some(Ok(ComplexVector::new(self.join(c_new, &rx))))
    }
}
