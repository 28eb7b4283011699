//! Sign-flipping left shift on two copies of [0, 1]: `f₁` shifts left, `f₂` follows behind
//! with a sign flip, and everything has left the interval after time 2.

use num_complex::Complex64;

use super::ExactEvaluators;
use crate::error::{Error, Result};
use crate::matrix::ComplexVector;

#[derive(Debug, Clone)]
pub struct ShiftFlip {
    pub n: usize,
    pub h: f64,
}

pub fn build_shift_flip(n: usize) -> Result<ShiftFlip> {
    if n < 4 {
        return Err(Error::InvalidGrid(format!("shift-flip grid needs n >= 4, got {n}")));
    }
    Ok(ShiftFlip { n, h: 1.0 / n as f64 })
}

/// `∫_0^w e^{−λτ}(p + (q−p)τ/w) dτ`.
fn cell_integral(lambda: Complex64, w: f64, p: Complex64, q: Complex64) -> Complex64 {
    let z = lambda * w;
    let (i0, i1) = if z.norm() < 0.5 {
        // Σ (−z)^k/(k+1)! and Σ (−z)^k/(k!(k+2)); the closed form cancels badly here.
        let (mut s0, mut s1) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        let mut pow_over_fact = Complex64::new(1.0, 0.0);
        for k in 0..24 {
            s0 += pow_over_fact / (k + 1) as f64;
            s1 += pow_over_fact / (k + 2) as f64;
            pow_over_fact *= -z / (k + 1) as f64;
        }
        (s0 * w, s1 * (w * w))
    } else {
        let e = (-z).exp();
        ((1.0 - e) / lambda, (1.0 - e * (1.0 + z)) / (lambda * lambda))
    };
    p * i0 + (q - p) * i1 / w
}

impl ShiftFlip {
    /// Nodes per copy.
    pub fn nodes(&self) -> usize {
        self.n + 1
    }

    pub fn x(&self, j: usize) -> f64 {
        j as f64 * self.h
    }

    /// Linear interpolation of nodal values at `s ∈ [0, 1]`.
    fn interp(&self, f: &[Complex64], s: f64) -> Complex64 {
        let pos = (s / self.h).clamp(0.0, self.n as f64);
        let m = (pos.floor() as usize).min(self.n - 1);
        let frac = pos - m as f64;
        f[m] * (1.0 - frac) + f[m + 1] * frac
    }

    fn halves<'a>(&self, f: &'a ComplexVector) -> (&'a [Complex64], &'a [Complex64]) {
        f.as_slice().split_at(self.nodes())
    }

    /// Coordinates forced to zero on the positive part of the discrete domain
    /// `{f₁(1) = −f₂(0), f₂(1) = 0}`: a constraint whose coefficients share one sign
    /// annihilates its whole support on nonnegative vectors.
    pub fn domain_cone_forced_zeros(&self) -> Vec<usize> {
        let m = self.nodes();
        let constraints: [Vec<(usize, f64)>; 2] = [vec![(self.n, 1.0), (m, 1.0)], vec![(m + self.n, 1.0)]];
        let mut forced: Vec<usize> = constraints
            .iter()
            .filter(|row| row.iter().all(|(_, c)| *c > 0.0) || row.iter().all(|(_, c)| *c < 0.0))
            .flat_map(|row| row.iter().map(|(i, _)| *i))
            .collect();
        forced.sort_unstable();
        forced
    }

    /// A basis of the discrete domain; the first vector `e_{f₁(1)} − e_{f₂(0)}` is not in
    /// the span of the domain's positive part.
    pub fn domain_basis(&self) -> Vec<ComplexVector> {
        let d = 2 * self.nodes();
        let (a, b, c) = (self.n, self.nodes(), self.nodes() + self.n);
        let mut basis = Vec::with_capacity(d - 2);
        let mut v = ComplexVector::zeros(d);
        v.0[a] = Complex64::new(1.0, 0.0);
        v.0[b] = Complex64::new(-1.0, 0.0);
        basis.push(v);
        for i in (0..d).filter(|&i| i != a && i != b && i != c) {
            basis.push(ComplexVector::basis(d, i));
        }
        basis
    }
}

impl ExactEvaluators for ShiftFlip {
    fn dim(&self) -> usize {
        2 * self.nodes()
    }

    fn semigroup_apply(&self, t: f64, f: &ComplexVector) -> Option<Result<ComplexVector>> {
        if f.dim() != self.dim() || !(t >= 0.0) {
            return Some(Err(Error::InvalidInput("shift-flip input has wrong size or negative time".into())));
        }
        let (f1, f2) = self.halves(f);
        let zero = Complex64::new(0.0, 0.0);
        let mut out = Vec::with_capacity(self.dim());
        for j in 0..self.nodes() {
            let s = self.x(j) + t;
            out.push(if s <= 1.0 {
                self.interp(f1, s)
            } else if s < 2.0 {
                // Domain functions have f₂(1) = 0, so the flipped copy has left at s = 2.
                -self.interp(f2, s - 1.0)
            } else {
                zero
            });
        }
        for j in 0..self.nodes() {
            let s = self.x(j) + t;
            out.push(if s <= 1.0 { self.interp(f2, s) } else { zero });
        }
        Some(Ok(ComplexVector::new(out)))
    }

    /// `∫_0^2 e^{−λt} e^{tA}f dt`, integrated exactly cell by cell.
    fn resolvent_apply(&self, lambda: Complex64, f: &ComplexVector) -> Option<Result<ComplexVector>> {
        if f.dim() != self.dim() {
            return Some(Err(Error::InvalidInput("shift-flip input has wrong size".into())));
        }
        let (f1, f2) = self.halves(f);
        let h = self.h;
        let n = self.n;
        let seg = |vals: &[Complex64], from: usize, t_off: f64| -> Complex64 {
            // Σ over cells m ≥ from of the integral over t ∈ [t_off + (m−from)h, ...].
            (from..n)
                .map(|m| {
                    let ta = t_off + (m - from) as f64 * h;
                    (-lambda * ta).exp() * cell_integral(lambda, h, vals[m], vals[m + 1])
                })
                .sum()
        };
        let mut out = Vec::with_capacity(self.dim());
        for j in 0..=n {
            let direct = seg(f1, j, 0.0);
            let flipped = seg(f2, 0, (n - j) as f64 * h);
            out.push(direct - flipped);
        }
        for j in 0..=n {
            out.push(seg(f2, j, 0.0));
        }
        Some(Ok(ComplexVector::new(out)))
    }
}
