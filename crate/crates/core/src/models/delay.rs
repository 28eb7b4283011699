//! Upwind discretization of `f' ` on [−2, 0] with the boundary law
//! `f'(0) = ∫_{−2}^{−1} f − ∫_{−1}^0 f`, and the characteristic roots of the delay equation.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::SquareOperator;

#[derive(Debug, Clone)]
pub struct DelayModel {
    /// Number of cells; the grid has `n + 1` nodes `x_j = −2 + 2j/n`.
    pub n: usize,
    pub x: Vec<f64>,
    /// Trapezoid weights of the boundary functional `Φ`.
    pub boundary_row: Vec<f64>,
    /// Discretized left functional `φ(f) = f(0) + ∫_{−2}^{−1}(2+x)f + ∫_{−1}^0(−x)f`.
    pub left_functional: Vec<f64>,
}

pub fn build_delay(n: usize) -> Result<(SquareOperator, DelayModel)> {
    if n < 20 {
        return Err(Error::InvalidGrid(format!("delay grid needs n >= 20, got {n}")));
    }
    if !n.is_multiple_of(2) {
        return Err(Error::InvalidGrid(format!("delay grid with n={n} cells misses x=-1")));
    }
    let h = 2.0 / n as f64;
    let mid = n / 2;
    let x: Vec<f64> = (0..=n).map(|j| -2.0 + h * j as f64).collect();
    let trap = |j: usize, lo: usize, hi: usize| -> f64 {
        if j < lo || j > hi {
            0.0
        } else if j == lo || j == hi {
            0.5 * h
        } else {
            h
        }
    };
    let boundary_row: Vec<f64> = (0..=n).map(|j| trap(j, 0, mid) - trap(j, mid, n)).collect();
    let mut left_functional: Vec<f64> =
        (0..=n).map(|j| trap(j, 0, mid) * (2.0 + x[j]) + trap(j, mid, n) * (-x[j])).collect();
    left_functional[n] += 1.0;

    let mut a = DMatrix::zeros(n + 1, n + 1);
    for j in 0..n {
        a[(j, j)] = -1.0 / h;
        a[(j, j + 1)] = 1.0 / h;
    }
    for (j, w) in boundary_row.iter().enumerate() {
        a[(n, j)] = *w;
    }
    Ok((SquareOperator::from_real(a)?, DelayModel { n, x, boundary_row, left_functional }))
}

impl DelayModel {
    pub fn phi(&self, f: &[f64]) -> f64 {
        self.left_functional.iter().zip(f).map(|(w, v)| w * v).sum()
    }
}

/// Factor `iλ − 1 + e^{−λ}`; the other factor is its conjugate reflection.
fn factor(z: Complex64) -> (Complex64, Complex64) {
    let i = Complex64::new(0.0, 1.0);
    let e = (-z).exp();
    (i * z - 1.0 + e, i - e)
}

/// `(iλ − 1 + e^{−λ})(−iλ − 1 + e^{−λ}) = λ² + (1 − e^{−λ})²`.
pub fn characteristic(z: Complex64) -> Complex64 {
    let d = 1.0 - (-z).exp();
    z * z + d * d
}

/// `λ + (1 − e^{−λ})²/λ`, whose zero multiplicities are the algebraic multiplicities of the
/// spectral values (the removable singularity at 0 is handled by its Taylor expansion).
pub fn characteristic_reduced(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        // (1 − e^{−z})²/z = z − z² + (7/12) z³ − ...
        return z + z - z * z + z * z * z * (7.0 / 12.0);
    }
    let d = 1.0 - (-z).exp();
    z + d * d / z
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootBox {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl RootBox {
    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }
}

#[derive(Debug, Clone)]
pub struct RootSearch {
    pub roots: Vec<Complex64>,
    /// Seeds whose Newton iteration stagnated or left the box.
    pub dropped: Vec<(Complex64, String)>,
}

fn newton(mut z: Complex64, conj_branch: bool) -> Option<Complex64> {
    for _ in 0..100 {
        // Roots of the second factor are conjugates of roots of the first.
        let w = if conj_branch { z.conj() } else { z };
        let (f, df) = factor(w);
        if df.norm() < 1e-14 {
            return None;
        }
        let step = f / df;
        let next = w - step;
        z = if conj_branch { next.conj() } else { next };
        if step.norm() <= 1e-15 * z.norm().max(1.0) {
            let (f, _) = factor(if conj_branch { z.conj() } else { z });
            return (f.norm() < 1e-12).then_some(z);
        }
        if !z.re.is_finite() || z.norm() > 1e6 {
            return None;
        }
    }
    None
}

/// Roots of the characteristic function in `bx` from Newton on each seed,
/// deduplicated at 1e−8, closed under conjugation.
pub fn delay_characteristic_roots(bx: RootBox, seeds: &[Complex64]) -> Result<RootSearch> {
    if !(bx.re_min < bx.re_max && bx.im_min < bx.im_max) || [bx.re_min, bx.re_max, bx.im_min, bx.im_max].iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("root box must be bounded and non-empty".into()));
    }
    let mut roots: Vec<Complex64> = Vec::new();
    let mut dropped = Vec::new();
    let push = |z: Complex64, roots: &mut Vec<Complex64>| {
        let z = Complex64::new(if z.re.abs() < 1e-14 { 0.0 } else { z.re }, if z.im.abs() < 1e-14 { 0.0 } else { z.im });
        if bx.contains(z) && !roots.iter().any(|r| (r - z).norm() <= 1e-8) {
            roots.push(z);
        }
    };
    for &s in seeds {
        for branch in [false, true] {
            match newton(s, branch) {
                Some(z) => {
                    push(z, &mut roots);
                    push(z.conj(), &mut roots);
                }
                None => dropped.push((s, format!("Newton stagnated (branch {})", if branch { 2 } else { 1 }))),
            }
        }
    }
    roots.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    Ok(RootSearch { roots, dropped })
}

/// A uniform seed lattice covering `bx`.
pub fn seed_grid(bx: RootBox, re_steps: usize, im_steps: usize) -> Vec<Complex64> {
    let mut seeds = Vec::with_capacity((re_steps + 1) * (im_steps + 1));
    for a in 0..=re_steps {
        for b in 0..=im_steps {
            let re = bx.re_min + (bx.re_max - bx.re_min) * a as f64 / re_steps as f64;
            let im = bx.im_min + (bx.im_max - bx.im_min) * b as f64 / im_steps as f64;
            seeds.push(Complex64::new(re, im));
        }
    }
    seeds
}

/// Winding number of `f` along the boundary of `bx` (counter-clockwise), with adaptive
/// subdivision so that each step changes the argument by less than π/8.
pub fn argument_principle_count(f: impl Fn(Complex64) -> Complex64, bx: RootBox) -> Result<i64> {
    let corners = [
        Complex64::new(bx.re_min, bx.im_min),
        Complex64::new(bx.re_max, bx.im_min),
        Complex64::new(bx.re_max, bx.im_max),
        Complex64::new(bx.re_min, bx.im_max),
    ];
    let mut total = 0.0;
    for k in 0..4 {
        let (a, b) = (corners[k], corners[(k + 1) % 4]);
        let mut stack = vec![(0.0f64, 1.0f64)];
        while let Some((s0, s1)) = stack.pop() {
            let (z0, z1) = (a + (b - a) * s0, a + (b - a) * s1);
            let (f0, f1) = (f(z0), f(z1));
            if f0.norm() < 1e-300 || f1.norm() < 1e-300 {
                return Err(Error::ContourHitsSpectrum(0.0));
            }
            let d = (f1 / f0).arg();
            if d.abs() < std::f64::consts::PI / 8.0 || s1 - s0 < 1e-12 {
                if s1 - s0 < 1e-12 {
                    return Err(Error::ContourHitsSpectrum(0.0));
                }
                total += d;
            } else {
                let m = 0.5 * (s0 + s1);
                // Process the left half first to keep the sum ordered.
                stack.push((m, s1));
                stack.push((s0, m));
            }
        }
    }
    Ok((total / (2.0 * std::f64::consts::PI)).round() as i64)
}
