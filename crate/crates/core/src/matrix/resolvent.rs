use nalgebra::DMatrix;
use num_complex::Complex64;

use super::eigen::{eigenvalues, nearest};
use super::operator::{norm_inf, norm_inf_real, CMatrix, SquareOperator};
use crate::error::{Error, Result};

/// Condition number beyond which `λI − A` is treated as singular.
const COND_LIMIT: f64 = 1e14;

/// Distance to the spectrum below which a resolvent request is refused: `1e−10·‖A‖`.
pub fn singular_tol(a: &SquareOperator) -> f64 {
    let n = a.norm_inf();
    1e-10 * if n > 0.0 { n } else { 1.0 }
}

fn spectral_hit(a: &SquareOperator, lambda: Complex64) -> Error {
    let nearest = eigenvalues(a).map(|v| nearest(&v, lambda)).unwrap_or(lambda);
    Error::SpectralValueHit { nearest, mode: None }
}

fn finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// `R(λ, A) = (λI − A)^{−1}`.
pub fn resolvent(a: &SquareOperator, lambda: Complex64) -> Result<SquareOperator> {
    if !lambda.re.is_finite() || !lambda.im.is_finite() {
        return Err(Error::InvalidInput("non-finite resolvent parameter".into()));
    }
    let n = a.dim();
    let tol = singular_tol(a);
    let x = if a.is_real() && lambda.im == 0.0 {
        let mut m = -a.real_part();
        for i in 0..n {
            m[(i, i)] += lambda.re;
        }
        let mn = norm_inf_real(&m);
        let x = m.lu().try_inverse().ok_or_else(|| spectral_hit(a, lambda))?;
        let xn = norm_inf_real(&x);
        if !xn.is_finite() || xn * mn > COND_LIMIT || (xn * tol >= 1.0 && near_spectrum(a, lambda, tol)) {
            return Err(spectral_hit(a, lambda));
        }
        x.map(|v| Complex64::new(v, 0.0))
    } else {
        let mut m = -a.entries().clone();
        for i in 0..n {
            m[(i, i)] += lambda;
        }
        let mn = norm_inf(&m);
        let x = m.lu().try_inverse().ok_or_else(|| spectral_hit(a, lambda))?;
        let xn = norm_inf(&x);
        if !finite(&x) || xn * mn > COND_LIMIT || (xn * tol >= 1.0 && near_spectrum(a, lambda, tol)) {
            return Err(spectral_hit(a, lambda));
        }
        x
    };
    SquareOperator::new(x)
}

fn near_spectrum(a: &SquareOperator, lambda: Complex64, tol: f64) -> bool {
    match eigenvalues(a) {
        Ok(v) => (nearest(&v, lambda) - lambda).norm() <= tol,
        Err(_) => true,
    }
}

/// Real resolvent for real `A` and real `λ`, with the same spectral guard.
pub fn resolvent_real(a: &DMatrix<f64>, lambda: f64) -> Result<DMatrix<f64>> {
    let op = SquareOperator::from_real(a.clone())?;
    let r = resolvent(&op, Complex64::new(lambda, 0.0))?;
    Ok(r.real_part())
}

#[derive(Debug, Clone)]
pub struct NeumannResult {
    pub value: SquareOperator,
    /// Estimated contraction factor `|μ0 − μ| · ρ(R(μ0, A))` (Gelfand-type estimate).
    pub contraction: f64,
    /// Geometric estimate of the truncation error.
    pub tail_bound: f64,
}

/// `Σ_{k=0}^{K} (μ0 − μ)^k R(μ0, A)^{k+1}`, the resolvent continued from `μ0` to `μ`.
pub fn neumann_resolvent(a: &SquareOperator, mu0: Complex64, mu: Complex64, k_max: usize) -> Result<NeumannResult> {
    let r0 = resolvent(a, mu0)?;
    let delta = mu0 - mu;
    if delta == Complex64::new(0.0, 0.0) {
        return Ok(NeumannResult { value: r0, contraction: 0.0, tail_bound: 0.0 });
    }
    // min_k ‖R0^k‖^{1/k} over k = 1, 2, 4, ..., 64 bounds the spectral radius from above.
    let mut radius = r0.norm_inf();
    let mut pow = r0.entries().clone();
    let mut k = 1usize;
    while k < 64 {
        pow = &pow * &pow;
        k *= 2;
        radius = radius.min(norm_inf(&pow).powf(1.0 / k as f64));
    }
    let q = delta.norm() * radius;
    if q >= 1.0 || !q.is_finite() {
        return Err(Error::SeriesDiverges(q));
    }
    let step = r0.entries() * delta;
    let mut term = r0.entries().clone();
    let mut sum = term.clone();
    for _ in 0..k_max {
        term = &step * &term;
        sum += &term;
    }
    let tail_bound = norm_inf(&term) * q / (1.0 - q);
    Ok(NeumannResult { value: SquareOperator::new(sum)?, contraction: q, tail_bound })
}
