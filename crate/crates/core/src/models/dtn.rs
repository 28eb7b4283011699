//! Dirichlet-to-Neumann operator of the Helmholtz equation on the unit disc, truncated to
//! Fourier modes `0..=K`, and the Fejér-kernel experiment.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::bessel::{bessel_j, bessel_j_prime, bessel_zero};
use crate::error::{Error, Result};
use crate::matrix::SquareOperator;

/// `|J_k(√λ)|` below this counts as a Dirichlet eigenvalue.
pub const BESSEL_ZERO_TOL: f64 = 1e-10;

/// Mode coefficients of the Fejér-type initial datum `2 + 3cos θ + 2cos 2θ + cos 3θ`.
pub const FEJER: [f64; 4] = [2.0, 3.0, 2.0, 1.0];

#[derive(Debug, Clone)]
pub struct DtnModel {
    pub lambda: f64,
    pub modes: usize,
    pub m_grid: usize,
    /// `μ_k(λ) = √λ J_k'(√λ)/J_k(√λ)` for `k = 0..=K`.
    pub mu: Vec<f64>,
}

/// The Dirichlet eigenvalue `j_{k,m}²` nearest below/above is reported on a hit.
fn dirichlet_hit(lambda: f64, k: usize) -> Error {
    let r = lambda.sqrt();
    let nearest = (1..=64)
        .filter_map(|m| bessel_zero(k, m).ok())
        .min_by(|a, b| (a - r).abs().total_cmp(&(b - r).abs()))
        .map_or(lambda, |z| z * z);
    Error::SpectralValueHit { nearest: Complex64::new(nearest, 0.0), mode: Some(k) }
}

pub fn dtn_eigenvalue(lambda: f64, k: usize) -> Result<f64> {
    let r = lambda.sqrt();
    let j = bessel_j(k, r)?;
    if j.abs() < BESSEL_ZERO_TOL {
        return Err(dirichlet_hit(lambda, k));
    }
    Ok(r * bessel_j_prime(k, r)? / j)
}

pub fn build_dtn(lambda: f64, modes: usize, m_grid: usize) -> Result<DtnModel> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameters(format!("lambda must be positive, got {lambda}")));
    }
    if modes < 3 {
        return Err(Error::InvalidParameters(format!("need at least modes 0..3, got K={modes}")));
    }
    if m_grid < 2 * modes + 1 {
        return Err(Error::InvalidParameters(format!("grid of {m_grid} points cannot resolve {modes} modes")));
    }
    let mu = (0..=modes).map(|k| dtn_eigenvalue(lambda, k)).collect::<Result<Vec<_>>>()?;
    Ok(DtnModel { lambda, modes, m_grid, mu })
}

impl DtnModel {
    /// `−2μ₀ + 3μ₁ − 2μ₂ + μ₃`, the time derivative of the Fejér trajectory at θ = π.
    pub fn derivative_at_pi(&self) -> f64 {
        -2.0 * self.mu[0] + 3.0 * self.mu[1] - 2.0 * self.mu[2] + self.mu[3]
    }

    /// `μ_0` minus the smallest other `μ_k`; positive when `−μ_0` dominates.
    pub fn dominance_gap(&self) -> f64 {
        self.mu[1..].iter().copied().fold(f64::INFINITY, f64::min) - self.mu[0]
    }

    /// Generator in the real Fourier basis `(1, cos θ, sin θ, ..., cos Kθ, sin Kθ)`.
    pub fn mode_operator(&self) -> Result<SquareOperator> {
        let d = 2 * self.modes + 1;
        let mut a = DMatrix::zeros(d, d);
        a[(0, 0)] = -self.mu[0];
        for k in 1..=self.modes {
            a[(2 * k - 1, 2 * k - 1)] = -self.mu[k];
            a[(2 * k, 2 * k)] = -self.mu[k];
        }
        SquareOperator::from_real(a)
    }

    /// The same generator collocated on `2K+1` equispaced angles (a symmetric circulant).
    pub fn grid_operator(&self) -> Result<SquareOperator> {
        let d = 2 * self.modes + 1;
        let theta = |i: usize| 2.0 * PI * i as f64 / d as f64;
        let a = DMatrix::from_fn(d, d, |i, j| {
            let diff = theta(i) - theta(j);
            let mut v = -self.mu[0];
            for k in 1..=self.modes {
                v -= 2.0 * self.mu[k] * (k as f64 * diff).cos();
            }
            v / d as f64
        });
        SquareOperator::from_real(a)
    }

    /// Angles `θ_j = 2πj/m` of the synthesis grid.
    pub fn theta_grid(&self) -> Vec<f64> {
        (0..self.m_grid).map(|j| 2.0 * PI * j as f64 / self.m_grid as f64).collect()
    }

    /// Synthesizes a cosine series `Σ c_k cos kθ` on the grid.
    pub fn synthesize(&self, coeffs: &[f64]) -> Vec<f64> {
        self.theta_grid()
            .iter()
            .map(|&th| coeffs.iter().enumerate().map(|(k, c)| c * (k as f64 * th).cos()).sum())
            .collect()
    }

    /// Mode coefficients of `e^{−t(D_λ − μ_0)} u₀`, i.e. the Fejér trajectory rescaled by `e^{tμ_0}`.
    pub fn fejer_coefficients(&self, t: f64) -> Vec<f64> {
        FEJER.iter().enumerate().map(|(k, c)| c * (-t * (self.mu[k] - self.mu[0])).exp()).collect()
    }

    /// The mean-value projection `Pφ = (1/2π)∫φ dθ · 𝟙` on grid samples.
    pub fn mean_projection(&self, samples: &[f64]) -> Vec<f64> {
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        vec![mean; samples.len()]
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FejerResult {
    pub lambda: f64,
    /// `(t, min over θ)` of the trajectory rescaled by `e^{tμ_0}`.
    pub min_trace: Vec<(f64, f64)>,
    pub first_nonneg_t: Option<f64>,
    /// Minimum stays above `−zero_tol` at every sampled time, including t = 0.
    pub positive: bool,
}

/// Default experiment times: 0 followed by 400 log-spaced points in [1e−4, 10].
pub fn default_fejer_times() -> Vec<f64> {
    let mut t = vec![0.0];
    let (a, b, k) = (1e-4f64.ln(), 10f64.ln(), 400);
    t.extend((0..k).map(|i| (a + (b - a) * i as f64 / (k - 1) as f64).exp()));
    t
}

/// Evolves the Fejér datum and records the minimum over the θ-grid; `zero_tol` is relative to
/// the sup of the sampled trajectory.
pub fn dtn_fejer_experiment(model: &DtnModel, t_grid: &[f64], zero_tol: f64) -> Result<FejerResult> {
    if t_grid.is_empty() || t_grid.windows(2).any(|w| !(w[1] > w[0])) || t_grid[0] < 0.0 {
        return Err(Error::InvalidGrid("time grid must be non-empty, non-negative and increasing".into()));
    }
    let mut min_trace = Vec::with_capacity(t_grid.len());
    let mut nonneg = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let u = model.synthesize(&model.fejer_coefficients(t));
        let lo = u.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        min_trace.push((t, lo));
        nonneg.push(lo >= -zero_tol * hi);
    }
    let first_nonneg_t = match nonneg.iter().rposition(|ok| !ok) {
        None => Some(t_grid[0]),
        Some(last_bad) if last_bad + 1 < t_grid.len() => Some(t_grid[last_bad + 1]),
        Some(_) => None,
    };
    Ok(FejerResult { lambda: model.lambda, min_trace, first_nonneg_t, positive: nonneg.iter().all(|&b| b) })
}

/// The window `(λ₃, λ₄) = (j_{2,1}², j_{0,2}²)` between consecutive Dirichlet eigenvalues.
pub fn dirichlet_window() -> Result<(f64, f64)> {
    Ok((bessel_zero(2, 1)?.powi(2), bessel_zero(0, 2)?.powi(2)))
}

/// One row of a λ sweep; spectral-value hits leave the numeric fields empty.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub mu: Option<[f64; 4]>,
    pub dominance_gap: Option<f64>,
    pub derivative_at_pi: Option<f64>,
    pub first_nonneg_t: Option<f64>,
    pub positivity_flag: Option<bool>,
    pub status: String,
}

pub fn dtn_sweep_row(lambda: f64, modes: usize, m_grid: usize, times: &[f64], zero_tol: f64) -> Result<SweepRow> {
    let model = match build_dtn(lambda, modes, m_grid) {
        Ok(m) => m,
        Err(Error::SpectralValueHit { nearest, mode }) => {
            return Ok(SweepRow {
                lambda,
                mu: None,
                dominance_gap: None,
                derivative_at_pi: None,
                first_nonneg_t: None,
                positivity_flag: None,
                status: format!("SpectralValueHit(k={}, nearest={})", mode.unwrap_or(0), nearest.re),
            })
        }
        Err(e) => return Err(e),
    };
    let fe = dtn_fejer_experiment(&model, times, zero_tol)?;
    Ok(SweepRow {
        lambda,
        mu: Some([model.mu[0], model.mu[1], model.mu[2], model.mu[3]]),
        dominance_gap: Some(model.dominance_gap()),
        derivative_at_pi: Some(model.derivative_at_pi()),
        first_nonneg_t: fe.first_nonneg_t,
        positivity_flag: Some(fe.positive),
        status: "ok".into(),
    })
}

/// Adjacent rows (sorted by λ) where the positivity flag turns on while the trajectory
/// stays eventually nonnegative on both sides; the last such flip is reported.
pub fn lambda_star_bracket(rows: &[SweepRow]) -> Option<(f64, f64)> {
    rows.windows(2)
        .filter(|w| {
            w[0].positivity_flag == Some(false)
                && w[1].positivity_flag == Some(true)
                && w[0].first_nonneg_t.is_some()
                && w[1].first_nonneg_t.is_some()
        })
        .map(|w| (w[0].lambda, w[1].lambda))
        .next_back()
}
