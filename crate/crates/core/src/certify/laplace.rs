use std::collections::HashMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::json;
use crate::matrix::{expm, resolvent, CMatrix, ComplexVector, SquareOperator};
use crate::models::{ExactEvaluators, ShiftFlip};
use crate::spectral::spectrum_report;

/// Smallest admissible `Re λ − ω`.
pub const GAP_MIN: f64 = 1e-3;
/// Largest tail bound accepted before the truncation is declared too short.
pub const TAIL_LIMIT: f64 = 1e-8;
const GAUSS_NODES: usize = 16;

/// Something that can be integrated against `e^{−λt}`.
pub trait Evolution {
    fn dim(&self) -> usize;
    /// `e^{tA}f` at the given increasing times.
    fn trajectory(&self, f: &ComplexVector, times: &[f64]) -> Result<Vec<ComplexVector>>;
    fn resolvent_apply(&self, lambda: Complex64, f: &ComplexVector) -> Result<ComplexVector>;
    /// Bound on `‖∫_T^∞ e^{−λt}e^{tA}f dt‖_∞`.
    fn tail_bound(&self, lambda: Complex64, f: &ComplexVector, t_max: f64) -> Result<f64>;
    /// Times in `(0, t_max)` where the trajectory may fail to be smooth.
    fn breakpoints(&self, _t_max: f64) -> Vec<f64> {
        Vec::new()
    }
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`, by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

#[derive(Debug, Clone, Serialize)]
pub struct LaplaceCheck {
    #[serde(serialize_with = "json::complex")]
    pub lambda: Complex64,
    pub t_max: f64,
    pub panels: usize,
    pub discrepancy: f64,
    pub tail_bound: f64,
    pub quad_tol: f64,
    pub passes: bool,
}

/// Compare `R(λ, A)f` against `∫_0^T e^{−λt}e^{tA}f dt` by composite Gauss–Legendre
/// quadrature on `panels` uniform panels, further split at the evolution's breakpoints.
pub fn laplace_crosscheck(evo: &dyn Evolution, lambda: Complex64, f: &ComplexVector, t_max: f64, panels: usize) -> Result<LaplaceCheck> {
    if !(t_max > 0.0) || panels == 0 || f.dim() != evo.dim() {
        return Err(Error::InvalidInput("need T > 0, at least one panel and a vector of matching size".into()));
    }
    let tail_bound = evo.tail_bound(lambda, f, t_max)?;
    if tail_bound > TAIL_LIMIT {
        return Err(Error::TailTooLarge(tail_bound));
    }
    let mut cuts: Vec<f64> = (0..=panels).map(|k| t_max * k as f64 / panels as f64).collect();
    cuts.extend(evo.breakpoints(t_max).into_iter().filter(|&b| b > 0.0 && b < t_max));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * t_max);

    let (gx, gw) = gauss_legendre(GAUSS_NODES);
    let mut times = Vec::with_capacity((cuts.len() - 1) * GAUSS_NODES);
    let mut weights = Vec::with_capacity(times.capacity());
    for w in cuts.windows(2) {
        let (mid, half) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
        for (x, wt) in gx.iter().zip(&gw) {
            times.push(mid + half * x);
            weights.push(half * wt);
        }
    }
    let traj = evo.trajectory(f, &times)?;
    let mut acc = vec![Complex64::new(0.0, 0.0); evo.dim()];
    for ((t, wt), v) in times.iter().zip(&weights).zip(&traj) {
        let k = (-lambda * *t).exp() * *wt;
        for (a, x) in acc.iter_mut().zip(v.as_slice()) {
            *a += k * x;
        }
    }
    let exact = evo.resolvent_apply(lambda, f)?;
    let discrepancy = acc.iter().zip(exact.as_slice()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let quad_tol = 1e-10 * exact.norm_inf().max(1.0);
    Ok(LaplaceCheck { lambda, t_max, panels, discrepancy, tail_bound, quad_tol, passes: discrepancy <= quad_tol + tail_bound })
}

/// Matrix semigroup, evaluated by stepping with cached exponentials of the time increments.
pub struct MatrixEvolution<'a> {
    pub a: &'a SquareOperator,
}

impl Evolution for MatrixEvolution<'_> {
    fn dim(&self) -> usize {
        self.a.dim()
    }

    fn trajectory(&self, f: &ComplexVector, times: &[f64]) -> Result<Vec<ComplexVector>> {
        let mut cache: HashMap<u64, CMatrix> = HashMap::new();
        let mut prev = 0.0;
        let mut v = f.0.clone();
        let mut out = Vec::with_capacity(times.len());
        for &t in times {
            let dt = t - prev;
            // Panels are uniform, so increments repeat up to the last few bits.
            let key = (dt * 1e12).round() as u64;
            if let std::collections::hash_map::Entry::Vacant(e) = cache.entry(key) {
                e.insert(expm(self.a, dt)?.into_entries());
            }
            v = &cache[&key] * v;
            prev = t;
            out.push(ComplexVector(v.clone()));
        }
        Ok(out)
    }

    fn resolvent_apply(&self, lambda: Complex64, f: &ComplexVector) -> Result<ComplexVector> {
        Ok(ComplexVector(resolvent(self.a, lambda)?.entries() * &f.0))
    }

    /// Assumes `‖e^{t(A − s)}‖` stays below its largest value sampled on `[T/2, T]`,
    /// which holds once transients have died out.
    fn tail_bound(&self, lambda: Complex64, f: &ComplexVector, t_max: f64) -> Result<f64> {
        let s = spectrum_report(self.a)?.spectral_bound;
        let margin = lambda.re - s;
        if margin < GAP_MIN {
            return Err(Error::InvalidInput(format!("need Re λ − s(A) ≥ {GAP_MIN}, got {margin}")));
        }
        let shifted = self.a.shifted(Complex64::new(-s, 0.0));
        let mut bound = 0.0f64;
        for frac in [0.5, 0.75, 1.0] {
            bound = bound.max(expm(&shifted, frac * t_max)?.norm_inf());
        }
        Ok(bound * f.norm_inf() * (-margin * t_max).exp() / margin)
    }
}

impl Evolution for ShiftFlip {
    fn dim(&self) -> usize {
        ExactEvaluators::dim(self)
    }

    fn trajectory(&self, f: &ComplexVector, times: &[f64]) -> Result<Vec<ComplexVector>> {
        times.iter().map(|&t| self.semigroup_apply(t, f).expect("shift-flip has a semigroup formula")).collect()
    }

    fn resolvent_apply(&self, lambda: Complex64, f: &ComplexVector) -> Result<ComplexVector> {
        ExactEvaluators::resolvent_apply(self, lambda, f).expect("shift-flip has a resolvent formula")
    }

    /// The semigroup is a contraction and vanishes after time 2.
    fn tail_bound(&self, lambda: Complex64, f: &ComplexVector, t_max: f64) -> Result<f64> {
        if t_max >= 2.0 {
            return Ok(0.0);
        }
        let r = lambda.re;
        let len = 2.0 - t_max;
        let integral = if r.abs() < 1e-12 { len } else { ((-r * t_max).exp() - (-r * 2.0).exp()) / r };
        Ok(f.norm_inf() * integral)
    }

    fn breakpoints(&self, t_max: f64) -> Vec<f64> {
        (1..).map(|k| k as f64 * self.h).take_while(|&t| t < t_max.min(2.0) + 1e-12).collect()
    }
}
