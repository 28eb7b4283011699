use num_complex::Complex64;
use serde::Serialize;

use super::projection::PROJ_TOL;
use crate::error::Result;
use crate::json;
use crate::matrix::{eig, singular_tol, EigenSystem, SquareOperator};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterInfo {
    #[serde(serialize_with = "json::complex")]
    pub value: Complex64,
    pub alg_mult: usize,
    pub geo_mult: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TolProfile {
    pub cluster_tol: f64,
    pub rank_tol: f64,
    pub strip_tol: f64,
    pub proj_tol: f64,
    pub singular_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub dim: usize,
    pub clusters: Vec<ClusterInfo>,
    pub spectral_bound: f64,
    pub peripheral: Vec<ClusterInfo>,
    pub dominant: bool,
    /// `s(A)` minus the largest real part off the peripheral strip; absent when nothing is off it.
    pub dominance_gap: Option<f64>,
    pub tol_profile: TolProfile,
}

impl SpectrumReport {
    /// The dominant cluster value, when the spectrum is dominated by a real eigenvalue.
    pub fn dominant_value(&self) -> Option<Complex64> {
        self.dominant.then(|| self.peripheral[0].value)
    }
}

/// Half-width of the peripheral strip: relative to `|s(A)|`, widened by a round-off term
/// in `‖A‖` so that eigenvalues small compared with the norm stay separable.
pub fn strip_width(spectral_bound: f64, norm: f64) -> f64 {
    1e-6 * spectral_bound.abs().max(1.0) + 1e-12 * norm
}

pub fn spectrum_report(a: &SquareOperator) -> Result<SpectrumReport> {
    let es = eig(a)?;
    Ok(spectrum_report_from(a, &es))
}

pub fn spectrum_report_from(a: &SquareOperator, es: &EigenSystem) -> SpectrumReport {
    let clusters: Vec<ClusterInfo> = es
        .clusters
        .iter()
        .map(|c| ClusterInfo { value: c.value, alg_mult: c.alg_mult, geo_mult: c.geo_mult })
        .collect();
    let spectral_bound = clusters.iter().map(|c| c.value.re).fold(f64::NEG_INFINITY, f64::max);
    let strip_tol = strip_width(spectral_bound, es.norm);
    let (peripheral, rest): (Vec<ClusterInfo>, Vec<ClusterInfo>) =
        clusters.iter().cloned().partition(|c| (c.value.re - spectral_bound).abs() <= strip_tol);
    let dominant = peripheral.len() == 1 && peripheral[0].value.im.abs() <= strip_tol;
    let dominance_gap = rest
        .iter()
        .map(|c| c.value.re)
        .reduce(f64::max)
        .map(|next| spectral_bound - next);
    SpectrumReport {
        dim: a.dim(),
        clusters,
        spectral_bound,
        peripheral,
        dominant,
        dominance_gap,
        tol_profile: TolProfile {
            cluster_tol: es.cluster_tol,
            rank_tol: es.rank_tol,
            strip_tol,
            proj_tol: PROJ_TOL,
            singular_tol: singular_tol(a),
        },
    }
}
