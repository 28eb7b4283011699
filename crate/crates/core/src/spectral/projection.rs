use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::json;
use crate::matrix::{eig, norm_inf, resolvent, svd_ascending, CMatrix, EigenSystem, SquareOperator};

/// Relative tolerance for projection residuals and pole-order decisions.
pub const PROJ_TOL: f64 = 1e-8;

const BIORTHO_MIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectionResiduals {
    pub idempotency: f64,
    pub commutation: f64,
    pub nilpotent_norm: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralProjectionResult {
    #[serde(serialize_with = "json::complex")]
    pub eigenvalue: Complex64,
    #[serde(rename = "P", serialize_with = "json::operator")]
    pub p: SquareOperator,
    pub pole_order: usize,
    pub alg_mult: usize,
    pub geo_mult: usize,
    pub rank: usize,
    pub residuals: ProjectionResiduals,
}

fn shifted_neg(a: &CMatrix, z: Complex64) -> CMatrix {
    // z I − A
    let mut m = -a.clone();
    for i in 0..m.nrows() {
        m[(i, i)] += z;
    }
    m
}

fn numerical_rank(m: &CMatrix, rel: f64) -> Result<usize> {
    let sv = svd_ascending(m)?;
    let top = sv.last().map_or(0.0, |t| t.0);
    Ok(sv.iter().filter(|t| t.0 > rel * top.max(f64::MIN_POSITIVE)).count())
}

pub fn spectral_projection(a: &SquareOperator, lambda0: Complex64) -> Result<SpectralProjectionResult> {
    let es = eig(a)?;
    spectral_projection_with(a, &es, lambda0)
}

/// Spectral projection using a precomputed eigensystem of `a`.
pub fn spectral_projection_with(a: &SquareOperator, es: &EigenSystem, lambda0: Complex64) -> Result<SpectralProjectionResult> {
    let cluster = es
        .cluster_near(lambda0)
        .ok_or_else(|| Error::NotAnEigenvalue(lambda0, es.nearest_eigenvalue(lambda0)))?
        .clone();
    let m = a.entries();
    let n = a.dim();
    let k = cluster.alg_mult;
    let value = cluster.value;
    let shifted = shifted_neg(m, value);
    let norm = es.norm;

    let p = if k == 1 {
        let i = cluster.members[0];
        let u = &es.right_vectors[i].0;
        let v = &es.left_vectors[i].0;
        let vu = v.dotc(u);
        if vu.norm() < BIORTHO_MIN * u.norm() * v.norm() {
            return Err(Error::NumericalFailure(format!("left/right eigenvectors at {value} are nearly orthogonal")));
        }
        (u * v.adjoint()) / vu
    } else {
        // Generalized eigenspace: kernel of (λ0 I − A)^j for the smallest j showing k small singular values.
        let mut power = shifted.clone();
        let mut basis = None;
        for j in 1..=k {
            if j > 1 {
                power = &power * &shifted;
            }
            let sv = svd_ascending(&power)?;
            let tol = PROJ_TOL * norm.powi(j as i32);
            if sv[k - 1].0 <= tol || j == k {
                basis = Some(sv);
                break;
            }
        }
        let sv = basis.expect("loop always assigns on the last step");
        let x = CMatrix::from_columns(&sv[..k].iter().map(|t| t.2.clone()).collect::<Vec<_>>());
        let y = CMatrix::from_columns(&sv[..k].iter().map(|t| t.1.clone()).collect::<Vec<_>>());
        let g = y.adjoint() * &x;
        let sg = svd_ascending(&g)?;
        if sg[0].0 < BIORTHO_MIN.sqrt() * sg[k - 1].0 {
            return Err(Error::NumericalFailure(format!("ill-conditioned bi-orthogonalization at {value}")));
        }
        let ginv = g.lu().try_inverse().ok_or_else(|| Error::NumericalFailure("singular Gram matrix".into()))?;
        &x * ginv * y.adjoint()
    };
    let p = if a.is_real() && value.im == 0.0 { p.map(|z| Complex64::new(z.re, 0.0)) } else { p };

    // Pole order: smallest j with ‖U^j‖ ≤ proj_tol ‖A‖^j, U = −(λ0 I − A) P.
    let u = -(&shifted * &p);
    let mut upow = u.clone();
    let mut pole_order = k;
    for j in 1..=k {
        if j > 1 {
            upow = &upow * &u;
        }
        if norm_inf(&upow) <= PROJ_TOL * norm.powi(j as i32) {
            pole_order = j;
            break;
        }
    }
    let mut nil = p.clone();
    for _ in 0..pole_order {
        nil = &shifted * nil;
    }
    let residuals = ProjectionResiduals {
        idempotency: norm_inf(&(&p * &p - &p)),
        commutation: norm_inf(&(m * &p - &p * m)),
        nilpotent_norm: norm_inf(&nil),
    };
    let rank = numerical_rank(&p, 1e-8)?;
    debug_assert!(n >= rank);
    Ok(SpectralProjectionResult {
        eigenvalue: value,
        p: SquareOperator::new(p)?,
        pole_order,
        alg_mult: k,
        geo_mult: cluster.geo_mult,
        rank,
        residuals,
    })
}

/// `(2πi)^{-1} ∮ R(z, A) dz` over the circle `|z − λ0| = radius` by the trapezoid rule,
/// doubling `nodes` until two successive results agree to `1e−9`.
pub fn contour_projection(a: &SquareOperator, lambda0: Complex64, radius: f64, nodes: usize) -> Result<SquareOperator> {
    if !(radius > 0.0) || nodes < 4 {
        return Err(Error::InvalidInput("contour needs radius > 0 and at least 4 nodes".into()));
    }
    let vals = crate::matrix::eigenvalues(a)?;
    let clearance = vals.iter().map(|&z| ((z - lambda0).norm() - radius).abs()).fold(f64::INFINITY, f64::min);
    if clearance <= 1e-6 * radius.max(1.0) {
        return Err(Error::ContourHitsSpectrum(clearance));
    }
    let real_out = a.is_real() && lambda0.im == 0.0;
    let quad = |count: usize| -> Result<CMatrix> {
        let n = a.dim();
        let mut acc = CMatrix::zeros(n, n);
        for j in 0..count {
            let theta = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / count as f64;
            let w = Complex64::from_polar(radius, theta);
            let r = resolvent(a, lambda0 + w)?;
            acc += r.entries() * w;
        }
        acc /= Complex64::new(count as f64, 0.0);
        Ok(if real_out { acc.map(|z| Complex64::new(z.re, 0.0)) } else { acc })
    };
    let mut count = nodes;
    let mut prev = quad(count)?;
    loop {
        count *= 2;
        let next = quad(count)?;
        if norm_inf(&(&next - &prev)) <= 1e-9 || count >= 1 << 16 {
            return SquareOperator::new(next);
        }
        prev = next;
    }
}

/// `(alg, geo, simple_pole)` for the cluster at `lambda0`.
pub fn multiplicity(a: &SquareOperator, lambda0: Complex64) -> Result<(usize, usize, bool)> {
    let r = spectral_projection(a, lambda0)?;
    Ok((r.alg_mult, r.geo_mult, r.pole_order == 1))
}
