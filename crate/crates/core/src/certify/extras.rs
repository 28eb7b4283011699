use nalgebra::DMatrix;
use serde::Serialize;

use super::cone::{classify_matrix, ConeClass, ConeMargins};
use super::semigroup::{certify_matrix_semigroup, confirm_witness, log_grid, CertifyOptions, PositivityCertificate, TrajectoryWitness, Verdict};
use crate::error::{Error, Result};
use crate::matrix::{eigenvalues, expm_real, norm_inf_real, resolvent_real, SquareOperator};

/// For a 2×2 generator certified eventually positive, check that `e^{tA}` is already
/// entrywise nonnegative at every sampled time. Vacuously true otherwise.
pub fn dim2_no_gap_check(a: &SquareOperator, t_grid: &[f64], m: &ConeMargins) -> Result<bool> {
    if a.dim() != 2 {
        return Err(Error::InvalidInput(format!("expected a 2×2 matrix, got {}×{}", a.dim(), a.dim())));
    }
    let cert = certify_matrix_semigroup(a, m, &CertifyOptions::default())?;
    let eventually_positive = matches!(
        cert.verdict,
        Verdict::Positive | Verdict::EventuallyStronglyPositive | Verdict::EventuallyPositive
    );
    if !eventually_positive {
        return Ok(true);
    }
    let ar = a.real_part();
    for &t in t_grid {
        if !classify_matrix(&expm_real(&ar, t)?, m).is_positive() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Serialize)]
pub struct SquareGeneratorCertificate {
    /// `R(0, B) = (−B)^{−1} ≫ 0`.
    pub premise_resolvent_strong: bool,
    pub resolvent_b_min_entry: f64,
    /// `R(0, A) = R(0, B)² ≫ 0` for `A = −B²`.
    pub resolvent_a_strong: bool,
    /// `‖R(0, A) − R(0, B)²‖_∞`.
    pub resolvent_square_residual: f64,
    /// Smallest sampled time at which `e^{tA}` has an entry outside the cone.
    pub early_negativity: Option<TrajectoryWitness>,
    pub certificate: PositivityCertificate,
}

/// Certify `A = −B²` for `B` with spectrum in `(−∞, 0)`.
pub fn square_generator_certify(b: &SquareOperator, m: &ConeMargins) -> Result<SquareGeneratorCertificate> {
    if !b.is_real() {
        return Err(Error::InvalidInput("B must be real".into()));
    }
    let norm = b.norm_inf().max(f64::MIN_POSITIVE);
    let spec = eigenvalues(b)?;
    if let Some(bad) = spec.iter().find(|z| z.im.abs() > 1e-8 * norm || z.re >= -1e-12 * norm) {
        return Err(Error::PreconditionFailed(format!("σ(B) is not inside (−∞, 0): found {bad}")));
    }
    let br = b.real_part();
    let r0b = resolvent_real(&br, 0.0)?;
    let a_real = -(&br * &br);
    let a = SquareOperator::from_real(a_real.clone())?;
    let r0a = resolvent_real(&a_real, 0.0)?;
    let residual = norm_inf_real(&(&r0a - &r0b * &r0b));

    let certificate = certify_matrix_semigroup(&a, m, &CertifyOptions::default())?;
    // Negativity of e^{tA} can start on the time scale 1/‖A‖.
    let early = log_grid(1e-3 / a.norm_inf().max(1e-300), 1e-3, 40);
    let early_negativity = first_negative_time(&a_real, &early, m)?.or_else(|| certificate.witnesses.transient.clone());

    Ok(SquareGeneratorCertificate {
        premise_resolvent_strong: classify_matrix(&r0b, m).is_strong(),
        resolvent_b_min_entry: r0b.min(),
        resolvent_a_strong: classify_matrix(&r0a, m).is_strong(),
        resolvent_square_residual: residual,
        early_negativity,
        certificate,
    })
}

/// First time on `grid` at which `e^{tA}` leaves the cone, confirmed column by column.
pub fn first_negative_time(a: &DMatrix<f64>, grid: &[f64], m: &ConeMargins) -> Result<Option<TrajectoryWitness>> {
    for &t in grid {
        let e = expm_real(a, t)?;
        if classify_matrix(&e, m) != ConeClass::NotPositive {
            continue;
        }
        let (j, _) = e
            .column_iter()
            .enumerate()
            .map(|(j, c)| (j, c.min()))
            .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
        if let Some(w) = confirm_witness(a, 0.0, t, j, m)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}
