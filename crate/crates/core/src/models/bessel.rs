//! Bessel functions of the first kind for integer order.

use crate::error::{Error, Result};

/// Largest argument accepted by [`bessel_j`].
pub const X_MAX: f64 = 200.0;

const SERIES_LIMIT: f64 = 8.0;
const RESCALE: f64 = 1e250;

fn series(k: usize, x: f64) -> f64 {
    // Σ (−1)^m (x/2)^{2m+k} / (m! (m+k)!)
    let half = 0.5 * x;
    let mut term = 1.0;
    for j in 1..=k {
        term *= half / j as f64;
    }
    let q = half * half;
    let mut sum = term;
    for m in 1..200 {
        term *= -q / (m as f64 * (m + k) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Miller backward recurrence normalized by `1 = J_0 + 2 Σ J_{2m}`; returns `J_0..=J_k`.
fn miller(k: usize, x: f64) -> Result<Vec<f64>> {
    let start = {
        let base = k.max(x.ceil() as usize);
        let m = base + 20 + (40.0 * base as f64).sqrt() as usize;
        m + (m % 2)
    };
    let mut out = vec![0.0; k + 1];
    let (mut jp1, mut j) = (0.0f64, 1e-300f64);
    let mut norm = 0.0;
    for m in (1..=start).rev() {
        let jm1 = 2.0 * m as f64 / x * j - jp1;
        jp1 = j;
        j = jm1;
        let idx = m - 1;
        if idx <= k {
            out[idx] = j;
        }
        if idx % 2 == 0 && idx > 0 {
            norm += 2.0 * j;
        }
        if j.abs() > RESCALE {
            let s = 1.0 / RESCALE;
            j *= s;
            jp1 *= s;
            norm *= s;
            for v in out.iter_mut() {
                *v *= s;
            }
        }
    }
    norm += j;
    if !norm.is_finite() || norm == 0.0 {
        return Err(Error::NumericalFailure(format!("Bessel recurrence failed at x={x}")));
    }
    Ok(out.into_iter().map(|v| v / norm).collect())
}

/// `J_k(x)` for `0 ≤ x ≤ X_MAX`.
pub fn bessel_j(k: usize, x: f64) -> Result<f64> {
    if !(0.0..=X_MAX).contains(&x) {
        return Err(Error::InvalidInput(format!("Bessel argument {x} outside [0, {X_MAX}]")));
    }
    if x == 0.0 {
        return Ok(if k == 0 { 1.0 } else { 0.0 });
    }
    if x <= SERIES_LIMIT {
        return Ok(series(k, x));
    }
    Ok(miller(k, x)?[k])
}

/// `J_k'(x)` via `J_k' = (J_{k−1} − J_{k+1})/2`, `J_0' = −J_1`.
pub fn bessel_j_prime(k: usize, x: f64) -> Result<f64> {
    if k == 0 {
        return Ok(-bessel_j(1, x)?);
    }
    Ok(0.5 * (bessel_j(k - 1, x)? - bessel_j(k + 1, x)?))
}

/// The `m`-th positive zero `j_{k,m}` by bracketing and safeguarded Newton.
pub fn bessel_zero(k: usize, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidInput("zero index starts at 1".into()));
    }
    let step = 0.05;
    let mut a = if k == 0 { step } else { k as f64 };
    let mut fa = bessel_j(k, a)?;
    let mut found = 0;
    while a + step <= X_MAX {
        let b = a + step;
        let fb = bessel_j(k, b)?;
        if fa == 0.0 || fa.signum() != fb.signum() {
            found += 1;
            if found == m {
                return refine_zero(k, a, b);
            }
        }
        a = b;
        fa = fb;
    }
    Err(Error::NumericalFailure(format!("zero {m} of J_{k} not found below {X_MAX}")))
}

fn refine_zero(k: usize, mut lo: f64, mut hi: f64) -> Result<f64> {
    let mut flo = bessel_j(k, lo)?;
    let mut x = 0.5 * (lo + hi);
    for _ in 0..100 {
        let fx = bessel_j(k, x)?;
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        let d = bessel_j_prime(k, x)?;
        let newton = x - fx / d;
        let next = if d != 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (next - x).abs() <= 1e-15 * x.max(1.0) || hi - lo <= 1e-14 * x.max(1.0) {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}
