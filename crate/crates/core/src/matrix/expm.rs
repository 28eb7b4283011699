//! Matrix exponential by scaling and squaring with diagonal Padé approximants.

use nalgebra::{ComplexField, DMatrix};

use super::operator::{to_complex, SquareOperator};
use crate::error::{Error, Result};

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

// 1-norm thresholds below which the degree-m approximant is accurate to unit roundoff.
const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539_398_330_063_23e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068),
];
const THETA13: f64 = 5.371920351148152;

fn norm1<T: ComplexField<RealField = f64> + Copy>(a: &DMatrix<T>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|z| z.modulus()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn scal<T: ComplexField<RealField = f64> + Copy>(x: f64) -> T {
    T::from_real(x)
}

fn pade_low<T: ComplexField<RealField = f64> + Copy>(a: &DMatrix<T>, b: &[f64]) -> (DMatrix<T>, DMatrix<T>) {
    let n = a.nrows();
    let id = DMatrix::<T>::identity(n, n);
    let a2 = a * a;
    // Even powers I, A², A⁴, ...
    let mut pows = vec![id.clone()];
    for _ in 1..b.len() / 2 {
        let next = pows.last().unwrap() * &a2;
        pows.push(next);
    }
    let mut u_inner = DMatrix::<T>::zeros(n, n);
    let mut v = DMatrix::<T>::zeros(n, n);
    for (k, p) in pows.iter().enumerate() {
        v += p * scal::<T>(b[2 * k]);
        u_inner += p * scal::<T>(b[2 * k + 1]);
    }
    (a * u_inner, v)
}

fn pade13<T: ComplexField<RealField = f64> + Copy>(a: &DMatrix<T>) -> (DMatrix<T>, DMatrix<T>) {
    let n = a.nrows();
    let id = DMatrix::<T>::identity(n, n);
    let b = |k: usize| scal::<T>(B13[k]);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u1 = &a6 * (&a6 * b(13) + &a4 * b(11) + &a2 * b(9));
    let u = a * (u1 + &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &id * b(1));
    let v1 = &a6 * (&a6 * b(12) + &a4 * b(10) + &a2 * b(8));
    let v = v1 + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &id * b(0);
    (u, v)
}

fn solve_pade<T: ComplexField<RealField = f64> + Copy>(u: DMatrix<T>, v: DMatrix<T>) -> Result<DMatrix<T>> {
    let den = &v - &u;
    let num = v + u;
    den.lu()
        .solve(&num)
        .ok_or_else(|| Error::NumericalFailure("singular Padé denominator".into()))
}

/// `e^{A}` for a dense matrix over `f64` or `Complex64`.
pub fn expm_dense<T: ComplexField<RealField = f64> + Copy>(a: &DMatrix<T>) -> Result<DMatrix<T>> {
    if a.iter().any(|z| !z.modulus().is_finite()) {
        return Err(Error::InvalidInput("non-finite entries in expm argument".into()));
    }
    let n = a.nrows();
    let nrm = norm1(a);
    if nrm == 0.0 {
        return Ok(DMatrix::identity(n, n));
    }
    for &(m, theta) in &THETA {
        if nrm <= theta {
            let b: &[f64] = match m {
                3 => &B3,
                5 => &B5,
                7 => &B7,
                _ => &B9,
            };
            let (u, v) = pade_low(a, b);
            return solve_pade(u, v);
        }
    }
    let s = (nrm / THETA13).log2().ceil().max(0.0) as i32;
    let scaled = a * scal::<T>(0.5f64.powi(s));
    let (u, v) = pade13(&scaled);
    let mut x = solve_pade(u, v)?;
    for _ in 0..s {
        x = &x * &x;
    }
    Ok(x)
}

/// `e^{tA}` for real `A` without leaving real arithmetic.
pub fn expm_real(a: &DMatrix<f64>, t: f64) -> Result<DMatrix<f64>> {
    check_time(t)?;
    expm_dense(&(a * t))
}

/// `e^{tA}`; real inputs give real outputs.
pub fn expm(a: &SquareOperator, t: f64) -> Result<SquareOperator> {
    check_time(t)?;
    if a.is_real() {
        let e = expm_dense(&(a.real_part() * t))?;
        SquareOperator::new(to_complex(&e))
    } else {
        let scaled = a.entries() * num_complex::Complex64::new(t, 0.0);
        SquareOperator::new(expm_dense(&scaled)?)
    }
}

fn check_time(t: f64) -> Result<()> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidInput(format!("time {t} must be finite and >= 0")));
    }
    Ok(())
}
