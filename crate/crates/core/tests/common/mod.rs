//! Random generator families shared by the integration suites.

#![allow(dead_code)]

use evpos::matrix::{eigenvalues, SquareOperator};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

/// `A = V diag(s, C) V^{-1}` with `V = [u | Y]`, where the columns of `Y` span `ker vᵀ`
/// and `vᵀu = 1`. Hence `s` is a simple eigenvalue with right vector `u`, left vector `v`,
/// and every eigenvalue of `C` has real part at most `s − gap`.
pub fn constructed(u: &DVector<f64>, v: &DVector<f64>, s: f64, c: &DMatrix<f64>) -> DMatrix<f64> {
    let n = u.len();
    assert!((v.dot(u) - 1.0).abs() < 1e-12);
    let mut vm = DMatrix::zeros(n, n);
    vm.set_column(0, u);
    for j in 0..n - 1 {
        // e_j − (v_j / v_{n−1}) e_{n−1} is orthogonal to v.
        vm[(j, j + 1)] = 1.0;
        vm[(n - 1, j + 1)] = -v[j] / v[n - 1];
    }
    let mut d = DMatrix::zeros(n, n);
    d[(0, 0)] = s;
    d.view_mut((1, 1), (n - 1, n - 1)).copy_from(c);
    let inv = vm.clone().try_inverse().expect("V is invertible when vᵀu ≠ 0");
    &vm * d * inv
}

fn max_real_eigenvalue(m: &DMatrix<f64>) -> f64 {
    let op = SquareOperator::from_real(m.clone()).unwrap();
    eigenvalues(&op).unwrap().iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
}

/// Random `C` of size `k` with spectral bound exactly `s − gap`.
pub fn complement_block<R: Rng>(rng: &mut R, k: usize, s: f64, gap: f64) -> DMatrix<f64> {
    let m = DMatrix::from_fn(k, k, |_, _| rng.gen_range(-1.0..1.0));
    let shift = max_real_eigenvalue(&m) - (s - gap);
    m - DMatrix::identity(k, k) * shift
}

/// A constructed generator of dimension `n`. With `strong = true` both eigenvectors are
/// strongly positive; otherwise one entry of `u` is negative.
pub fn random_constructed<R: Rng>(rng: &mut R, n: usize, strong: bool) -> DMatrix<f64> {
    loop {
        let mut u = DVector::from_fn(n, |_, _| rng.gen_range(0.5..1.5));
        let v = DVector::from_fn(n, |_, _| rng.gen_range(0.5..1.5));
        if !strong {
            let i = rng.gen_range(0..n);
            u[i] = -rng.gen_range(0.3..1.0);
        }
        let dot = v.dot(&u);
        if dot < 0.2 {
            continue;
        }
        let v = v / dot;
        let s = rng.gen_range(-1.0..1.0);
        let gap = rng.gen_range(0.3..1.5);
        let c = complement_block(rng, n - 1, s, gap);
        return constructed(&u, &v, s, &c);
    }
}

/// `A = sP + λ₂(I − P)` on R² with `P = uvᵀ`, `u, v ≫ 0`, `vᵀu = 1` and `λ₂ < s`.
pub fn random_dim2<R: Rng>(rng: &mut R) -> DMatrix<f64> {
    let u = DVector::from_fn(2, |_, _| rng.gen_range(0.2..2.0));
    let v = DVector::from_fn(2, |_, _| rng.gen_range(0.2..2.0));
    let v = &v / v.dot(&u);
    let p = &u * v.transpose();
    let s = rng.gen_range(-1.0..0.5);
    let l2 = s - rng.gen_range(0.1..3.0);
    &p * s + (DMatrix::identity(2, 2) - &p) * l2
}

pub fn op(m: &DMatrix<f64>) -> SquareOperator {
    SquareOperator::from_real(m.clone()).unwrap()
}

pub fn op_rows(rows: &[Vec<f64>]) -> SquareOperator {
    SquareOperator::from_rows(rows).unwrap()
}
