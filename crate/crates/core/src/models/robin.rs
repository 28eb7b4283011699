//! Finite-difference Laplacian on (0, 1) with Robin closure `u' = βu` at 0 and `u' = −βu` at 1.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matrix::SquareOperator;

#[derive(Debug, Clone)]
pub struct RobinSquared {
    pub n: usize,
    pub beta: f64,
    pub h: f64,
    /// The second-difference matrix `B`.
    pub b: SquareOperator,
    /// `A = −B²`.
    pub a: SquareOperator,
}

/// Second-difference matrix on `n` interior nodes, `h = 1/(n+1)`; the boundary values are
/// eliminated through `u₀ = u₁/(1+βh)`, which only changes the two corner entries.
pub fn robin_second_difference(n: usize, beta: f64) -> DMatrix<f64> {
    let h = 1.0 / (n + 1) as f64;
    let inv_h2 = 1.0 / (h * h);
    let fold = 1.0 / (1.0 + beta * h);
    DMatrix::from_fn(n, n, |i, j| {
        let v = if i == j {
            let mut d = -2.0;
            if i == 0 || i == n - 1 {
                d += fold;
            }
            d
        } else if i.abs_diff(j) == 1 {
            1.0
        } else {
            0.0
        };
        v * inv_h2
    })
}

pub fn build_robin_squared(n: usize, beta: f64) -> Result<RobinSquared> {
    if n < 10 {
        return Err(Error::InvalidParameters(format!("Robin surrogate needs n >= 10, got {n}")));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidParameters(format!("Robin coefficient must be positive, got {beta}")));
    }
    let bm = robin_second_difference(n, beta);
    let am = -(&bm * &bm);
    Ok(RobinSquared {
        n,
        beta,
        h: 1.0 / (n + 1) as f64,
        b: SquareOperator::from_real(bm)?,
        a: SquareOperator::from_real(am)?,
    })
}
