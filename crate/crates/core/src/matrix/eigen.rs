//! Dense eigendecomposition with matched left/right eigenvectors and clustering.

use nalgebra::linalg::{Schur, SVD};
use num_complex::Complex64;

use super::operator::{CMatrix, CVector, ComplexVector, SquareOperator};
use crate::error::{Error, Result};

/// Relative tolerance for merging eigenvalues into clusters.
pub const CLUSTER_REL_TOL: f64 = 1e-8;
/// Relative tolerance for numerical rank decisions.
pub const RANK_REL_TOL: f64 = 1e-8;
/// Relative eigenpair residual bound.
pub const EIG_RESIDUAL_TOL: f64 = 1e-8;

const SCHUR_MAX_ITER_PER_DIM: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenCluster {
    pub value: Complex64,
    pub members: Vec<usize>,
    pub alg_mult: usize,
    pub geo_mult: usize,
}

#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub eigenvalues: Vec<Complex64>,
    pub right_vectors: Vec<ComplexVector>,
    pub left_vectors: Vec<ComplexVector>,
    pub cluster_tol: f64,
    pub rank_tol: f64,
    /// Sorted by decreasing real part, then decreasing imaginary part.
    pub clusters: Vec<EigenCluster>,
    pub norm: f64,
}

impl EigenSystem {
    /// Cluster whose value is nearest to `z`, if within `cluster_tol` (plus round-off slack).
    pub fn cluster_near(&self, z: Complex64) -> Option<&EigenCluster> {
        let slack = self.cluster_tol.max(1e-12 * self.norm.max(1.0));
        self.clusters
            .iter()
            .filter(|c| c.members.iter().any(|&i| (self.eigenvalues[i] - z).norm() <= slack) || (c.value - z).norm() <= slack)
            .min_by(|a, b| (a.value - z).norm().total_cmp(&(b.value - z).norm()))
    }

    pub fn nearest_eigenvalue(&self, z: Complex64) -> Complex64 {
        nearest(&self.eigenvalues, z)
    }
}

pub(crate) fn nearest(values: &[Complex64], z: Complex64) -> Complex64 {
    values
        .iter()
        .copied()
        .min_by(|a, b| (a - z).norm().total_cmp(&(b - z).norm()))
        .unwrap_or(z)
}

/// Householder reflector `I − 2ww*/w*w` for a fixed deterministic `w`.
fn reflector(n: usize, seed: usize) -> CMatrix {
    let w = CVector::from_fn(n, |i, _| {
        let k = (i + 1 + seed) as f64;
        Complex64::new((0.7 * k).sin() + 1.3, (1.1 * k).cos())
    });
    let ww = w.dotc(&w);
    CMatrix::identity(n, n) - (&w * w.adjoint()) * (Complex64::new(2.0, 0.0) / ww)
}

/// Complex Schur form `M = Q T Q*`. Plain shifted QR can stall on highly structured
/// inputs (cyclic nilpotents), so failed attempts restart from a unitarily similar matrix.
fn schur(m: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let n = m.nrows();
    let iters = SCHUR_MAX_ITER_PER_DIM * n.max(10);
    if let Some(s) = Schur::try_new(m.clone(), f64::EPSILON, iters) {
        return Ok(s.unpack());
    }
    for seed in 0..3 {
        let h = reflector(n, seed);
        let similar = &h * m * &h;
        if let Some(s) = Schur::try_new(similar, f64::EPSILON, iters) {
            let (q, t) = s.unpack();
            return Ok((&h * q, t));
        }
    }
    Err(Error::NumericalFailure("Schur iteration did not converge".into()))
}

/// Eigenvalues only (diagonal of the complex Schur form).
pub fn eigenvalues(a: &SquareOperator) -> Result<Vec<Complex64>> {
    let (_, t) = schur(a.entries())?;
    Ok((0..a.dim()).map(|i| t[(i, i)]).collect())
}

/// Eigenvector of an upper-triangular `t` for the eigenvalue in slot `k`.
fn triangular_eigvec(t: &CMatrix, k: usize, floor: f64) -> CVector {
    let n = t.nrows();
    let lambda = t[(k, k)];
    let mut x = CVector::zeros(n);
    x[k] = Complex64::new(1.0, 0.0);
    for i in (0..k).rev() {
        let mut s = Complex64::new(0.0, 0.0);
        for j in i + 1..=k {
            s += t[(i, j)] * x[j];
        }
        let mut d = t[(i, i)] - lambda;
        if d.norm() < floor {
            d = Complex64::new(floor, 0.0);
        }
        x[i] = -s / d;
        // Rescale to avoid overflow for ill-conditioned triangles.
        let big = x.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        if big > 1e100 {
            x /= Complex64::new(big, 0.0);
        }
    }
    x
}

/// Scales to unit sup-norm with the largest-modulus entry real and positive.
pub(crate) fn normalize(v: &CVector) -> CVector {
    let (mut idx, mut best) = (0, -1.0);
    for (i, z) in v.iter().enumerate() {
        // Ties go to the lower index for determinism.
        if z.norm() > best * (1.0 + 1e-12) {
            best = z.norm();
            idx = i;
        }
    }
    if best <= 0.0 {
        return v.clone();
    }
    let phase = v[idx] / v[idx].norm();
    v.map(|z| z / (phase * best))
}

fn residual_ok(a: &CMatrix, lambda: Complex64, v: &CVector, bound: f64) -> bool {
    let r = a * v - v * lambda;
    let rn = r.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let vn = v.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    rn <= bound * vn
}

/// Inverse iteration polish for a single eigenpair.
fn refine(a: &CMatrix, lambda: Complex64, v: &CVector, shift: f64) -> Option<CVector> {
    let n = a.nrows();
    let mut m = a.clone();
    for i in 0..n {
        m[(i, i)] -= lambda + Complex64::new(shift, 0.0);
    }
    let lu = m.lu();
    let mut x = v.clone();
    for _ in 0..3 {
        x = normalize(&lu.solve(&x)?);
    }
    Some(x)
}

/// Sorted singular triples of `m`: (sigma, left vector, right vector), ascending in sigma.
pub(crate) fn svd_ascending(m: &CMatrix) -> Result<Vec<(f64, CVector, CVector)>> {
    let svd = SVD::try_new(m.clone(), true, true, f64::EPSILON, 0)
        .ok_or_else(|| Error::NumericalFailure("SVD did not converge".into()))?;
    let u = svd.u.as_ref().ok_or_else(|| Error::NumericalFailure("SVD missing U".into()))?;
    let vt = svd.v_t.as_ref().ok_or_else(|| Error::NumericalFailure("SVD missing V".into()))?;
    let mut triples: Vec<(f64, CVector, CVector)> = (0..svd.singular_values.len())
        .map(|i| {
            let left = u.column(i).into_owned();
            let right = vt.row(i).adjoint().into_owned();
            (svd.singular_values[i], left, right)
        })
        .collect();
    triples.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(triples)
}

fn cluster_indices(vals: &[Complex64], tol: f64) -> Vec<Vec<usize>> {
    let n = vals.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (vals[i] - vals[j]).norm() <= tol {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if root_slot[r] == usize::MAX {
            root_slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_slot[r]].push(i);
    }
    groups
}

/// Full eigendecomposition with clusters, multiplicities and matched eigenvector pairs.
pub fn eig(a: &SquareOperator) -> Result<EigenSystem> {
    let n = a.dim();
    let m = a.entries();
    let norm = a.norm_inf();
    let cluster_tol = CLUSTER_REL_TOL * norm;
    let rank_tol = RANK_REL_TOL * norm;
    let floor = f64::EPSILON * norm.max(f64::MIN_POSITIVE);
    let res_bound = EIG_RESIDUAL_TOL * norm.max(f64::MIN_POSITIVE);

    let (q, t) = schur(m)?;
    let eigenvalues: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();
    let groups = cluster_indices(&eigenvalues, cluster_tol);

    let adj = m.adjoint();
    let (q2, t2) = schur(&adj)?;
    let adj_vals: Vec<Complex64> = (0..n).map(|i| t2[(i, i)].conj()).collect();

    let mut right: Vec<Option<CVector>> = vec![None; n];
    let mut left: Vec<Option<CVector>> = vec![None; n];
    let mut clusters = Vec::with_capacity(groups.len());
    let mut used_left = vec![false; n];

    for g in &groups {
        let mean = g.iter().map(|&i| eigenvalues[i]).sum::<Complex64>() / g.len() as f64;
        let mut value = mean;
        if a.is_real() && value.im.abs() <= cluster_tol.max(1e-14 * norm) {
            value.im = 0.0;
        }
        let geo_mult;
        if g.len() == 1 {
            let k = g[0];
            let lam = eigenvalues[k];
            let mut u = normalize(&(&q * triangular_eigvec(&t, k, floor)));
            if !residual_ok(m, lam, &u, res_bound) {
                u = refine(m, lam, &u, 1e3 * floor).filter(|x| residual_ok(m, lam, x, res_bound)).ok_or_else(
                    || Error::NumericalFailure(format!("eigenvector residual too large at {lam}")),
                )?;
            }
            // Left partner: eigenvector of A^H at the conjugate value, best overlap with u.
            let mut best: Option<(usize, f64)> = None;
            for j in 0..n {
                if used_left[j] || (adj_vals[j] - lam).norm() > cluster_tol.max(1e-10 * norm.max(1.0)) {
                    continue;
                }
                let y = normalize(&(&q2 * triangular_eigvec(&t2, j, floor)));
                let ov = y.dotc(&u).norm() / (y.norm() * u.norm());
                if best.is_none_or(|(_, b)| ov > b * (1.0 + 1e-12)) {
                    best = Some((j, ov));
                }
            }
            let mut v = match best {
                Some((j, _)) => {
                    used_left[j] = true;
                    normalize(&(&q2 * triangular_eigvec(&t2, j, floor)))
                }
                None => {
                    let j = (0..n)
                        .filter(|&j| !used_left[j])
                        .min_by(|&x, &y| (adj_vals[x] - lam).norm().total_cmp(&(adj_vals[y] - lam).norm()))
                        .ok_or_else(|| Error::NumericalFailure("no left eigenvector available".into()))?;
                    used_left[j] = true;
                    normalize(&(&q2 * triangular_eigvec(&t2, j, floor)))
                }
            };
            let lam_c = lam.conj();
            if !residual_ok(&adj, lam_c, &v, res_bound) {
                v = refine(&adj, lam_c, &v, 1e3 * floor).filter(|x| residual_ok(&adj, lam_c, x, res_bound)).ok_or_else(
                    || Error::NumericalFailure(format!("left eigenvector residual too large at {lam}")),
                )?;
            }
            right[k] = Some(u);
            left[k] = Some(v);
            geo_mult = 1;
        } else {
            let mut shifted = -m.clone();
            for i in 0..n {
                shifted[(i, i)] += value;
            }
            let triples = svd_ascending(&shifted)?;
            let nullity = triples.iter().take_while(|(s, _, _)| *s <= rank_tol).count();
            geo_mult = nullity.clamp(1, g.len());
            for (slot, &k) in g.iter().enumerate() {
                let (_, ref l, ref r) = triples[slot % geo_mult];
                right[k] = Some(normalize(r));
                left[k] = Some(normalize(l));
            }
            // Keep the transpose-side bookkeeping consistent for later singletons.
            for _ in 0..g.len() {
                if let Some(j) = (0..n)
                    .filter(|&j| !used_left[j])
                    .min_by(|&x, &y| (adj_vals[x] - value).norm().total_cmp(&(adj_vals[y] - value).norm()))
                {
                    used_left[j] = true;
                }
            }
        }
        clusters.push(EigenCluster { value, members: g.clone(), alg_mult: g.len(), geo_mult });
    }

    clusters.sort_by(|x, y| y.value.re.total_cmp(&x.value.re).then(y.value.im.total_cmp(&x.value.im)));
    // Conjugate pairs carry real parts that differ by round-off; order those by imaginary part.
    let tie = cluster_tol.max(1e-12 * norm.max(1.0));
    let mut swapped = true;
    while swapped {
        swapped = false;
        for k in 1..clusters.len() {
            let (a, b) = (clusters[k - 1].value, clusters[k].value);
            if (a.re - b.re).abs() <= tie && a.im < b.im {
                clusters.swap(k - 1, k);
                swapped = true;
            }
        }
    }
    Ok(EigenSystem {
        eigenvalues,
        right_vectors: right.into_iter().map(|v| ComplexVector(v.expect("every slot assigned"))).collect(),
        left_vectors: left.into_iter().map(|v| ComplexVector(v.expect("every slot assigned"))).collect(),
        cluster_tol,
        rank_tol,
        clusters,
        norm,
    })
}
