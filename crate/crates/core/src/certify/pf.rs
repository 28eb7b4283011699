use num_complex::Complex64;
use serde::Serialize;

use super::cone::{cone_classify, sign_normalized, ConeClass, ConeMargins};
use crate::error::{Error, Result};
use crate::json;
use crate::matrix::{eig, svd_ascending, ComplexVector, EigenSystem, SquareOperator};
use crate::spectral::{spectral_projection_with, SpectralProjectionResult};

/// The three equivalent Perron–Frobenius tests at a real eigenvalue.
#[derive(Debug, Clone, Serialize)]
pub struct ProjectionPfCheck {
    pub lambda0: f64,
    /// `P ≫ 0` entrywise.
    pub p_strongly_positive: bool,
    /// Geometrically simple with strongly positive right and left eigenvectors.
    pub geo_simple_with_pos_vectors: bool,
    /// Algebraically simple, `u ≫ 0`, and no positive vector in the range of `λ0 − A`
    /// (checked through `v ≫ 0`).
    pub alg_simple_range_condition: bool,
    pub agree: bool,
    pub p_class: ConeClass,
    #[serde(serialize_with = "json::opt_vector")]
    pub u: Option<ComplexVector>,
    #[serde(serialize_with = "json::opt_vector")]
    pub v: Option<ComplexVector>,
    #[serde(skip)]
    pub projection: SpectralProjectionResult,
}

pub fn check_projection_pf(a: &SquareOperator, lambda0: f64, m: &ConeMargins) -> Result<ProjectionPfCheck> {
    let es = eig(a)?;
    check_projection_pf_with(a, &es, lambda0, m)
}

pub fn check_projection_pf_with(
    a: &SquareOperator,
    es: &EigenSystem,
    lambda0: f64,
    m: &ConeMargins,
) -> Result<ProjectionPfCheck> {
    let z0 = Complex64::new(lambda0, 0.0);
    let cluster = es
        .cluster_near(z0)
        .ok_or_else(|| Error::NotAnEigenvalue(z0, es.nearest_eigenvalue(z0)))?
        .clone();
    let projection = spectral_projection_with(a, es, cluster.value)?;
    let p_class = cone_classify(&ComplexVector::new(projection.p.entries().iter().copied().collect()), m);

    let (u, v) = if cluster.geo_mult != 1 {
        (None, None)
    } else if cluster.alg_mult == 1 {
        let i = cluster.members[0];
        (sign_normalized(&es.right_vectors[i]), sign_normalized(&es.left_vectors[i]))
    } else {
        // Defective cluster: the one-dimensional kernels of λ0 − A and its adjoint.
        let mut shifted = -a.entries().clone();
        for i in 0..a.dim() {
            shifted[(i, i)] += cluster.value;
        }
        let sv = svd_ascending(&shifted)?;
        (sign_normalized(&ComplexVector(sv[0].2.clone())), sign_normalized(&ComplexVector(sv[0].1.clone())))
    };
    let strong = |w: &Option<ComplexVector>| w.as_ref().is_some_and(|w| cone_classify(w, m).is_strong());
    let (u_strong, v_strong) = (strong(&u), strong(&v));

    let p_strongly_positive = p_class.is_strong();
    let geo_simple_with_pos_vectors = cluster.geo_mult == 1 && u_strong && v_strong;
    let alg_simple_range_condition = cluster.alg_mult == 1 && u_strong && v_strong;
    Ok(ProjectionPfCheck {
        lambda0,
        p_strongly_positive,
        geo_simple_with_pos_vectors,
        alg_simple_range_condition,
        agree: p_strongly_positive == geo_simple_with_pos_vectors
            && geo_simple_with_pos_vectors == alg_simple_range_condition,
        p_class,
        u,
        v,
        projection,
    })
}
