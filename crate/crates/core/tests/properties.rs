//! Property tests for the algebraic invariants of the library.

mod common;

use evpos::certify::{
    certify_matrix_semigroup, cone_classify, dim2_no_gap_check, sign_normalized, CertifyOptions, ConeClass, ConeMargins,
    Verdict,
};
use evpos::matrix::{
    eig, eigenvalues, expm, expm_real, neumann_resolvent, norm_inf, norm_inf_real, resolvent, ComplexVector,
    SquareOperator, EIG_RESIDUAL_TOL,
};
use evpos::models::{
    build_delay, build_dtn, build_reflection, build_rotation, build_sequence, build_shift_flip, ExactEvaluators,
    ModelParams, ModelSpec, RotationVariant, MODEL_IDS,
};
use evpos::spectral::{contour_projection, multiplicity, spectral_projection, spectrum_report};
use evpos::Complex64;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{constructed, op, random_constructed, random_dim2};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Random dense matrix with `‖A‖_∞ = norm`.
fn random_matrix(r: &mut ChaCha8Rng, n: usize, norm: f64) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |_, _| r.gen_range(-1.0..1.0));
    let scale = norm / norm_inf_real(&m);
    m * scale
}

fn max_imag(m: &SquareOperator) -> f64 {
    m.entries().iter().map(|z| z.im.abs()).fold(0.0, f64::max)
}

fn certify(a: &SquareOperator) -> evpos::Result<evpos::certify::PositivityCertificate> {
    certify_matrix_semigroup(a, &ConeMargins::default(), &CertifyOptions::default())
}

/// A matrix whose eigenvalue `s` has algebraic multiplicity `block`: a single Jordan chain
/// when `defective`, otherwise `block` independent eigenvectors.
fn with_repeated_eigenvalue(r: &mut ChaCha8Rng, n: usize, block: usize, defective: bool) -> (DMatrix<f64>, f64) {
    let s = r.gen_range(-1.0..1.0);
    let mut j = DMatrix::zeros(n, n);
    for i in 0..block {
        j[(i, i)] = s;
    }
    for i in block..n {
        j[(i, i)] = s - r.gen_range(0.5..2.0);
    }
    if defective {
        // A similarity would split the defective eigenvalue by ε^{1/block}, beyond any
        // clustering tolerance; an upper triangular matrix keeps the spectrum exact.
        for i in 0..n {
            for k in i + 1..n {
                j[(i, k)] = if k == i + 1 && k < block { r.gen_range(0.5..1.5) } else { r.gen_range(-1.0..1.0) };
            }
        }
        return (j, s);
    }
    loop {
        let v = DMatrix::from_fn(n, n, |i, k| if i == k { 2.0 } else { 0.0 } + r.gen_range(-0.5..0.5));
        if let Some(inv) = v.clone().try_inverse() {
            return (&v * j * inv, s);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn semigroup_law(seed in any::<u64>(), n in 2usize..=6, norm in 0.1f64..10.0, s in 0.0f64..1.0, t in 0.0f64..1.0) {
        let a = random_matrix(&mut rng(seed), n, norm);
        let (es, et) = (expm_real(&a, s).unwrap(), expm_real(&a, t).unwrap());
        let est = expm_real(&a, s + t).unwrap();
        let scale = norm_inf_real(&es) * norm_inf_real(&et);
        let err = norm_inf_real(&(&est - &es * &et));
        prop_assert!(err <= 1e-8 * scale.max(1.0), "err {err:e}, scale {scale:e}");
    }

    #[test]
    fn resolvent_identity(seed in any::<u64>(), n in 2usize..=6,
                          l in (-4.0f64..4.0, -4.0f64..4.0), m in (-4.0f64..4.0, -4.0f64..4.0)) {
        let a = op(&random_matrix(&mut rng(seed), n, 3.0));
        let (l, m) = (Complex64::new(l.0, l.1), Complex64::new(m.0, m.1));
        let spec = eigenvalues(&a).unwrap();
        let dist = |z: Complex64| spec.iter().map(|w| (z - w).norm()).fold(f64::INFINITY, f64::min);
        prop_assume!(dist(l) >= 0.1 && dist(m) >= 0.1);
        let (rl, rm) = (resolvent(&a, l).unwrap(), resolvent(&a, m).unwrap());
        let lhs = rl.entries() - rm.entries();
        let rhs = rl.entries() * rm.entries() * (m - l);
        let scale = norm_inf(rl.entries()) * norm_inf(rm.entries()) * (m - l).norm();
        prop_assert!(norm_inf(&(lhs - rhs)) <= 1e-8 * scale.max(1.0));
    }

    #[test]
    fn eigen_residuals(seed in any::<u64>(), n in 1usize..=8, norm in 0.1f64..20.0) {
        let a = op(&random_matrix(&mut rng(seed), n, norm));
        let es = eig(&a).unwrap();
        let m = a.entries();
        let bound = EIG_RESIDUAL_TOL * a.norm_inf();
        for i in 0..n {
            let lam = es.eigenvalues[i];
            let u = &es.right_vectors[i].0;
            let v = &es.left_vectors[i].0;
            let ru = (m * u - u * lam).camax();
            let rv = (v.adjoint() * m - v.adjoint() * lam).camax();
            prop_assert!(ru <= bound * u.camax(), "right residual {ru:e}");
            prop_assert!(rv <= bound * v.camax(), "left residual {rv:e}");
        }
    }

    #[test]
    fn reality_is_preserved(seed in any::<u64>(), n in 2usize..=6, t in 0.0f64..3.0, lambda in 3.5f64..6.0) {
        // ‖A‖ = 3 keeps λ outside the spectrum and the Neumann series convergent.
        let a = op(&random_matrix(&mut rng(seed), n, 3.0));
        prop_assert!(max_imag(&expm(&a, t).unwrap()) <= 1e-10);
        prop_assert!(max_imag(&resolvent(&a, c(lambda)).unwrap()) <= 1e-10);
        let nr = neumann_resolvent(&a, c(lambda + 5.0), c(lambda), 200).unwrap();
        prop_assert!(max_imag(&nr.value) <= 1e-10);
        let top = eigenvalues(&a).unwrap().into_iter().filter(|z| z.im == 0.0).max_by(|x, y| x.re.total_cmp(&y.re));
        if let Some(z) = top {
            if let Ok(p) = spectral_projection(&a, z) {
                prop_assert!(max_imag(&p.p) <= 1e-10);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectral_and_contour_projections_agree(seed in any::<u64>(), n in 3usize..=7) {
        let mut r = rng(seed);
        let strong = r.gen_bool(0.5);
        let a = op(&random_constructed(&mut r, n, strong));
        let report = spectrum_report(&a).unwrap();
        let s = report.spectral_bound;
        let gap = report.dominance_gap.unwrap();
        let sp = spectral_projection(&a, c(s)).unwrap();
        let cp = contour_projection(&a, c(s), 0.5 * gap, 64).unwrap();
        prop_assert!(norm_inf(&(sp.p.entries() - cp.entries())) <= 1e-8);
    }

    #[test]
    fn pole_order_and_rank_are_consistent(seed in any::<u64>(), n in 3usize..=6, block in 1usize..=3, defective: bool) {
        let (m, s) = with_repeated_eigenvalue(&mut rng(seed), n, block, defective);
        let a = op(&m);
        let sp = spectral_projection(&a, c(s)).unwrap();
        let (alg, geo, simple) = multiplicity(&a, c(s)).unwrap();
        prop_assert_eq!(simple, sp.pole_order == 1);
        prop_assert_eq!(sp.rank, alg);
        prop_assert_eq!(alg, block);
        let want_order = if defective { block } else { 1 };
        prop_assert_eq!(sp.pole_order, want_order);
        prop_assert_eq!(geo, if defective { 1 } else { block });
    }

    #[test]
    fn shift_covariance(seed in any::<u64>(), n in 3usize..=6, shift in -3.0f64..3.0) {
        let mut r = rng(seed);
        let a = op(&random_constructed(&mut r, n, true));
        let b = a.shifted(c(-shift));
        let (ra, rb) = (spectrum_report(&a).unwrap(), spectrum_report(&b).unwrap());
        prop_assert_eq!(ra.clusters.len(), rb.clusters.len());
        for (x, y) in ra.clusters.iter().zip(&rb.clusters) {
            prop_assert!((x.value - shift - y.value).norm() <= 1e-10, "{} vs {}", x.value, y.value);
            prop_assert_eq!((x.alg_mult, x.geo_mult), (y.alg_mult, y.geo_mult));
        }
        let pa = spectral_projection(&a, c(ra.spectral_bound)).unwrap();
        let pb = spectral_projection(&b, c(rb.spectral_bound)).unwrap();
        prop_assert!(norm_inf(&(pa.p.entries() - pb.p.entries())) <= 1e-10);
    }

    #[test]
    fn real_matrix_has_real_projection(seed in any::<u64>(), n in 3usize..=7) {
        let a = op(&random_constructed(&mut rng(seed), n, false));
        let s = spectrum_report(&a).unwrap().spectral_bound;
        prop_assert!(max_imag(&spectral_projection(&a, c(s)).unwrap().p) <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn refutations_are_sound(seed in any::<u64>(), n in 2usize..=6, constructed_family: bool) {
        let mut r = rng(seed);
        let a = if constructed_family {
            random_constructed(&mut r, n.max(3), false)
        } else {
            random_matrix(&mut r, n, 4.0)
        };
        let cert = certify(&op(&a)).unwrap();
        if cert.verdict == Verdict::NotEventuallyPositive {
            if let Some(w) = &cert.witnesses.refutation {
                let f = DVector::from_vec(w.f.real_part());
                let shifted = &a - DMatrix::identity(a.nrows(), a.nrows()) * w.shift;
                let y = expm_real(&shifted, w.t).unwrap() * f;
                let (zero_tol, _) = cert.margins.resolve(y.amax());
                prop_assert!(y[w.index] < -zero_tol, "entry {} at t = {}", y[w.index], w.t);
                prop_assert!((y[w.index] - w.value).abs() <= 1e-8 * y.amax());
            }
        }
    }

    #[test]
    fn verdict_is_shift_invariant(seed in any::<u64>(), n in 3usize..=6, strong: bool, shift in -2.0f64..2.0) {
        let a = op(&random_constructed(&mut rng(seed), n, strong));
        let v0 = certify(&a).unwrap().verdict;
        let v1 = certify(&a.shifted(c(-shift))).unwrap().verdict;
        prop_assert_eq!(v0, v1);
    }

    #[test]
    fn two_by_two_has_no_gap(seed in any::<u64>(), structured: bool) {
        let mut r = rng(seed);
        let a = if structured { random_dim2(&mut r) } else { DMatrix::from_fn(2, 2, |_, _| r.gen_range(-2.0..2.0)) };
        let grid: Vec<f64> = (0..100).map(|k| 20.0 * k as f64 / 99.0).collect();
        prop_assert!(dim2_no_gap_check(&op(&a), &grid, &ConeMargins::default()).unwrap());
    }

    #[test]
    fn positive_eigenvector_is_unique(seed in any::<u64>(), n in 3usize..=7) {
        let a = op(&random_constructed(&mut rng(seed), n, true));
        let es = eig(&a).unwrap();
        let s = spectrum_report(&a).unwrap().spectral_bound;
        let m = ConeMargins::default();
        for cl in es.clusters.iter().filter(|cl| (cl.value - c(s)).norm() > 1e-6) {
            for &i in &cl.members {
                let class = sign_normalized(&es.right_vectors[i]).map(|u| cone_classify(&u, &m));
                prop_assert!(!matches!(class, Some(ConeClass::PositiveNonzero | ConeClass::StronglyPositive)));
            }
        }
    }

    #[test]
    fn reflection_evaluators_match_matrix(k in 1usize..=20, t in 0.0f64..10.0, lambda in 0.05f64..5.0, seed in any::<u64>()) {
        let (a, model) = build_reflection(2 * k + 1).unwrap();
        evaluators_match(&a, &model, t, lambda, seed)?;
    }

    #[test]
    fn sequence_evaluators_match_matrix(big_n in 2usize..=8, t in 0.0f64..10.0, lambda in 0.05f64..5.0, seed in any::<u64>()) {
        let (a, model) = build_sequence(big_n).unwrap();
        evaluators_match(&a, &model, t, lambda, seed)?;
    }

    #[test]
    fn rotation_evaluators_match_matrix(variant in 0usize..3, mu in 0.1f64..3.0, t in 0.0f64..10.0,
                                        lambda in 0.05f64..5.0, seed in any::<u64>()) {
        let variant = [RotationVariant::Plain, RotationVariant::Damped, RotationVariant::Shifted][variant];
        let (a, model) = build_rotation(variant, mu).unwrap();
        evaluators_match(&a, &model, t, lambda, seed)?;
    }

    #[test]
    fn dtn_grid_operator_is_reflection_symmetric(lambda in 1.0f64..60.0, modes in 3usize..=16) {
        let Ok(model) = build_dtn(lambda, modes, 2 * modes + 1) else { return Ok(()) };
        let g = model.grid_operator().unwrap().real_part();
        let d = g.nrows();
        let refl = |i: usize| (d - i) % d;
        let commutator = DMatrix::from_fn(d, d, |i, j| g[(refl(i), refl(j))] - g[(i, j)]);
        prop_assert!(norm_inf_real(&commutator) <= 1e-12 * norm_inf_real(&g).max(1.0));
    }

    #[test]
    fn dtn_mode_and_grid_evolutions_agree(lambda in 1.0f64..60.0, modes in 3usize..=16, t in 0.0f64..2.0) {
        // The synthesis grid coincides with the collocation grid when it has 2K+1 points.
        let Ok(model) = build_dtn(lambda, modes, 2 * modes + 1) else { return Ok(()) };
        let g = model.grid_operator().unwrap();
        let u0 = model.synthesize(&model.fejer_coefficients(0.0));
        let e = expm(&g.shifted(c(model.mu[0])), t).unwrap().real_part();
        // Round-off in the unexcited modes is amplified by the growth of the grid evolution.
        let scale = norm_inf_real(&e) * u0.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let grid = e * DVector::from_vec(u0);
        let mode = model.synthesize(&model.fejer_coefficients(t));
        let err = grid.iter().zip(&mode).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-10 * scale, "err {err:e}, scale {scale:e}");
    }
}

fn evaluators_match(a: &SquareOperator, model: &dyn ExactEvaluators, t: f64, lambda: f64, seed: u64) -> Result<(), TestCaseError> {
    let mut r = rng(seed);
    let n = a.dim();
    let f = ComplexVector::from_real(&(0..n).map(|_| r.gen_range(-1.0..1.0)).collect::<Vec<_>>());
    let scale = f.norm_inf().max(1e-300);

    let exact = model.semigroup_apply(t, &f).expect("semigroup formula").unwrap();
    let dense = expm(a, t).unwrap().apply(&f).unwrap();
    let err = (exact.0 - dense.0).camax();
    prop_assert!(err <= 1e-8 * scale, "semigroup err {err:e}");

    let lambda = c(lambda);
    let exact = model.resolvent_apply(lambda, &f).expect("resolvent formula").unwrap();
    let dense = resolvent(a, lambda).unwrap().apply(&f).unwrap();
    let err = (exact.0 - &dense.0).camax();
    prop_assert!(err <= 1e-8 * dense.norm_inf().max(scale), "resolvent err {err:e}");
    Ok(())
}

#[test]
fn constructed_generators_have_the_prescribed_spectrum() {
    let mut r = rng(7);
    for _ in 0..20 {
        let u = DVector::from_vec(vec![1.0, 2.0, 0.5, 1.5]);
        let v = DVector::from_vec(vec![0.5, 1.0, 1.0, 2.0]);
        let v = &v / v.dot(&u);
        let cblock = common::complement_block(&mut r, 3, 0.3, 0.8);
        let a = op(&constructed(&u, &v, 0.3, &cblock));
        let report = spectrum_report(&a).unwrap();
        assert!((report.spectral_bound - 0.3).abs() < 1e-10);
        assert!((report.dominance_gap.unwrap() - 0.8).abs() < 1e-8);
        let p = spectral_projection(&a, c(0.3)).unwrap().p.real_part();
        assert!(norm_inf_real(&(p - &u * v.transpose())) < 1e-10);
    }
}

#[test]
fn delay_discretization_converges() {
    // The root at 0 survives discretization exactly. The leading nonzero pair
    // (about −0.647 ± 2.796i) is approached at first order by the upwind scheme.
    let sizes = [50usize, 100, 200, 400];
    let target = {
        use evpos::models::delay::seed_grid;
        use evpos::models::{delay_characteristic_roots, RootBox};
        let bx = RootBox { re_min: -3.0, re_max: 1.0, im_min: 0.5, im_max: 20.0 };
        let roots = delay_characteristic_roots(bx, &seed_grid(bx, 8, 40)).unwrap().roots;
        *roots.iter().filter(|z| z.im > 0.5).max_by(|x, y| x.re.total_cmp(&y.re)).unwrap()
    };
    let mut zero = Vec::new();
    let mut errors = Vec::new();
    for &n in &sizes {
        let (a, _) = build_delay(n).unwrap();
        let spec = eigenvalues(&a).unwrap();
        let near = |z: Complex64| spec.iter().map(|w| (w - z).norm()).fold(f64::INFINITY, f64::min);
        zero.push(near(c(0.0)));
        errors.push(near(target));
    }
    for (n, z) in sizes.iter().zip(&zero) {
        assert!(*z <= 1.0 / *n as f64, "n={n}: |λ(n)| = {z:e}");
    }
    for w in errors.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order >= 0.9, "observed order {order:.3} from errors {errors:?} towards {target}");
    }
}

#[test]
fn shift_flip_domain_cone_is_not_generating() {
    let sf = build_shift_flip(12).unwrap();
    let m = sf.nodes();
    let forced = sf.domain_cone_forced_zeros();
    // f₁(1) and f₂(1) vanish on the positive part of the domain.
    assert!(forced.contains(&sf.n) && forced.contains(&(m + sf.n)));
    let basis = sf.domain_basis();
    let mut r = rng(11);
    for _ in 0..50 {
        // Nonnegative combinations of the unit-vector part of the basis stay in the cone.
        let mut v = vec![0.0; 2 * m];
        for b in &basis[1..] {
            let w = r.gen_range(0.0..1.0);
            for (x, y) in v.iter_mut().zip(b.as_slice()) {
                *x += w * y.re;
            }
        }
        assert!(forced.iter().all(|&i| v[i] == 0.0));
        // Any multiple of the first vector breaks positivity.
        let k = r.gen_range(0.1..1.0) * if r.gen_bool(0.5) { 1.0 } else { -1.0 };
        let bumped: Vec<f64> = v.iter().zip(basis[0].as_slice()).map(|(x, y)| x + k * y.re).collect();
        assert!(bumped.iter().any(|&x| x < 0.0));
    }
}

#[test]
fn gallery_conditions_are_coherent() {
    for id in MODEL_IDS.iter().filter(|id| **id != "shift-flip") {
        let a = ModelSpec::from_id(id, &ModelParams::default()).unwrap().generator().unwrap();
        let cert = certify(&a).unwrap();
        if cert.pole_order.is_none() || !spectrum_report(&a).unwrap().dominant {
            continue;
        }
        let flags = [
            cert.conditions.resolvent_individual.holds,
            cert.conditions.eigenvectors.holds,
            cert.conditions.projection.holds,
        ];
        let known: Vec<bool> = flags.iter().flatten().copied().collect();
        let coherent = known.windows(2).all(|w| w[0] == w[1]);
        assert!(coherent || cert.verdict == Verdict::Inconclusive, "{id}: {flags:?} with {:?}", cert.verdict);
    }
}
