//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the report is always printed. Each criterion is a
//! list of checks; the run fails if any check fails that is not listed in `KNOWN_GAPS`.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use evpos::certify::{
    asymptotic_positivity_trace, certify_matrix_semigroup, classify_matrix, laplace_crosscheck, log_grid,
    resolvent_power_projection, square_generator_certify, CertifyOptions, ConeMargins, MatrixEvolution,
    PositivityCertificate, Verdict,
};
use evpos::matrix::{
    eigenvalues, expm_real, norm_inf_real, resolvent, resolvent_real, singular_tol, ComplexVector, SquareOperator,
};
use evpos::models::delay::{argument_principle_count, characteristic, characteristic_reduced, seed_grid};
use evpos::models::dtn::default_fejer_times;
use evpos::models::reflection::{epsilon_threshold, FEpsilon};
use evpos::models::sequence::inequality_value;
use evpos::models::{
    bessel_zero, build_delay, build_dtn, build_reflection, build_robin_squared, build_rotation, build_sequence,
    build_shift_flip, delay_characteristic_roots, dirichlet_window, dtn_fejer_experiment, dtn_sweep_row,
    lambda_star_bracket, ExactEvaluators, ModelParams, ModelSpec, RootBox, RotationVariant, MODEL_IDS,
};
use evpos::spectral::{spectral_projection, spectrum_report};
use evpos::{Complex64, Error};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{op, op_rows, random_constructed, random_dim2};

/// Checks that cannot pass with the prescribed parameters. For the shifted rotation with
/// μ = 1 the off-diagonal entries of R(λ, A) tend to 1/(3μ) − 1/√3 < 0 as λ ↓ 0, so no
/// interval (0, λ₁] of positivity exists.
const KNOWN_GAPS: &[(u32, &str)] = &[(2, "shifted resolvent positive on (0, λ₁]")];

struct Check {
    label: &'static str,
    pass: bool,
    detail: String,
}

fn check(label: &'static str, pass: bool, detail: String) -> Check {
    Check { label, pass, detail }
}

type Checks = Result<Vec<Check>, Error>;

fn certify(a: &SquareOperator) -> Result<PositivityCertificate, Error> {
    certify_matrix_semigroup(a, &ConeMargins::default(), &CertifyOptions::default())
}

fn min_entry(m: &DMatrix<f64>) -> f64 {
    m.iter().copied().fold(f64::INFINITY, f64::min)
}

fn dist_to(z: Complex64, set: &[Complex64]) -> f64 {
    set.iter().map(|w| (z - w).norm()).fold(f64::INFINITY, f64::min)
}

/// Every element of `got` is near `want` and every element of `want` is hit.
fn same_set(got: &[Complex64], want: &[Complex64], tol: f64) -> (bool, f64) {
    let a = got.iter().map(|z| dist_to(*z, want)).fold(0.0, f64::max);
    let b = want.iter().map(|z| dist_to(*z, got)).fold(0.0, f64::max);
    (a.max(b) <= tol, a.max(b))
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Bisection for a sign change of `f` on `[lo, hi]`.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    assert!(flo * f(hi) < 0.0, "no sign change on [{lo}, {hi}]");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0) == (flo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// `J_k(x) = (1/2π)∫_0^{2π} cos(kτ − x sin τ) dτ`; the trapezoid rule converges
/// geometrically for this periodic integrand.
fn bessel_oracle(k: usize, x: f64) -> f64 {
    let m = 512;
    let tau = |j: usize| 2.0 * std::f64::consts::PI * j as f64 / m as f64;
    (0..m).map(|j| (k as f64 * tau(j) - x * tau(j).sin()).cos()).sum::<f64>() / m as f64
}

fn criterion_1() -> Checks {
    let (a, model) = build_reflection(41)?;
    let report = spectrum_report(&a)?;
    let values: Vec<Complex64> = report.clusters.iter().map(|cl| cl.value).collect();
    let (spec_ok, spec_err) = same_set(&values, &[c(0.0, 0.0), c(-1.0, 0.0), c(-3.0, 0.0)], 1e-9);

    // P f = (φ(f)/2)𝟙 with trapezoid φ on the uniform grid.
    let n = 41;
    let h = 2.0 / (n - 1) as f64;
    let w: Vec<f64> = (0..n).map(|j| if j == 0 || j == n - 1 { 0.5 * h } else { h }).collect();
    let oracle = DMatrix::from_fn(n, n, |_, j| 0.5 * w[j]);
    let p = spectral_projection(&a, c(0.0, 0.0))?.p.real_part();
    let p_err = norm_inf_real(&(&p - &oracle));
    let verdict = certify(&a)?.verdict;

    let mut out = vec![
        check("spectrum {0, −1, −3}", spec_ok, format!("max deviation {spec_err:.2e}")),
        check("projection (φ(f)/2)𝟙", p_err <= 1e-9, format!("‖P − oracle‖ = {p_err:.2e}")),
        check("certificate", verdict == Verdict::EventuallyStronglyPositive, verdict.as_str().into()),
    ];

    let real = a.real_part();
    for t in [0.5, 1.0, 2.0, 4.0] {
        let closed = epsilon_threshold(t);
        // Threshold located where e^{tA}f_ε(−1) changes sign. The grid witness needs
        // ε ≥ h/2, which fails at late times; the continuum evolution covers those.
        let grid_left_end = |eps: f64| -> Option<f64> {
            let f = model.f_eps_grid(eps).ok()?;
            let e = expm_real(&real, t).ok()?;
            Some(e.row(0).iter().zip(&f).map(|(x, y)| x * y).sum())
        };
        let grid_ok = grid_left_end(0.999 * closed).is_some() && grid_left_end(1.001 * closed).is_some();
        let (found, source) = if grid_ok {
            let thr = bisect(|e| grid_left_end(e).unwrap(), 0.5 * closed, (1.5 * closed).min(0.999));
            let witness = grid_left_end(0.5 * closed).unwrap();
            ((thr, witness), "grid")
        } else {
            let value = |e: f64| FEpsilon::new(e).unwrap().semigroup_at(t, -1.0);
            let thr = bisect(value, 0.5 * closed, (1.5 * closed).min(0.999));
            ((thr, value(0.5 * closed)), "continuum")
        };
        let (thr, witness) = found;
        let err = (thr - closed).abs();
        out.push(check(
            "non-uniformity witness",
            witness < -1e-6 && err <= 1e-8,
            format!("t={t}: ε={:.4e} gives {witness:.3e} ({source}), threshold error {err:.1e}", 0.5 * closed),
        ));
    }
    Ok(out)
}

fn criterion_2() -> Checks {
    let mut out = Vec::new();

    let (plain, _) = build_rotation(RotationVariant::Plain, 0.0)?;
    let cert = certify(&plain)?;
    let report = spectrum_report(&plain)?;
    let peripheral: Vec<Complex64> = report.peripheral.iter().map(|cl| cl.value).collect();
    let (per_ok, per_err) = same_set(&peripheral, &[c(0.0, 0.0), c(0.0, 1.0), c(0.0, -1.0)], 1e-9);
    out.push(check("plain verdict", cert.verdict == Verdict::NotEventuallyPositive, cert.verdict.as_str().into()));
    out.push(check("plain peripheral {0, ±i}", per_ok, format!("max deviation {per_err:.2e}")));

    let (damped, _) = build_rotation(RotationVariant::Damped, 1.0)?;
    let cert = certify(&damped)?;
    out.push(check(
        "damped verdict",
        cert.verdict == Verdict::EventuallyStronglyPositive,
        cert.verdict.as_str().into(),
    ));
    let p = DMatrix::from_element(3, 3, 1.0 / 3.0);
    let real = damped.real_part();
    let mut worst = 0.0f64;
    for t in std::iter::once(0.0).chain(log_grid(1e-3, 20.0, 200)) {
        let dev = norm_inf_real(&(expm_real(&real, t)? - &p));
        worst = worst.max(dev / (2.0 * (-t).exp()));
    }
    out.push(check("damped ‖e^{tA} − P‖ ≤ 2e^{−t}", worst <= 1.0, format!("max ratio {worst:.3}")));

    let mu = 1.0;
    let (shifted, model) = build_rotation(RotationVariant::Shifted, mu)?;
    let dist0 = dist_to(c(0.0, 0.0), &eigenvalues(&shifted)?);
    out.push(check("0 ∉ σ(A_μ)", dist0 >= 0.9, format!("dist(0, σ) = {dist0:.3}")));
    let resolvent_min = |l: f64| -> Result<f64, Error> { Ok(min_entry(&resolvent(&shifted, c(l, 0.0))?.real_part())) };
    let detail = match model.resolvent_positivity_limit(1.0)? {
        Some(l1) => {
            let mut lowest = f64::INFINITY;
            for k in 1..=20 {
                lowest = lowest.min(resolvent_min(l1 * k as f64 / 20.0)?);
            }
            (lowest >= 0.0, format!("λ₁ = {l1:.4}, min entry over 20 samples {lowest:.3e}"))
        }
        None => (
            false,
            format!(
                "no λ₁ exists: min entry of R(1e−3) is {:.4}, limit 1/(3μ) − 1/√3 = {:.4}",
                resolvent_min(1e-3)?,
                1.0 / (3.0 * mu) - 1.0 / 3f64.sqrt()
            ),
        ),
    };
    out.push(check("shifted resolvent positive on (0, λ₁]", detail.0, detail.1));
    Ok(out)
}

fn criterion_3() -> Checks {
    let (a, _) = build_reflection(41)?;
    let pp = resolvent_power_projection(&a, 0.5, 40)?;
    let bad: Vec<usize> = (5..=40).filter(|&n| pp.trace[n - 1] > 1.5 * 3f64.powi(-(n as i32))).collect();
    let worst = (5..=40).map(|n| pp.trace[n - 1] / (1.5 * 3f64.powi(-(n as i32)))).fold(0.0, f64::max);

    let jordan = op_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
    let (diverges, detail) = match resolvent_power_projection(&jordan, 0.5, 20) {
        Err(Error::NoConvergence { trace }) => {
            let increasing = trace.windows(2).all(|w| w[1] > w[0]);
            (increasing && trace.len() == 20, format!("reported divergent, ‖·‖ from {:.2} to {:.2}", trace[0], trace[19]))
        }
        Ok(t) => (false, format!("reported convergent with rate {}", t.rate)),
        Err(e) => (false, e.to_string()),
    };
    Ok(vec![
        check(
            "reflection rate 1.5·3^{−n}, 5 ≤ n ≤ 40",
            bad.is_empty(),
            format!("max ratio to bound {worst:.3}, violations at {bad:?}"),
        ),
        check("Jordan block diverges monotonically", diverges, detail),
    ])
}

fn criterion_4() -> Checks {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0601);
    let (mut agree, mut truthful) = (0, 0);
    let mut first_bad = None;
    for case in 0..100 {
        let n = rng.gen_range(3..=8);
        let strong = case % 2 == 0;
        let a = random_constructed(&mut rng, n, strong);
        let cert = certify(&op(&a))?;
        let flags = [cert.conditions.eigenvectors.holds, cert.conditions.power_method.holds, cert.conditions.trajectory.holds];
        let consistent = flags.iter().all(|f| f.is_some()) && flags.iter().all(|f| *f == flags[0]);
        agree += consistent as usize;
        truthful += (consistent && flags[0] == Some(strong)) as usize;
        if !consistent && first_bad.is_none() {
            first_bad = Some(format!("case {case} (n={n}): {flags:?}"));
        }
    }
    Ok(vec![
        check(
            "eigenvector, power and trajectory tests agree",
            agree == 100,
            format!("{agree}/100{}", first_bad.map(|b| format!(", first disagreement {b}")).unwrap_or_default()),
        ),
        check("agreed verdict matches construction", truthful == 100, format!("{truthful}/100")),
    ])
}

fn criterion_5() -> Checks {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0602);
    let times: Vec<f64> = (0..200).map(|k| 20.0 * k as f64 / 199.0).collect();
    let (mut certified, mut clean, mut draws) = (0, 0, 0);
    let mut worst = f64::INFINITY;
    while certified < 100 && draws < 10_000 {
        draws += 1;
        // Alternate the constructed family with unstructured matrices.
        let a = if draws % 2 == 0 {
            random_dim2(&mut rng)
        } else {
            DMatrix::from_fn(2, 2, |_, _| rng.gen_range(-2.0..2.0))
        };
        let verdict = certify(&op(&a))?.verdict;
        if !matches!(verdict, Verdict::Positive | Verdict::EventuallyStronglyPositive | Verdict::EventuallyPositive) {
            continue;
        }
        certified += 1;
        let mut lowest = f64::INFINITY;
        for &t in &times {
            lowest = lowest.min(min_entry(&expm_real(&a, t)?));
        }
        worst = worst.min(lowest);
        clean += (lowest >= -1e-9) as usize;
    }
    Ok(vec![check(
        "e^{tA} ≥ −1e−9 on [0, 20]",
        certified == 100 && clean == 100,
        format!("{clean}/{certified} certified ({draws} draws), lowest entry {worst:.2e}"),
    )])
}

fn criterion_6() -> Checks {
    let mut out = Vec::new();
    for (k, m, lo, hi) in [(0usize, 1usize, 2.0, 3.0), (2, 1, 4.5, 5.3), (0, 2, 5.3, 6.0)] {
        let oracle = bisect(|x| bessel_oracle(k, x), lo, hi);
        let got = bessel_zero(k, m)?;
        let err = (got - oracle).abs();
        out.push(check("Bessel zero", err <= 1e-9, format!("j_({k},{m}) = {got:.12}, oracle error {err:.1e}")));
    }

    let (l3, l4) = dirichlet_window()?;
    let times = default_fejer_times();

    let below = build_dtn(l3 + 0.1, 16, 512)?;
    let fe = dtn_fejer_experiment(&below, &times, 1e-9)?;
    let deriv = below.derivative_at_pi();
    out.push(check("λ₃ + 0.1: derivative at π < 0", deriv < 0.0, format!("{deriv:.4e}")));
    let detail = match fe.first_nonneg_t {
        Some(t1) => {
            let early = fe.min_trace.iter().filter(|p| p.0 < t1).map(|p| p.1).fold(f64::INFINITY, f64::min);
            (early < -1e-4 && t1 <= 10.0, format!("min {early:.3e} before t = {t1:.4}, nonnegative after"))
        }
        None => (false, "never settles on the sampled horizon".into()),
    };
    out.push(check("λ₃ + 0.1: negative dip then nonnegative", detail.0, detail.1));

    let above = build_dtn(l4 - 0.1, 16, 512)?;
    let fe = dtn_fejer_experiment(&above, &times, 1e-9)?;
    let lowest = fe.min_trace.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    out.push(check("λ₄ − 0.1: trajectory ≥ −1e−9", lowest >= -1e-9, format!("min {lowest:.3e}")));

    let steps = 200;
    let rows = (0..steps)
        .map(|i| dtn_sweep_row(l3 + (l4 - l3) * i as f64 / (steps - 1) as f64, 16, 512, &times, 1e-9))
        .collect::<Result<Vec<_>, _>>()?;
    let detail = match lambda_star_bracket(&rows) {
        Some((lo, hi)) => (hi - lo <= 0.05 && lo > l3 && hi < l4, format!("λ* ∈ ({lo:.4}, {hi:.4}), width {:.4}", hi - lo)),
        None => (false, "no bracket found".into()),
    };
    out.push(check("sweep λ* bracket", detail.0, detail.1));
    Ok(out)
}

fn criterion_7() -> Checks {
    let n = 200;
    let (a, model) = build_delay(n)?;
    let at_zero = characteristic(c(0.0, 0.0)).norm();
    let bx = RootBox { re_min: -3.0, re_max: 5.0, im_min: -20.0, im_max: 20.0 };
    let search = delay_characteristic_roots(bx, &seed_grid(bx, 16, 80))?;
    let nearest = dist_to(c(0.0, 0.0), &search.roots);
    // The root at 0 sits on the edge Re = 0, so the contour is moved slightly left.
    let count_box = RootBox { re_min: -0.1, re_max: 5.0, im_min: -20.0, im_max: 20.0 };
    let count = argument_principle_count(characteristic_reduced, count_box)?;
    let s = spectrum_report(&a)?.spectral_bound;
    let phi_one = model.phi(&vec![1.0; n + 1]);
    let verdict = certify(&a)?.verdict;
    Ok(vec![
        check(
            "root at 0",
            at_zero <= 1e-12 && nearest <= 1e-12,
            format!("|char(0)| = {at_zero:.1e}, nearest Newton root {nearest:.1e}"),
        ),
        check("one root with Re ≥ 0", count == 1, format!("count {count}")),
        check("|s(A)| ≤ 5e−3", s.abs() <= 5e-3, format!("s(A) = {s:.3e}")),
        check("φ(𝟙) = 2", (phi_one - 2.0).abs() <= 1e-6, format!("φ(𝟙) = {phi_one:.10}")),
        check("certificate", verdict == Verdict::EventuallyStronglyPositive, verdict.as_str().into()),
    ])
}

fn criterion_8() -> Checks {
    let model = build_robin_squared(64, 1.0)?;
    let r0b = resolvent_real(&model.b.real_part(), 0.0)?;
    let r_min = min_entry(&r0b);
    let sq = square_generator_certify(&model.b, &ConeMargins::default())?;
    let verdict = sq.certificate.verdict;
    let a = model.a.real_part();
    let detail = match &sq.early_negativity {
        Some(w) => {
            let lowest = min_entry(&expm_real(&a, w.t)?);
            (lowest < -1e-8, format!("t = {:.3e}: min entry {lowest:.3e}", w.t))
        }
        None => (false, "no negative sample reported".into()),
    };
    Ok(vec![
        check("R(0, B) ≥ 1e−12", r_min >= 1e-12, format!("min entry {r_min:.3e}")),
        check("certificate for −B²", verdict == Verdict::EventuallyStronglyPositive, verdict.as_str().into()),
        check("negative entry of e^{tA}", detail.0, detail.1),
    ])
}

fn criterion_9() -> Checks {
    let big_n = 6;
    let (a, model) = build_sequence(big_n)?;
    let worst_ineq = (1..=big_n).map(|n| inequality_value(&model, n)).fold(f64::NEG_INFINITY, f64::max);
    let mut worst_entry = f64::NEG_INFINITY;
    for n in 1..=big_n as i64 {
        let y = model.semigroup_apply(n as f64, &model.indicator(n)).expect("sequence semigroup formula")?;
        worst_entry = worst_entry.max(y.as_slice()[model.slot(-n)].re);
    }
    let cert = certify(&a)?;
    let p = spectral_projection(&a, c(0.0, 0.0))?.p.real_part();
    let p_strong = classify_matrix(&p, &ConeMargins::default()).is_strong();
    Ok(vec![
        check("parameter inequality strict", worst_ineq < 0.0, format!("largest value {worst_ineq:.3e}")),
        check("(e^{nA}𝟙_{n})_{−n} < −1e−12", worst_entry < -1e-12, format!("largest entry {worst_entry:.3e}")),
        check(
            "certificate reports P ≫ 0",
            cert.conditions.projection.holds == Some(true) && p_strong,
            format!("{}; P strongly positive: {p_strong}", cert.verdict.as_str()),
        ),
    ])
}

fn criterion_10() -> Checks {
    let n = 50;
    let sf = build_shift_flip(n)?;
    let d = ExactEvaluators::dim(&sf);
    let mut late = 0.0f64;
    for k in 0..=40 {
        let t = 2.0 + k as f64 / 20.0;
        for j in 0..d {
            let col = sf.semigroup_apply(t, &ComplexVector::basis(d, j)).expect("shift-flip semigroup formula")?;
            late = late.max(col.norm_inf());
        }
    }

    let mut f = vec![0.0; d];
    f[sf.nodes()..].iter_mut().for_each(|v| *v = 1.0);
    let f = ComplexVector::from_real(&f);
    let mut worst_laplace = 0.0f64;
    for l in [0.5, 1.0, 2.0] {
        worst_laplace = worst_laplace.max(laplace_crosscheck(&sf, c(l, 0.0), &f, 2.0, 2 * n)?.discrepancy);
    }
    let mut highest_min = f64::NEG_INFINITY;
    for k in 0..=10 {
        let r = ExactEvaluators::resolvent_apply(&sf, c(0.5f64.powi(k), 0.0), &f).expect("shift-flip resolvent formula")?;
        highest_min = highest_min.max(r.as_slice().iter().map(|z| z.re).fold(f64::INFINITY, f64::min));
    }
    Ok(vec![
        check("‖e^{tA}‖ = 0 for t ≥ 2", late == 0.0, format!("max entry {late:.1e} on t ∈ [2, 4]")),
        check("resolvent vs Laplace quadrature", worst_laplace <= 1e-10, format!("max discrepancy {worst_laplace:.1e}")),
        check(
            "R(λ)f has an entry ≤ −1e−6 for λ = 2^{−k}",
            highest_min <= -1e-6,
            format!("least negative minimum {highest_min:.3e}"),
        ),
    ])
}

fn criterion_11() -> Checks {
    let mut out = Vec::new();
    let (refl, _) = build_reflection(41)?;
    let (damped, _) = build_rotation(RotationVariant::Damped, 1.0)?;
    let mut worst = 0.0f64;
    for a in [&refl, &damped] {
        let n = a.dim();
        let f = ComplexVector::from_real(&(0..n).map(|j| 1.0 + j as f64 / n as f64).collect::<Vec<_>>());
        for l in [0.5, 1.0, 1.5, 2.0, 3.0] {
            let t_max = 40.0 / l;
            let chk = laplace_crosscheck(&MatrixEvolution { a }, c(l, 0.0), &f, t_max, 200)?;
            worst = worst.max(chk.discrepancy);
        }
    }
    out.push(check("Laplace cross-check on 5 λ", worst <= 1e-8, format!("max discrepancy {worst:.1e}")));

    let mut traces = Vec::new();
    let mut eigen_gap = 0.0f64;
    let mut certified = Vec::new();
    for id in MODEL_IDS.iter().filter(|id| **id != "shift-flip") {
        let a = ModelSpec::from_id(id, &ModelParams::default())?.generator()?;
        let cert = certify(&a)?;
        if !matches!(cert.verdict, Verdict::Positive | Verdict::EventuallyStronglyPositive | Verdict::EventuallyPositive) {
            continue;
        }
        certified.push(*id);
        let s = cert.spectral_bound.expect("certified models have a spectral bound");
        eigen_gap = eigen_gap.max(dist_to(c(s, 0.0), &eigenvalues(&a)?));
        // Offsets stay clear of the resolvent's refusal radius, which is large for stiff models.
        let floor = 10.0 * singular_tol(&a);
        let schedule: Vec<f64> = (0..=20).map(|k| 0.5f64.powi(k)).filter(|d| *d > floor).map(|d| s + d).collect();
        let trace = asymptotic_positivity_trace(&a, &ComplexVector::ones(a.dim()), &schedule)?;
        traces.push((*id, trace.last().copied().unwrap_or(f64::INFINITY)));
    }
    let worst_trace = traces.iter().map(|t| t.1).fold(0.0, f64::max);
    out.push(check(
        "asymptotic positivity trace below 1e−8",
        worst_trace <= 1e-8 && !traces.is_empty(),
        format!("{} certified models ({}), largest final distance {worst_trace:.1e}", certified.len(), certified.join(", ")),
    ));
    out.push(check("s(A) is an eigenvalue", eigen_gap <= 1e-9, format!("max distance {eigen_gap:.1e}")));
    Ok(out)
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Checks); 11] = [
        (1, "reflection example", criterion_1),
        (2, "rotation triple", criterion_2),
        (3, "resolvent power rate", criterion_3),
        (4, "random equivalence harness", criterion_4),
        (5, "2×2 generators", criterion_5),
        (6, "Dirichlet-to-Neumann family", criterion_6),
        (7, "delay model", criterion_7),
        (8, "squared Robin Laplacian", criterion_8),
        (9, "sequence model", criterion_9),
        (10, "shift-flip model", criterion_10),
        (11, "cross-check suite", criterion_11),
    ];
    let results: Vec<(Checks, f64)> = std::thread::scope(|scope| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|(_, _, run)| {
                scope.spawn(move || {
                    let start = Instant::now();
                    let r = run();
                    (r, start.elapsed().as_secs_f64())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("criterion panicked")).collect()
    });

    let mut unexpected = 0;
    for ((id, name, _), (result, secs)) in criteria.iter().zip(results) {
        match result {
            Ok(checks) => {
                let pass = checks.iter().all(|ch| ch.pass);
                println!("{} criterion {id}: {name} ({secs:.1}s)", if pass { "PASS" } else { "FAIL" });
                for ch in &checks {
                    let known = KNOWN_GAPS.contains(&(*id, ch.label));
                    let tag = match (ch.pass, known) {
                        (true, _) => "ok",
                        (false, true) => "known gap",
                        (false, false) => "FAILED",
                    };
                    println!("    [{tag}] {}: {}", ch.label, ch.detail);
                    unexpected += (!ch.pass && !known) as usize;
                }
            }
            Err(e) => {
                println!("FAIL criterion {id}: {name}: error: {e}");
                unexpected += 1;
            }
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{unexpected} unexpected failure(s)");
        ExitCode::FAILURE
    }
}
