use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use super::cone::{classify_matrix, classify_real, ConeClass, ConeMargins};
use super::pf::{check_projection_pf_with, ProjectionPfCheck};
use super::resolvent_tests::trailing_run;
use crate::error::{Error, Result};
use crate::json;
use crate::matrix::{eig, expm_real, norm_inf_real, resolvent_real, ComplexVector, EigenSystem, SquareOperator};
use crate::spectral::{spectrum_report_from, SpectrumReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Positive,
    EventuallyStronglyPositive,
    EventuallyPositive,
    NotEventuallyPositive,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Positive => "Positive",
            Verdict::EventuallyStronglyPositive => "EventuallyStronglyPositive",
            Verdict::EventuallyPositive => "EventuallyPositive",
            Verdict::NotEventuallyPositive => "NotEventuallyPositive",
            Verdict::Inconclusive => "Inconclusive",
        }
    }
}

/// Outcome of one sub-test; `holds` is `None` when the test was not applicable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionResult {
    pub holds: Option<bool>,
    pub detail: String,
}

impl ConditionResult {
    fn skipped(why: &str) -> Self {
        ConditionResult { holds: None, detail: why.to_string() }
    }

    fn of(holds: bool, detail: String) -> Self {
        ConditionResult { holds: Some(holds), detail }
    }
}

/// The equivalent characterizations of eventual strong positivity, plus the
/// corroborating trajectory sample.
#[derive(Debug, Clone, Serialize)]
pub struct Conditions {
    /// `R(λ, A)e_j ≫ 0` for every basis vector and all sampled `λ ↓ s(A)`.
    pub resolvent_individual: ConditionResult,
    /// `s(A)` geometrically simple with `u ≫ 0` and `v ≫ 0`.
    pub eigenvectors: ConditionResult,
    /// `P ≫ 0`, `s(A)` dominant, and the shifted semigroup bounded on the grid.
    pub projection: ConditionResult,
    /// `(A + cI)^k ≫ 0` on a verified tail of `k`.
    pub power_method: ConditionResult,
    /// `e^{t(A − s)} ≫ 0` on a trailing stretch of the sampled times.
    pub trajectory: ConditionResult,
}

impl Conditions {
    /// Resolvent, eigenvector, projection, power-method and trajectory outcomes, in that order.
    pub fn strong_flags(&self) -> [Option<bool>; 5] {
        [
            self.resolvent_individual.holds,
            self.eigenvectors.holds,
            self.projection.holds,
            self.power_method.holds,
            self.trajectory.holds,
        ]
    }
}

/// A vector `f ≥ 0` and a time `t` with `e^{tA}f` outside the cone.
#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryWitness {
    #[serde(serialize_with = "json::vector")]
    pub f: ComplexVector,
    pub t: f64,
    pub index: usize,
    /// The offending entry of `e^{t(A − shift)}f`, a positive multiple of `e^{tA}f`.
    pub value: f64,
    pub shift: f64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Witnesses {
    /// Latest sampled time at which the trajectory still leaves the cone.
    pub refutation: Option<TrajectoryWitness>,
    /// Earliest sampled negativity; shows that the semigroup is not positive.
    pub transient: Option<TrajectoryWitness>,
    /// Peripheral eigenvalues, when they rule out eventual positivity.
    #[serde(serialize_with = "opt_complex_seq")]
    pub peripheral: Option<Vec<Complex64>>,
    #[serde(serialize_with = "json::opt_vector")]
    pub u: Option<ComplexVector>,
    #[serde(serialize_with = "json::opt_vector")]
    pub v: Option<ComplexVector>,
}

fn opt_complex_seq<S: serde::Serializer>(v: &Option<Vec<Complex64>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => json::complex_seq(v, s),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PositivityCertificate {
    pub verdict: Verdict,
    pub conditions: Conditions,
    pub witnesses: Witnesses,
    pub t0_estimate: Option<f64>,
    pub lambda1_estimate: Option<f64>,
    pub k0_estimate: Option<u64>,
    pub margins: ConeMargins,
    pub dominance_gap: Option<f64>,
    pub spectral_bound: Option<f64>,
    pub pole_order: Option<usize>,
    pub metzler: bool,
    /// Largest `‖e^{t(A − s)}‖_∞` over the sampled times.
    pub transient_bound: Option<f64>,
    pub transient_growth: bool,
    /// Last sampled time; the trajectory claims cover `[t0, t_end]`.
    pub t_end: Option<f64>,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone, Default)]
pub struct CertifyOptions {
    /// Sample times; defaults to [`default_t_grid`] on `[1e−3, t_max]`.
    pub t_grid: Option<Vec<f64>>,
    pub t_max: Option<f64>,
    /// Extra time beyond the grid over which `t0` must persist; defaults to `20/gap`.
    pub horizon: Option<f64>,
    /// Offsets `λ − s(A)`, strictly decreasing, for the resolvent test.
    pub lambda_offsets: Option<Vec<f64>>,
}

pub const DEFAULT_T_MAX: f64 = 50.0;
pub const MAX_HORIZON: f64 = 1e4;
const GRID_POINTS: usize = 200;
const MAX_SQUARINGS: usize = 60;
const POWER_TAIL: u64 = 64;

/// `count` log-spaced points in `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![hi];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count).map(|k| (a + (b - a) * k as f64 / (count - 1) as f64).exp()).collect()
}

pub fn default_t_grid(t_max: f64) -> Vec<f64> {
    log_grid(1e-3, t_max, GRID_POINTS)
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() || grid[0] <= 0.0 || grid.windows(2).any(|w| w[1] <= w[0]) || grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidInput("t grid must be positive, finite and strictly increasing".into()));
    }
    Ok(())
}

/// Append geometric steps (ratio of the last two points) until `end` is covered.
fn extend_grid(mut grid: Vec<f64>, end: f64) -> Vec<f64> {
    let last = *grid.last().expect("validated grid is nonempty");
    if end <= last {
        return grid;
    }
    let ratio = if grid.len() >= 2 { (last / grid[grid.len() - 2]).max(1.01) } else { 1.05 };
    let mut t = last;
    while t < end {
        t = (t * ratio).min(end);
        grid.push(t);
    }
    grid
}

struct Sample {
    t: f64,
    class: ConeClass,
    norm: f64,
    /// Most negative entry `(value, i, j)` of the shifted exponential.
    most_negative: (f64, usize, usize),
}

fn most_negative(m: &DMatrix<f64>) -> (f64, usize, usize) {
    let mut best = (f64::INFINITY, 0, 0);
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if m[(i, j)] < best.0 {
                best = (m[(i, j)], i, j);
            }
        }
    }
    best
}

/// Sample `e^{tB}` along the grid, stepping with `e^{(t_{k+1} − t_k)B}`.
fn scan_trajectory(b: &DMatrix<f64>, grid: &[f64], m: &ConeMargins) -> Result<Vec<Sample>> {
    let mut out = Vec::with_capacity(grid.len());
    let mut prev_t = 0.0;
    let mut e = DMatrix::<f64>::identity(b.nrows(), b.ncols());
    for &t in grid {
        e = expm_real(b, t - prev_t)? * e;
        prev_t = t;
        out.push(Sample { t, class: classify_matrix(&e, m), norm: norm_inf_real(&e), most_negative: most_negative(&e) });
    }
    Ok(out)
}

/// A witness is kept only if direct re-evaluation of `e^{t(A − shift)}e_j` confirms it.
/// The shift only rescales, so signs are those of `e^{tA}e_j` without the overflow.
pub(crate) fn confirm_witness(shifted: &DMatrix<f64>, shift: f64, t: f64, j: usize, m: &ConeMargins) -> Result<Option<TrajectoryWitness>> {
    let n = shifted.nrows();
    let col: DVector<f64> = expm_real(shifted, t)?.column(j).into_owned();
    if classify_real(col.as_slice(), m) != ConeClass::NotPositive {
        return Ok(None);
    }
    let (index, value) = col.iter().copied().enumerate().fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
    Ok(Some(TrajectoryWitness { f: ComplexVector::basis(n, j), t, index, value, shift }))
}

fn first_confirmed<'a>(
    shifted: &DMatrix<f64>,
    shift: f64,
    samples: impl Iterator<Item = &'a Sample>,
    m: &ConeMargins,
) -> Result<Option<TrajectoryWitness>> {
    for s in samples.filter(|s| s.class == ConeClass::NotPositive) {
        if let Some(w) = confirm_witness(shifted, shift, s.t, s.most_negative.2, m)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// The shift `c` for the power method: the larger of the explicit bound
/// `2·max|Im μ| + (s − min Re μ)` and the smallest disc shift with 10% slack.
/// `shifted` holds the eigenvalues of `A − s`, with the dominant one at 0.
pub fn power_shift(shifted: &[Complex64], dominant_tol: f64) -> f64 {
    let others: Vec<Complex64> = shifted.iter().copied().filter(|z| z.norm() > dominant_tol).collect();
    let max_im = others.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let min_re = others.iter().map(|z| z.re).fold(0.0, f64::min);
    let explicit = (2.0 * max_im - min_re).max(0.0);
    let disc = others
        .iter()
        .filter(|z| z.re < 0.0)
        .map(|z| 1.1 * z.norm_sqr() / (-2.0 * z.re))
        .fold(0.0, f64::max);
    let c = explicit.max(disc);
    if c > 0.0 {
        c
    } else {
        1.0
    }
}

struct PowerOutcome {
    holds: bool,
    k0: Option<u64>,
    detail: String,
}

fn normalize(m: DMatrix<f64>) -> DMatrix<f64> {
    let s = m.amax();
    if s > 0.0 {
        m / s
    } else {
        m
    }
}

/// Repeated squaring of `(A − s + cI)/c`, then a verified run of consecutive powers.
fn power_method(shifted_a: &DMatrix<f64>, c: f64, contraction: f64, m: &ConeMargins) -> PowerOutcome {
    if !(contraction < 1.0) {
        return PowerOutcome { holds: false, k0: None, detail: format!("disc condition fails (ratio {contraction:.3e})") };
    }
    let n = shifted_a.nrows();
    let b = normalize(shifted_a + DMatrix::<f64>::identity(n, n) * c);
    let mut powers = vec![b.clone()];
    let mut converged = false;
    for _ in 0..MAX_SQUARINGS {
        let last = powers.last().expect("nonempty");
        let next = normalize(last * last);
        let delta = (&next - last).amax();
        powers.push(next);
        if delta <= 1e-13 {
            converged = true;
            break;
        }
    }
    let flags: Vec<bool> = powers.iter().map(|p| classify_matrix(p, m).is_strong()).collect();
    let Some(j0) = trailing_run(&flags).filter(|_| converged) else {
        let detail = if converged { "normalized powers converge to a matrix that is not ≫ 0" } else { "normalized powers did not converge" };
        return PowerOutcome { holds: false, k0: None, detail: detail.into() };
    };
    // Consecutive exponents 2^{j0} .. 2^{j0} + POWER_TAIL.
    let mut p = powers[j0].clone();
    for step in 1..=POWER_TAIL {
        p = normalize(&p * &b);
        if !classify_matrix(&p, m).is_strong() {
            return PowerOutcome {
                holds: false,
                k0: None,
                detail: format!("power 2^{j0}+{step} is not ≫ 0"),
            };
        }
    }
    let k0 = 1u64 << j0.min(63);
    PowerOutcome { holds: true, k0: Some(k0), detail: format!("c = {c:.6e}, ratio {contraction:.6e}, k0 = {k0}") }
}

fn inconclusive(m: &ConeMargins, why: String) -> PositivityCertificate {
    PositivityCertificate {
        verdict: Verdict::Inconclusive,
        conditions: Conditions {
            resolvent_individual: ConditionResult::skipped("not evaluated"),
            eigenvectors: ConditionResult::skipped("not evaluated"),
            projection: ConditionResult::skipped("not evaluated"),
            power_method: ConditionResult::skipped("not evaluated"),
            trajectory: ConditionResult::skipped("not evaluated"),
        },
        witnesses: Witnesses::default(),
        t0_estimate: None,
        lambda1_estimate: None,
        k0_estimate: None,
        margins: *m,
        dominance_gap: None,
        spectral_bound: None,
        pole_order: None,
        metzler: false,
        transient_bound: None,
        transient_growth: false,
        t_end: None,
        diagnostics: vec![why],
    }
}

/// Decide eventual (strong) positivity of `e^{tA}` for a real matrix `A`.
///
/// Numerical failures never produce a verdict; they come back as `Inconclusive` with
/// the error in `diagnostics`. Only non-real input is an error.
pub fn certify_matrix_semigroup(a: &SquareOperator, m: &ConeMargins, opts: &CertifyOptions) -> Result<PositivityCertificate> {
    if !a.is_real() {
        return Err(Error::InvalidInput("certification needs a real matrix".into()));
    }
    let t_max = opts.t_max.unwrap_or(DEFAULT_T_MAX);
    let grid = opts.t_grid.clone().unwrap_or_else(|| default_t_grid(t_max));
    validate_grid(&grid)?;
    if let Some(off) = &opts.lambda_offsets {
        if off.is_empty() || off.iter().any(|&d| !(d > 0.0) || !d.is_finite()) || off.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidInput("λ offsets must be positive and strictly decreasing".into()));
        }
    }
    match certify_inner(a, m, opts, grid) {
        Ok(c) => Ok(c),
        Err(e) => Ok(inconclusive(m, format!("numerical failure: {e}"))),
    }
}

fn certify_inner(a: &SquareOperator, m: &ConeMargins, opts: &CertifyOptions, grid: Vec<f64>) -> Result<PositivityCertificate> {
    let es = eig(a)?;
    let report = spectrum_report_from(a, &es);
    let s = report.spectral_bound;
    let gap = report.dominance_gap;
    let ar = a.real_part();
    let n = a.dim();
    let (metzler_tol, _) = m.resolve(a.max_abs());
    let metzler = a.is_metzler(metzler_tol);
    let mut diagnostics = Vec::new();

    let horizon = opts.horizon.unwrap_or_else(|| gap.map_or(0.0, |g| (20.0 / g).min(MAX_HORIZON)));
    let base_end = *grid.last().expect("validated grid is nonempty");
    let grid = extend_grid(grid, base_end + horizon);
    let shifted = &ar - DMatrix::<f64>::identity(n, n) * s;
    let samples = scan_trajectory(&shifted, &grid, m)?;
    let t_end = samples.last().map(|x| x.t);
    let transient_bound = samples.iter().map(|x| x.norm).fold(0.0, f64::max);

    let mut cert = PositivityCertificate {
        verdict: Verdict::Inconclusive,
        conditions: Conditions {
            resolvent_individual: ConditionResult::skipped("s(A) is not dominant"),
            eigenvectors: ConditionResult::skipped("s(A) is not dominant"),
            projection: ConditionResult::skipped("s(A) is not dominant"),
            power_method: ConditionResult::skipped("s(A) is not dominant"),
            trajectory: trajectory_condition(&samples, base_end, &mut None),
        },
        witnesses: Witnesses {
            transient: first_confirmed(&shifted, s, samples.iter(), m)?,
            ..Witnesses::default()
        },
        t0_estimate: None,
        lambda1_estimate: None,
        k0_estimate: None,
        margins: *m,
        dominance_gap: gap,
        spectral_bound: Some(s),
        pole_order: None,
        metzler,
        transient_bound: Some(transient_bound),
        transient_growth: false,
        t_end,
        diagnostics: Vec::new(),
    };

    if !report.dominant {
        let strip = report.tol_profile.strip_tol;
        if report.peripheral.iter().any(|c| c.value.im.abs() > strip) {
            cert.verdict = Verdict::NotEventuallyPositive;
            cert.witnesses.peripheral = Some(report.peripheral.iter().map(|c| c.value).collect());
            cert.witnesses.refutation = first_confirmed(&shifted, s, samples.iter().rev(), m)?;
            diagnostics.push("peripheral spectrum contains non-real eigenvalues".into());
        } else {
            diagnostics.push("peripheral spectrum could not be resolved into a dominant eigenvalue".into());
        }
        cert.diagnostics = diagnostics;
        return Ok(cert);
    }

    let pf = check_projection_pf_with(a, &es, s, m)?;
    let pole_order = pf.projection.pole_order;
    cert.pole_order = Some(pole_order);
    if pole_order > 1 {
        let why = format!("s(A) is a pole of order {pole_order}");
        for c in [
            &mut cert.conditions.resolvent_individual,
            &mut cert.conditions.eigenvectors,
            &mut cert.conditions.projection,
            &mut cert.conditions.power_method,
        ] {
            *c = ConditionResult::skipped(&why);
        }
        diagnostics.push(format!("s(A) = {s} is a pole of order {pole_order}; the shifted semigroup is unbounded"));
        if metzler {
            diagnostics.push("A is Metzler, so e^{tA} ≥ 0 for all t, but the spectral tests do not apply".into());
        }
        cert.diagnostics = diagnostics;
        return Ok(cert);
    }

    let p_norm = norm_inf_real(&pf.projection.p.real_part());
    let last_norm = samples.last().map_or(0.0, |x| x.norm);
    cert.transient_growth = last_norm > 1.1 * p_norm + 1e-6;
    if cert.transient_growth {
        diagnostics.push(format!("‖e^{{t(A−s)}}‖ = {last_norm:.3e} at the last sample exceeds ‖P‖ = {p_norm:.3e}"));
    }

    let evidence = strong_conditions(&ar, &es, &report, &pf, cert.transient_growth, m, opts, &mut diagnostics)?;
    cert.conditions = evidence.conditions;
    cert.k0_estimate = evidence.k0;
    cert.lambda1_estimate = evidence.lambda1;
    let mut t0 = None;
    cert.conditions.trajectory = trajectory_condition(&samples, base_end, &mut t0);
    cert.t0_estimate = t0;
    cert.witnesses.u = pf.u.clone();
    cert.witnesses.v = pf.v.clone();

    let flags = cert.conditions.strong_flags();
    let all_true = flags.iter().all(|f| *f == Some(true));
    let all_false = flags.iter().all(|f| *f == Some(false));
    if all_true {
        cert.verdict = if metzler { Verdict::Positive } else { Verdict::EventuallyStronglyPositive };
    } else if all_false {
        decide_weak(&mut cert, &shifted, s, &pf, &samples, metzler, m, &mut diagnostics)?;
    } else {
        diagnostics.push(format!("strong conditions disagree: {flags:?}"));
    }
    if cert.verdict != Verdict::EventuallyStronglyPositive && cert.verdict != Verdict::Positive {
        cert.t0_estimate = None;
        cert.k0_estimate = None;
        cert.lambda1_estimate = None;
    }
    cert.diagnostics = diagnostics;
    Ok(cert)
}

/// Trajectory test: strongly positive on a trailing stretch that starts within the base grid.
fn trajectory_condition(samples: &[Sample], base_end: f64, t0: &mut Option<f64>) -> ConditionResult {
    let flags: Vec<bool> = samples.iter().map(|x| x.class.is_strong()).collect();
    match trailing_run(&flags) {
        Some(i) if samples[i].t <= base_end => {
            *t0 = Some(samples[i].t);
            ConditionResult::of(true, format!("≫ 0 on all samples from t = {:.6e}", samples[i].t))
        }
        Some(i) => ConditionResult::of(false, format!("≫ 0 only from t = {:.6e}, beyond the base grid", samples[i].t)),
        None => ConditionResult::of(false, "not ≫ 0 at the last sampled time".into()),
    }
}

struct StrongEvidence {
    conditions: Conditions,
    k0: Option<u64>,
    lambda1: Option<f64>,
}

fn strong_conditions(
    ar: &DMatrix<f64>,
    es: &EigenSystem,
    report: &SpectrumReport,
    pf: &ProjectionPfCheck,
    transient_growth: bool,
    m: &ConeMargins,
    opts: &CertifyOptions,
    diagnostics: &mut Vec<String>,
) -> Result<StrongEvidence> {
    let s = report.spectral_bound;
    let n = ar.nrows();
    if !pf.agree {
        diagnostics.push("projection, eigenvector and range tests disagree".into());
    }

    let eigenvectors = ConditionResult::of(
        pf.geo_simple_with_pos_vectors,
        format!("geo_mult = {}, alg_mult = {}", pf.projection.geo_mult, pf.projection.alg_mult),
    );
    let projection = ConditionResult::of(
        pf.p_strongly_positive && !transient_growth,
        format!("P classified {:?}; transient growth {}", pf.p_class, transient_growth),
    );

    // Resolvent: basis vectors along λ = s + offsets.
    let offsets = match &opts.lambda_offsets {
        Some(o) => o.clone(),
        None => default_offsets(report.dominance_gap, s, report.tol_profile.singular_tol),
    };
    let mut flags = vec![Vec::with_capacity(offsets.len()); n];
    for &d in &offsets {
        let r = resolvent_real(ar, s + d)?;
        for (j, f) in flags.iter_mut().enumerate() {
            f.push(classify_real(r.column(j).as_slice(), m).is_strong());
        }
    }
    let lambda1: Vec<Option<f64>> = flags.iter().map(|f| trailing_run(f).map(|i| s + offsets[i])).collect();
    let passing = lambda1.iter().filter(|x| x.is_some()).count();
    let res_ok = passing == n;
    let resolvent_individual =
        ConditionResult::of(res_ok, format!("{passing}/{n} basis vectors pass at {} offsets", offsets.len()));

    // Power method on A − s + cI.
    let dominant_tol = report.tol_profile.strip_tol.max(es.cluster_tol);
    let shifted_vals: Vec<Complex64> = es.eigenvalues.iter().map(|z| z - s).collect();
    let c = power_shift(&shifted_vals, dominant_tol);
    let contraction = shifted_vals
        .iter()
        .filter(|z| z.norm() > dominant_tol)
        .map(|z| (z + c).norm() / c)
        .fold(0.0, f64::max);
    let shifted = ar - DMatrix::<f64>::identity(n, n) * s;
    let pw = power_method(&shifted, c, contraction, m);

    Ok(StrongEvidence {
        conditions: Conditions {
            resolvent_individual,
            eigenvectors,
            projection,
            power_method: ConditionResult::of(pw.holds, pw.detail),
            trajectory: ConditionResult::skipped("set by the trajectory scan"),
        },
        k0: pw.k0,
        lambda1: if res_ok { lambda1.into_iter().flatten().reduce(f64::min) } else { None },
    })
}

/// Offsets `λ − s` for the resolvent test: halvings of `min(gap, 1)`, stopping well
/// outside the radius in which resolvents are refused as singular.
fn default_offsets(gap: Option<f64>, s: f64, singular_tol: f64) -> Vec<f64> {
    let width = gap.map_or(1.0, |g| g.min(1.0));
    let floor = (1e-8 * s.abs().max(1.0)).max(10.0 * singular_tol);
    let v: Vec<f64> = (0..=30).map(|k| width * 0.5f64.powi(k)).take_while(|&d| d >= floor).collect();
    if v.len() < 3 {
        vec![width, width / 2.0, width / 4.0]
    } else {
        v
    }
}

fn decide_weak(
    cert: &mut PositivityCertificate,
    shifted: &DMatrix<f64>,
    s: f64,
    pf: &ProjectionPfCheck,
    samples: &[Sample],
    metzler: bool,
    m: &ConeMargins,
    diagnostics: &mut Vec<String>,
) -> Result<()> {
    if pf.p_class.is_positive() {
        let flags: Vec<bool> = samples.iter().map(|x| x.class.is_positive()).collect();
        if metzler {
            cert.verdict = Verdict::Positive;
        } else if trailing_run(&flags).is_some() {
            cert.verdict = Verdict::EventuallyPositive;
        } else {
            diagnostics.push("P ≥ 0 but the sampled trajectory is not eventually ≥ 0".into());
        }
        return Ok(());
    }
    // P has a negative entry: e^{t(A−s)} → P, so late samples refute positivity.
    match first_confirmed(shifted, s, samples.iter().rev(), m)? {
        Some(w) => {
            cert.verdict = Verdict::NotEventuallyPositive;
            cert.witnesses.refutation = Some(w);
        }
        None => diagnostics.push("P is not ≥ 0 but no sampled trajectory confirms negativity".into()),
    }
    Ok(())
}
