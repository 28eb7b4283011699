use evpos::certify::{
    asymptotic_positivity_trace, certify_matrix_semigroup, log_grid, resolvent_power_projection, CertifyOptions,
    ConeMargins, PositivityCertificate, Verdict, DEFAULT_STRICT_MARGIN, DEFAULT_ZERO_TOL,
};
use evpos::json;
use evpos::matrix::{expm_real, norm_inf_real, read_matrix_file, ComplexVector, SquareOperator};
use evpos::models::dtn::{default_fejer_times, dirichlet_window, dtn_sweep_row, lambda_star_bracket, SweepRow};
use evpos::models::{ModelParams, ModelSpec};
use evpos::spectral::{spectral_projection, spectrum_report, SpectralProjectionResult, SpectrumReport};
use evpos::{Complex64, Error};
use rayon::prelude::*;
use serde::Serialize;

use crate::output::{emit, json_string, num, opt_num, CliError, CliResult, Table};
use crate::{AnalyzeArgs, CertifyArgs, Format, InputArgs, MarginArgs, SweepArgs, Target, TraceArgs, TraceKind};

/// A generator together with where it came from.
pub struct Resolved {
    pub label: String,
    pub spec: Option<ModelSpec>,
    pub a: SquareOperator,
}

pub fn model_params(input: &InputArgs) -> ModelParams {
    ModelParams {
        mu: input.mu,
        n: input.n,
        lambda: input.lambda,
        modes: input.modes,
        m_grid: input.m_grid,
        beta: input.beta,
    }
}

pub fn resolve(input: &InputArgs) -> CliResult<Resolved> {
    match (&input.model, &input.matrix) {
        (Some(id), None) => {
            let spec = ModelSpec::from_id(id, &model_params(input))?;
            let a = spec.generator()?;
            Ok(Resolved { label: id.clone(), spec: Some(spec), a })
        }
        (None, Some(path)) => {
            let a = read_matrix_file(path)?;
            Ok(Resolved { label: path.display().to_string(), spec: None, a })
        }
        _ => Err(CliError::Usage("exactly one of --model or --matrix is required".into())),
    }
}

pub fn parse_list(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>().map_err(|_| CliError::Usage(format!("not a number in list: {t:?}")))
        })
        .collect()
}

pub fn margins(args: &MarginArgs) -> CliResult<ConeMargins> {
    let z = args.zero_tol.unwrap_or(DEFAULT_ZERO_TOL);
    let s = args.strict_margin.unwrap_or(DEFAULT_STRICT_MARGIN);
    Ok(if args.absolute_margins { ConeMargins::absolute(z, s)? } else { ConeMargins::relative(z, s)? })
}

#[derive(Serialize)]
struct AnalyzeReport<'a> {
    input: &'a str,
    model: &'a Option<ModelSpec>,
    spectrum: &'a SpectrumReport,
    projection: Option<&'a SpectralProjectionResult>,
    projection_error: Option<String>,
}

pub fn analyze(args: &AnalyzeArgs) -> CliResult<u8> {
    let r = resolve(&args.input)?;
    let report = spectrum_report(&r.a)?;
    let projection = spectral_projection(&r.a, Complex64::new(report.spectral_bound, 0.0));
    let text = match args.output.format {
        Format::Json => {
            let (projection, projection_error) = match &projection {
                Ok(p) => (Some(p), None),
                Err(e) => (None, Some(e.to_string())),
            };
            json_string(&AnalyzeReport { input: &r.label, model: &r.spec, spectrum: &report, projection, projection_error })?
        }
        Format::Csv => {
            let mut t = Table::new(&["re", "im", "alg_mult", "geo_mult", "peripheral"]);
            for c in &report.clusters {
                let peripheral = report.peripheral.iter().any(|p| p.value == c.value);
                t.push(vec![num(c.value.re), num(c.value.im), c.alg_mult.to_string(), c.geo_mult.to_string(), peripheral.to_string()]);
            }
            t.render()?
        }
    };
    emit(&text, args.output.out.as_deref())?;
    Ok(0)
}

pub fn verdict_exit(v: Verdict, target: Target) -> u8 {
    match v {
        Verdict::Positive | Verdict::EventuallyStronglyPositive => 0,
        Verdict::EventuallyPositive if target == Target::Eventual => 0,
        Verdict::Inconclusive => 2,
        _ => 1,
    }
}

#[derive(Serialize)]
pub struct CertifyReport<'a> {
    pub input: &'a str,
    pub model: &'a Option<ModelSpec>,
    pub certificate: &'a PositivityCertificate,
}

pub fn certificate_table(c: &PositivityCertificate) -> Table {
    let mut t = Table::new(&["condition", "holds", "detail"]);
    let conds = &c.conditions;
    for (name, r) in [
        ("resolvent_individual", &conds.resolvent_individual),
        ("eigenvectors", &conds.eigenvectors),
        ("projection", &conds.projection),
        ("power_method", &conds.power_method),
        ("trajectory", &conds.trajectory),
    ] {
        t.push(vec![name.into(), r.holds.map(|b| b.to_string()).unwrap_or_default(), r.detail.clone()]);
    }
    t.push(vec!["verdict".into(), String::new(), c.verdict.as_str().into()]);
    t
}

pub fn certify(args: &CertifyArgs) -> CliResult<u8> {
    let r = resolve(&args.input)?;
    let m = margins(&args.margins)?;
    let opts = CertifyOptions {
        t_max: args.t_max,
        lambda_offsets: args.lambda_schedule.as_deref().map(parse_list).transpose()?,
        ..Default::default()
    };
    let cert = certify_matrix_semigroup(&r.a, &m, &opts)?;
    let text = match args.output.format {
        Format::Json => json_string(&CertifyReport { input: &r.label, model: &r.spec, certificate: &cert })?,
        Format::Csv => certificate_table(&cert).render()?,
    };
    emit(&text, args.output.out.as_deref())?;
    eprintln!("verdict: {}", cert.verdict.as_str());
    Ok(verdict_exit(cert.verdict, args.target))
}

/// Sweep grid `lo + (hi − lo)k/steps`, endpoints included.
pub fn sweep_grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    (0..=steps).map(|k| lo + (hi - lo) * k as f64 / steps as f64).collect()
}

pub fn sweep_table(rows: &[SweepRow]) -> Table {
    let mut t = Table::new(&[
        "lambda",
        "mu0",
        "mu1",
        "mu2",
        "mu3",
        "dominance_gap",
        "derivative_at_pi",
        "first_nonneg_t",
        "positivity_flag",
        "status",
    ]);
    for r in rows {
        let mut row = vec![num(r.lambda)];
        match r.mu {
            Some(mu) => row.extend(mu.iter().map(|&v| num(v))),
            None => row.extend(std::iter::repeat_n(String::new(), 4)),
        }
        row.push(opt_num(r.dominance_gap));
        row.push(opt_num(r.derivative_at_pi));
        row.push(opt_num(r.first_nonneg_t));
        row.push(r.positivity_flag.map(|b| b.to_string()).unwrap_or_default());
        row.push(r.status.clone());
        t.push(row);
    }
    t
}

fn thread_pool() -> CliResult<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("EVPOS_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Usage(format!("EVPOS_THREADS must be a positive integer, got {v:?}")))?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| CliError::Usage(format!("cannot start thread pool: {e}")))
}

pub fn run_sweep(lambdas: &[f64], modes: usize, m_grid: usize, zero_tol: f64) -> CliResult<Vec<SweepRow>> {
    let times = default_fejer_times();
    let pool = thread_pool()?;
    // Indexed collect keeps the rows in λ order regardless of scheduling.
    let rows = pool.install(|| {
        lambdas
            .par_iter()
            .map(|&l| dtn_sweep_row(l, modes, m_grid, &times, zero_tol))
            .collect::<Result<Vec<_>, Error>>()
    })?;
    Ok(rows)
}

#[derive(Serialize)]
struct SweepReport<'a> {
    window: (f64, f64),
    bracket: Option<(f64, f64)>,
    rows: &'a [SweepRow],
}

pub fn sweep_dtn(args: &SweepArgs) -> CliResult<u8> {
    let window = dirichlet_window()?;
    let lo = args.lambda_min.unwrap_or(window.0);
    let hi = args.lambda_max.unwrap_or(window.1);
    if !(lo > 0.0 && hi > lo && lo.is_finite() && hi.is_finite()) || args.steps == 0 {
        return Err(CliError::Usage(format!("need 0 < lambda-min < lambda-max and steps >= 1, got [{lo}, {hi}] with {}", args.steps)));
    }
    let zero_tol = args.zero_tol.unwrap_or(DEFAULT_ZERO_TOL);
    if !(zero_tol > 0.0) {
        return Err(CliError::Usage("zero-tol must be positive".into()));
    }
    let rows = run_sweep(&sweep_grid(lo, hi, args.steps), args.modes, args.m_grid, zero_tol)?;
    let bracket = lambda_star_bracket(&rows);
    match bracket {
        Some((a, b)) => eprintln!("lambda* bracket: [{}, {}] width {:.3e}", num(a), num(b), b - a),
        None => eprintln!("lambda* bracket: none found"),
    }
    let text = match args.output.format {
        Format::Csv => sweep_table(&rows).render()?,
        Format::Json => json_string(&SweepReport { window, bracket, rows: &rows })?,
    };
    emit(&text, args.output.out.as_deref())?;
    Ok(0)
}

/// Extreme entries of `e^{tA}` and the norms of `e^{tA}` and `e^{t(A − s)}`.
pub fn semigroup_table(a: &SquareOperator, times: &[f64]) -> CliResult<Table> {
    if !a.is_real() {
        return Err(Error::InvalidInput("semigroup trace needs a real generator".into()).into());
    }
    let s = spectrum_report(a)?.spectral_bound;
    let real = a.real_part();
    let mut shifted = real.clone();
    for i in 0..a.dim() {
        shifted[(i, i)] -= s;
    }
    let mut t = Table::new(&["t", "min_entry", "max_entry", "norm", "shifted_norm"]);
    for &tt in times {
        let e = expm_real(&real, tt)?;
        let es = expm_real(&shifted, tt)?;
        t.push(vec![num(tt), num(e.min()), num(e.max()), num(norm_inf_real(&e)), num(norm_inf_real(&es))]);
    }
    Ok(t)
}

#[derive(Serialize)]
struct PowerTraceReport {
    lambda: f64,
    spectral_bound: Option<f64>,
    rate: Option<f64>,
    converged: bool,
    trace: Vec<f64>,
}

#[derive(Serialize)]
struct AsymptoticReport {
    #[serde(serialize_with = "json::vector")]
    f: ComplexVector,
    spectral_bound: f64,
    offsets: Vec<f64>,
    distance: Vec<f64>,
}

pub fn default_asymptotic_offsets() -> Vec<f64> {
    (0..=20).map(|k| 0.5f64.powi(k)).collect()
}

pub fn trace(args: &TraceArgs) -> CliResult<u8> {
    let r = resolve(&args.input)?;
    let text = match args.kind {
        TraceKind::Semigroup => {
            if args.points < 2 {
                return Err(CliError::Usage("need at least 2 points".into()));
            }
            let t_max = args.t_max.unwrap_or(10.0);
            if !(t_max > 1e-3) {
                return Err(CliError::Usage("t-max must exceed 1e-3".into()));
            }
            let table = semigroup_table(&r.a, &log_grid(1e-3, t_max, args.points))?;
            match args.output.format {
                Format::Csv => table.render()?,
                Format::Json => json_string(&table.rows)?,
            }
        }
        TraceKind::PowerProjection => {
            let lambda = match args.at {
                Some(l) => l,
                None => spectrum_report(&r.a)?.spectral_bound + 1.0,
            };
            let report = match resolvent_power_projection(&r.a, lambda, args.steps) {
                Ok(p) => PowerTraceReport { lambda, spectral_bound: Some(p.spectral_bound), rate: Some(p.rate), converged: true, trace: p.trace },
                Err(Error::NoConvergence { trace }) => PowerTraceReport { lambda, spectral_bound: None, rate: None, converged: false, trace },
                Err(e) => return Err(e.into()),
            };
            match args.output.format {
                Format::Csv => {
                    let mut t = Table::new(&["n", "deviation"]);
                    for (i, d) in report.trace.iter().enumerate() {
                        t.push(vec![(i + 1).to_string(), num(*d)]);
                    }
                    t.render()?
                }
                Format::Json => json_string(&report)?,
            }
        }
        TraceKind::Asymptotic => {
            let n = r.a.dim();
            let f = match args.vector_index {
                Some(j) if j < n => ComplexVector::basis(n, j),
                Some(j) => return Err(CliError::Usage(format!("vector index {j} out of range for dimension {n}"))),
                None => ComplexVector::ones(n),
            };
            let offsets = match &args.lambda_schedule {
                Some(s) => parse_list(s)?,
                None => default_asymptotic_offsets(),
            };
            let s = spectrum_report(&r.a)?.spectral_bound;
            let schedule: Vec<f64> = offsets.iter().map(|o| s + o).collect();
            let distance = asymptotic_positivity_trace(&r.a, &f, &schedule)?;
            match args.output.format {
                Format::Csv => {
                    let mut t = Table::new(&["offset", "lambda", "distance"]);
                    for ((o, l), d) in offsets.iter().zip(&schedule).zip(&distance) {
                        t.push(vec![num(*o), num(*l), num(*d)]);
                    }
                    t.render()?
                }
                Format::Json => json_string(&AsymptoticReport { f, spectral_bound: s, offsets, distance })?,
            }
        }
    };
    emit(&text, args.output.out.as_deref())?;
    Ok(0)
}
