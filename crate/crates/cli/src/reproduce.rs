//! One deterministic report bundle per gallery model.

use std::fs;

use evpos::certify::{
    certify_matrix_semigroup, classify_matrix, geometric_schedule, laplace_crosscheck, log_grid,
    resolvent_eventual_positivity, resolvent_power_projection, square_generator_certify, CertifyOptions, ConeMargins,
    PositivityCertificate, ResolventMode, Strength,
};
use evpos::matrix::{eigenvalues, expm_real, norm_inf_real, ComplexVector, SquareOperator};
use evpos::models::delay::{argument_principle_count, characteristic, characteristic_reduced, seed_grid};
use evpos::models::dtn::default_fejer_times;
use evpos::models::reflection::{epsilon_threshold, value_at_left_end, FEpsilon};
use evpos::models::sequence::inequality_value;
use evpos::models::{
    build_delay, build_dtn, build_reflection, build_robin_squared, build_rotation, build_sequence, build_shift_flip,
    delay_characteristic_roots, dirichlet_window, dtn_fejer_experiment, ExactEvaluators, ModelParams, ModelSpec,
    RootBox, RotationVariant, MODEL_IDS,
};
use evpos::spectral::{spectral_projection, spectrum_report};
use evpos::Complex64;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::output::{emit, json_string, num, write_file, CliError, CliResult, Table};
use crate::ReproduceArgs;

pub struct Bundle {
    pub id: &'static str,
    pub sections: Map<String, Value>,
    pub traces: Vec<(&'static str, Table)>,
}

impl Bundle {
    fn new(spec: &ModelSpec) -> CliResult<Self> {
        let mut sections = Map::new();
        sections.insert("model".into(), value(spec)?);
        Ok(Bundle { id: spec.id(), sections, traces: Vec::new() })
    }

    fn put<T: Serialize>(&mut self, key: &str, v: &T) -> CliResult<()> {
        self.sections.insert(key.into(), value(v)?);
        Ok(())
    }

    fn trace_file(&self, name: &str) -> String {
        format!("{}_{}.csv", self.id, name)
    }

    /// Bundle with every trace inlined as `{columns, rows}`.
    pub fn to_inline_json(&self) -> CliResult<Value> {
        let mut out = self.sections.clone();
        out.insert("id".into(), Value::from(self.id));
        let traces: Map<String, Value> = self
            .traces
            .iter()
            .map(|(name, t)| (name.to_string(), json!({ "columns": t.header, "rows": t.rows })))
            .collect();
        out.insert("traces".into(), Value::Object(traces));
        Ok(Value::Object(out))
    }

    /// Bundle referring to its traces by file name.
    pub fn to_indexed_json(&self) -> Value {
        let mut out = self.sections.clone();
        out.insert("id".into(), Value::from(self.id));
        let traces: Map<String, Value> =
            self.traces.iter().map(|(name, _)| (name.to_string(), Value::from(self.trace_file(name)))).collect();
        out.insert("traces".into(), Value::Object(traces));
        Value::Object(out)
    }
}

fn value<T: Serialize>(v: &T) -> CliResult<Value> {
    serde_json::to_value(v).map_err(|e| CliError::Serialize(e.to_string()))
}

fn certificate(a: &SquareOperator) -> CliResult<PositivityCertificate> {
    Ok(certify_matrix_semigroup(a, &ConeMargins::default(), &CertifyOptions::default())?)
}

fn base(spec: &ModelSpec, certify: bool) -> CliResult<(Bundle, SquareOperator)> {
    let mut b = Bundle::new(spec)?;
    let a = spec.generator()?;
    b.put("spectrum", &spectrum_report(&a)?)?;
    if certify {
        b.put("certificate", &certificate(&a)?)?;
    }
    Ok((b, a))
}

fn rotation(spec: &ModelSpec) -> CliResult<Bundle> {
    Ok(base(spec, true)?.0)
}

fn rotation_damped(spec: &ModelSpec, mu: f64) -> CliResult<Bundle> {
    let (mut b, a) = base(spec, true)?;
    let p = spectral_projection(&a, Complex64::new(0.0, 0.0))?.p.real_part();
    let real = a.real_part();
    let mut t = Table::new(&["t", "deviation", "bound"]);
    let mut holds = true;
    let mut worst = 0.0f64;
    for tt in std::iter::once(0.0).chain(log_grid(1e-3, 20.0, 200)) {
        let dev = norm_inf_real(&(expm_real(&real, tt)? - &p));
        let bound = 2.0 * (-mu * tt).exp();
        holds &= dev <= bound;
        worst = worst.max(dev / bound);
        t.push(vec![num(tt), num(dev), num(bound)]);
    }
    b.put("projection_decay", &json!({ "bound_holds": holds, "max_ratio": worst }))?;
    b.traces.push(("projection_decay", t));
    Ok(b)
}

fn rotation_shifted(spec: &ModelSpec, mu: f64) -> CliResult<Bundle> {
    let (mut b, a) = base(spec, true)?;
    let dist0 = eigenvalues(&a)?.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    let (_, model) = build_rotation(RotationVariant::Shifted, mu)?;
    let mut t = Table::new(&["lambda", "min_entry"]);
    let mut all_nonneg = true;
    for k in 1..=20 {
        let l = k as f64 / 20.0;
        let m = model.resolvent_min_entry(l)?;
        all_nonneg &= m >= 0.0;
        t.push(vec![num(l), num(m)]);
    }
    let lambda1 = model.resolvent_positivity_limit(1.0)?;

    // With μ < 1/√3 the resolvent stays positive near 0; show it on a smaller shift.
    let demo_mu = 0.25;
    let (_, demo) = build_rotation(RotationVariant::Shifted, demo_mu)?;
    let demo_l1 = demo.resolvent_positivity_limit(10.0)?;
    let demo_mins = match demo_l1 {
        Some(l1) => (1..=20).map(|k| demo.resolvent_min_entry(l1 * k as f64 / 20.0)).collect::<Result<Vec<_>, _>>()?,
        None => Vec::new(),
    };
    b.put(
        "resolvent_positivity",
        &json!({
            "distance_of_zero_to_spectrum": dist0,
            "nonnegative_at_all_samples": all_nonneg,
            "lambda1": lambda1,
            "small_shift": {
                "mu": demo_mu,
                "lambda1": demo_l1,
                "min_entries": demo_mins,
                "nonnegative_at_all_samples": !demo_mins.is_empty() && demo_mins.iter().all(|&m| m >= 0.0),
            },
        }),
    )?;
    b.traces.push(("resolvent_min", t));
    Ok(b)
}

fn reflection(spec: &ModelSpec, n: usize) -> CliResult<Bundle> {
    let (mut b, a) = base(spec, true)?;
    let (_, model) = build_reflection(n)?;
    let real = a.real_part();

    let mut t = Table::new(&["t", "threshold", "epsilon", "continuum_value", "closed_form_value", "grid_value"]);
    let mut rows = Vec::new();
    for tt in [0.5, 1.0, 2.0, 4.0] {
        let thr = epsilon_threshold(tt);
        let eps = 0.5 * thr;
        let cont = FEpsilon::new(eps)?.semigroup_at(tt, -1.0);
        let closed = value_at_left_end(tt, eps);
        // Coarse grids cannot carry a small enough ε at late times.
        let grid = match model.f_eps_grid(eps) {
            Ok(f) => {
                let e = expm_real(&real, tt)?;
                Some(e.row(0).iter().zip(&f).map(|(a, b)| a * b).sum::<f64>())
            }
            Err(_) => None,
        };
        t.push(vec![num(tt), num(thr), num(eps), num(cont), num(closed), grid.map(num).unwrap_or_default()]);
        rows.push(json!({ "t": tt, "threshold": thr, "epsilon": eps, "continuum_value": cont, "grid_value": grid }));
    }
    b.put("non_uniformity", &rows)?;
    b.traces.push(("non_uniformity", t));

    let pp = resolvent_power_projection(&a, 0.5, 40)?;
    let mut t = Table::new(&["n", "deviation", "bound"]);
    for (i, d) in pp.trace.iter().enumerate() {
        let n = (i + 1) as i32;
        t.push(vec![n.to_string(), num(*d), num(1.5 * 3f64.powi(-n))]);
    }
    b.put("power_projection", &json!({ "lambda": 0.5, "rate": pp.rate }))?;
    b.traces.push(("power_projection", t));

    let m = ConeMargins::default();
    let schedule = geometric_schedule(0.0, 1.0, 24);
    let uniform = resolvent_eventual_positivity(&a, 0.0, ResolventMode::Uniform, Strength::Strong, &schedule, &m, &[])?;
    let individual =
        resolvent_eventual_positivity(&a, 0.0, ResolventMode::Individual, Strength::Strong, &schedule, &m, &[])?;
    b.put("resolvent_uniform", &uniform)?;
    b.put("resolvent_individual", &individual)?;
    Ok(b)
}

fn sequence(spec: &ModelSpec, big_n: usize) -> CliResult<Bundle> {
    let (mut b, a) = base(spec, true)?;
    let (_, model) = build_sequence(big_n)?;
    let mut t = Table::new(&["n", "inequality", "exact_entry", "entry_bound"]);
    let mut rows = Vec::new();
    for n in 1..=big_n {
        let ineq = inequality_value(&model, n);
        let f = model.indicator(n as i64);
        let y = model.semigroup_apply(n as f64, &f).expect("sequence model has a semigroup formula")?;
        let entry = y.as_slice()[model.slot(-(n as i64))].re;
        let i = big_n + n;
        let nf = n as f64;
        let bound = 0.5 * (2.0 * model.g[i] + (-nf * model.beta[i]).exp() - (-nf * model.alpha[i]).exp());
        t.push(vec![n.to_string(), num(ineq), num(entry), num(bound)]);
        rows.push(json!({ "n": n, "inequality": ineq, "exact_entry": entry, "entry_bound": bound }));
    }
    let p = spectral_projection(&a, Complex64::new(0.0, 0.0))?;
    let p_err = norm_inf_real(&(p.p.real_part() - model.projection_matrix()));
    b.put("exact_values", &rows)?;
    b.put(
        "projection",
        &json!({
            "strongly_positive": classify_matrix(&p.p.real_part(), &ConeMargins::default()).is_strong(),
            "closed_form_error": p_err,
        }),
    )?;
    b.traces.push(("exact_values", t));
    Ok(b)
}

fn dtn(spec: &ModelSpec, lambda: f64, modes: usize, m_grid: usize) -> CliResult<Bundle> {
    let (mut b, _) = base(spec, true)?;
    let (l3, l4) = dirichlet_window()?;
    let times = default_fejer_times();
    let mut summaries = Vec::new();
    for (label, l) in [("requested", lambda), ("near_upper", l4 - 0.1)] {
        let model = build_dtn(l, modes, m_grid)?;
        let fe = dtn_fejer_experiment(&model, &times, 1e-9)?;
        let min = fe.min_trace.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        summaries.push(json!({
            "label": label,
            "lambda": l,
            "mu": model.mu,
            "dominance_gap": model.dominance_gap(),
            "derivative_at_pi": model.derivative_at_pi(),
            "first_nonneg_t": fe.first_nonneg_t,
            "positive": fe.positive,
            "min": min,
        }));
        if label == "requested" {
            let mut t = Table::new(&["t", "min"]);
            for (tt, m) in &fe.min_trace {
                t.push(vec![num(*tt), num(*m)]);
            }
            b.traces.push(("fejer_min", t));
        }
    }
    b.put("window", &json!({ "lambda3": l3, "lambda4": l4 }))?;
    b.put("fejer", &summaries)?;
    Ok(b)
}

fn delay(spec: &ModelSpec, n: usize) -> CliResult<Bundle> {
    let (mut b, a) = base(spec, true)?;
    let (_, model) = build_delay(n)?;
    let bx = RootBox { re_min: -3.0, re_max: 5.0, im_min: -20.0, im_max: 20.0 };
    let search = delay_characteristic_roots(bx, &seed_grid(bx, 16, 80))?;
    let count_box = RootBox { re_min: -0.1, re_max: 5.0, im_min: -20.0, im_max: 20.0 };
    let count = argument_principle_count(characteristic_reduced, count_box)?;
    let residual_at_zero = characteristic(Complex64::new(0.0, 0.0)).norm();
    let phi_one = model.phi(&vec![1.0; n + 1]);

    let mut t = Table::new(&["source", "re", "im"]);
    for z in &search.roots {
        t.push(vec!["characteristic".into(), num(z.re), num(z.im)]);
    }
    let mut disc = eigenvalues(&a)?;
    disc.retain(|z| bx.contains(*z));
    disc.sort_by(|x, y| y.re.total_cmp(&x.re).then(y.im.total_cmp(&x.im)));
    for z in &disc {
        t.push(vec!["discretized".into(), num(z.re), num(z.im)]);
    }
    b.put(
        "characteristic",
        &json!({
            "box": [bx.re_min, bx.re_max, bx.im_min, bx.im_max],
            "roots": search.roots.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
            "dropped_seeds": search.dropped.len(),
            "residual_at_zero": residual_at_zero,
            "count_box": [count_box.re_min, count_box.re_max, count_box.im_min, count_box.im_max],
            "count_nonnegative_real_part": count,
        }),
    )?;
    b.put("left_functional", &json!({ "phi_of_one": phi_one }))?;
    b.traces.push(("spectrum_overlay", t));
    Ok(b)
}

fn robin_squared(spec: &ModelSpec, n: usize, beta: f64) -> CliResult<Bundle> {
    let mut b = Bundle::new(spec)?;
    let model = build_robin_squared(n, beta)?;
    let sb = spectrum_report(&model.b)?.spectral_bound;
    b.put("b_spectral_bound", &sb)?;
    b.put("spectrum", &spectrum_report(&model.a)?)?;
    b.put("square_certificate", &square_generator_certify(&model.b, &ConeMargins::default())?)?;
    let real = model.a.real_part();
    let mut t = Table::new(&["t", "min_entry", "max_entry"]);
    for tt in log_grid(1e-6, 1.0, 61) {
        let e = expm_real(&real, tt)?;
        let (lo, hi) = (e.min(), e.max());
        t.push(vec![num(tt), num(lo), num(hi)]);
    }
    b.traces.push(("extreme_entries", t));
    Ok(b)
}

fn shift_flip(spec: &ModelSpec, n: usize) -> CliResult<Bundle> {
    let mut b = Bundle::new(spec)?;
    let sf = build_shift_flip(n)?;
    let d = ExactEvaluators::dim(&sf);
    let mut t = Table::new(&["t", "norm"]);
    let mut late_max = 0.0f64;
    for k in 0..=60 {
        let tt = k as f64 / 20.0;
        let mut row_sums = vec![0.0; d];
        for j in 0..d {
            let col = sf.semigroup_apply(tt, &ComplexVector::basis(d, j)).expect("shift-flip has a semigroup formula")?;
            for (s, z) in row_sums.iter_mut().zip(col.as_slice()) {
                *s += z.norm();
            }
        }
        let norm = row_sums.iter().copied().fold(0.0, f64::max);
        if tt >= 2.0 {
            late_max = late_max.max(norm);
        }
        t.push(vec![num(tt), num(norm)]);
    }
    b.traces.push(("norm", t));

    // f = (0, 𝟙): the second copy is pushed into the first with a sign flip.
    let mut f = vec![0.0; d];
    f[sf.nodes()..].iter_mut().for_each(|v| *v = 1.0);
    let f = ComplexVector::from_real(&f);
    let mut t = Table::new(&["lambda", "min_entry"]);
    let mut all_negative = true;
    for k in 0..=10 {
        let l = 0.5f64.powi(k);
        let r = ExactEvaluators::resolvent_apply(&sf, Complex64::new(l, 0.0), &f).expect("shift-flip has a resolvent formula")?;
        let m = r.as_slice().iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        all_negative &= m <= -1e-6;
        t.push(vec![num(l), num(m)]);
    }
    b.traces.push(("resolvent_min", t));

    let laplace = [0.5, 1.0, 2.0]
        .iter()
        .map(|&l| laplace_crosscheck(&sf, Complex64::new(l, 0.0), &f, 2.0, 2 * n))
        .collect::<Result<Vec<_>, _>>()?;
    b.put("nilpotent", &json!({ "max_norm_after_two": late_max }))?;
    b.put("resolvent_negative_at_all_samples", &all_negative)?;
    b.put("laplace", &laplace)?;
    b.put("domain_cone_forced_zeros", &sf.domain_cone_forced_zeros())?;
    Ok(b)
}

pub fn build_bundle(id: &str) -> CliResult<Bundle> {
    if !MODEL_IDS.contains(&id) {
        return Err(CliError::Usage(format!("unknown example id {id:?}; known: {}", MODEL_IDS.join(", "))));
    }
    let spec = ModelSpec::from_id(id, &ModelParams::default())?;
    match spec {
        ModelSpec::Rotation => rotation(&spec),
        ModelSpec::RotationDamped { mu } => rotation_damped(&spec, mu),
        ModelSpec::RotationShifted { mu } => rotation_shifted(&spec, mu),
        ModelSpec::Reflection { n } => reflection(&spec, n),
        ModelSpec::Sequence { n } => sequence(&spec, n),
        ModelSpec::Dtn { lambda, modes, m_grid } => dtn(&spec, lambda, modes, m_grid),
        ModelSpec::Delay { n } => delay(&spec, n),
        ModelSpec::RobinSquared { n, beta } => robin_squared(&spec, n, beta),
        ModelSpec::ShiftFlip { n } => shift_flip(&spec, n),
    }
}

pub fn run(args: &ReproduceArgs) -> CliResult<u8> {
    let bundle = build_bundle(&args.id)?;
    match &args.out_dir {
        None => emit(&json_string(&bundle.to_inline_json()?)?, None)?,
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.clone(), source })?;
            write_file(&dir.join(format!("{}.json", bundle.id)), &json_string(&bundle.to_indexed_json())?)?;
            for (name, t) in &bundle.traces {
                write_file(&dir.join(bundle.trace_file(name)), &t.render()?)?;
            }
        }
    }
    Ok(0)
}
