//! Subcommand pipelines. Each returns an [`Outcome`] whose exit code follows
//! 0 pass, 2 pass with warnings, 3 failed check; configuration problems are
//! reported as [`CmdError::Usage`] (exit 1).

use anyhow::anyhow;
use contact_order::{global_sigma, ContactReport, ContactWarning, CurveModel, CurveSpec, GlobalSigma};
use eigenfunction_bases::Family;
use exponent_model::{format_rational, hermite_exponent, predict, rho, to_f64, ContactOrder, LebesgueExponent, Rational};
use restriction_lab::{
    cap_extremizer_torus, curve_quadrature, fit_exponent, gram_operator_norm, hermite_sweep, lower_bound_search,
    sphere_sweep, torus_sweep, ExponentFit, LambdaGrid, Metric, NormSample, RestrictionError, RestrictionMap,
    SweepOptions,
};
use serde::Serialize;
use std::path::PathBuf;
use symbol_core::SymbolModel;

use crate::config::ExperimentConfig;
use crate::output::{num, write_csv, write_json};

#[derive(Debug)]
pub enum CmdError {
    /// Bad flags, config or inputs: exit 1.
    Usage(anyhow::Error),
    /// A computation that could not complete: exit 3.
    Failed(anyhow::Error),
}

impl CmdError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CmdError::Usage(_) => 1,
            CmdError::Failed(_) => 3,
        }
    }
}

impl std::fmt::Display for CmdError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CmdError::Usage(e) | CmdError::Failed(e) => write!(f, "{e:#}"),
        }
    }
}

fn usage(e: impl Into<anyhow::Error>) -> CmdError {
    CmdError::Usage(e.into())
}

fn failed(e: impl Into<anyhow::Error>) -> CmdError {
    CmdError::Failed(e.into())
}

pub type CmdResult = Result<Outcome, CmdError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Warn,
    Fail,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Warn => 2,
            Status::Fail => 3,
        }
    }
}

#[derive(Debug)]
pub struct Outcome {
    pub status: Status,
    /// Human-readable summary, one line each.
    pub lines: Vec<String>,
    pub files: Vec<PathBuf>,
}

fn sigma_label(s: GlobalSigma, j_max: usize) -> String {
    match s {
        GlobalSigma::Finite(v) => v.to_string(),
        GlobalSigma::InfinityFlag => format!(">= j_max ({j_max})"),
    }
}

fn contact_order_of(s: GlobalSigma) -> ContactOrder {
    match s {
        GlobalSigma::Finite(v) => ContactOrder::Finite(v as i64),
        GlobalSigma::InfinityFlag => ContactOrder::Infinity,
    }
}

fn load_curve(cfg: &ExperimentConfig) -> Result<(CurveSpec, CurveModel), CmdError> {
    let spec = cfg.curve.spec().map_err(usage)?;
    let model = CurveModel::from_spec(&spec).map_err(usage)?;
    Ok((spec, model))
}

fn run_contact(cfg: &ExperimentConfig) -> Result<(SymbolModel, CurveSpec, CurveModel, ContactReport), CmdError> {
    let sym = SymbolModel::from_name(&cfg.symbol).map_err(usage)?;
    let (spec, curve) = load_curve(cfg)?;
    let rep = global_sigma(&sym, &curve, &cfg.contact_config()).map_err(failed)?;
    Ok((sym, spec, curve, rep))
}

// ---------------------------------------------------------------- contact

pub fn cmd_contact(cfg: &ExperimentConfig) -> CmdResult {
    let (_, _, _, rep) = run_contact(cfg)?;
    let rows: Vec<[String; 4]> = rep
        .per_t
        .iter()
        .map(|c| [num(c.t), c.sigma.to_string(), num(c.confidence), c.uncertain.to_string()])
        .collect();
    let csv = write_csv(&cfg.output, "contact.csv", "contact", &["t", "sigma", "confidence", "uncertain"], &rows)
        .map_err(failed)?;
    let json = write_json(&cfg.output, "contact.json", &rep).map_err(failed)?;
    let uncertain = rep.warnings.iter().any(|w| matches!(w, ContactWarning::UncertainClassification { .. }));
    let mut lines = vec![format!("sigma_global = {}", sigma_label(rep.sigma_global, rep.j_max))];
    if let Some(t) = rep.t_star {
        lines.push(format!("t_star = {t}"));
    }
    if !rep.g2_points.is_empty() {
        lines.push(format!("g2_points = {:?}", rep.g2_points));
    }
    if let Some(p) = rep.b_dot_v {
        lines.push(format!("<b, v> = {p:.6e}"));
    }
    for w in &rep.warnings {
        let kind = if is_expected(w, rep.sigma_global) { "note" } else { "warning" };
        lines.push(format!("{kind}: {}", serde_json::to_string(w).unwrap_or_default()));
    }
    let status = if uncertain { Status::Warn } else { Status::Pass };
    Ok(Outcome { status, lines, files: vec![csv, json] })
}

// ---------------------------------------------------------------- predict

pub fn parse_sigma(s: &str) -> Result<ContactOrder, CmdError> {
    match ContactOrder::parse(s) {
        Some(ContactOrder::Finite(v)) if v < 1 => Err(usage(anyhow!("contact order must be ≥ 1, got {v}"))),
        Some(o) => Ok(o),
        None => Err(usage(anyhow!("invalid contact order `{s}`"))),
    }
}

pub fn cmd_predict(cfg: &ExperimentConfig) -> CmdResult {
    let qs = cfg.q_values().map_err(usage)?;
    let sigmas: Vec<ContactOrder> = cfg.predict.sigma_list.iter().map(|s| parse_sigma(s)).collect::<Result<_, _>>()?;
    let mut rows = Vec::new();
    for q in &qs {
        for &s in &sigmas {
            let p = predict(q, s);
            let flags: Vec<&str> = p.rho.flags.iter().map(|f| f.as_str()).collect();
            rows.push([
                q.to_string(),
                s.to_string(),
                format_rational(&p.rho.value),
                num(to_f64(&p.rho.value)),
                format_rational(&p.hermite),
                num(to_f64(&p.hermite)),
                flags.join(";"),
            ]);
        }
    }
    let header = ["q", "sigma", "rho", "rho_float", "hermite", "hermite_float", "flags"];
    let csv = write_csv(&cfg.output, "predict.csv", "predict", &header, &rows).map_err(failed)?;
    let lines = rows.iter().map(|r| format!("q = {:>4}  sigma = {:>3}  rho = {:>8} ({})", r[0], r[1], r[2], r[3])).collect();
    Ok(Outcome { status: Status::Pass, lines, files: vec![csv] })
}

// ---------------------------------------------------------------- polylab

pub fn cmd_polylab(cfg: &ExperimentConfig) -> CmdResult {
    let sm = cfg.polylab.sigma_max;
    if !(1..=40).contains(&sm) {
        return Err(usage(anyhow!("sigma_max must lie in 1..=40")));
    }
    let rep = polynomial_lab::run_polylab(sm, cfg.seed);
    let json = write_json(&cfg.output, "polylab.json", &rep).map_err(failed)?;
    let failing: Vec<u32> = rep.sigmas.iter().filter(|s| !s.pass).map(|s| s.sigma).collect();
    let mut lines = vec![format!("polylab sigma <= {sm}: {}", if rep.pass { "all pass" } else { "FAIL" })];
    if !failing.is_empty() {
        lines.push(format!("failing sigma: {failing:?}"));
    }
    lines.extend(rep.failures.iter().take(10).map(|f| format!("failure: {}", serde_json::to_string(f).unwrap_or_default())));
    Ok(Outcome { status: if rep.pass { Status::Pass } else { Status::Fail }, lines, files: vec![json] })
}

// ---------------------------------------------------------------- flowcheck

pub fn cmd_flowcheck(cfg: &ExperimentConfig) -> CmdResult {
    let syms: Vec<SymbolModel> =
        cfg.flowcheck.symbols.iter().map(|s| SymbolModel::from_name(s)).collect::<Result<_, _>>().map_err(usage)?;
    let mut reports = Vec::new();
    for (i, s) in syms.iter().enumerate() {
        let seed = restriction_lab::sweep::mix_seed(cfg.seed, i as u64);
        reports.push(hamiltonian_flow::run_flow_suite(s, cfg.flowcheck.starts, seed, false).map_err(failed)?);
    }
    let rows: Vec<[String; 6]> = reports
        .iter()
        .map(|r| [r.symbol.clone(), r.starts.to_string(), num(r.energy_max), num(r.reversal_max), num(r.jet_max), r.pass.to_string()])
        .collect();
    let header = ["symbol", "starts", "energy_max", "reversal_max", "jet_max", "pass"];
    let csv = write_csv(&cfg.output, "flowcheck.csv", "flowcheck", &header, &rows).map_err(failed)?;
    let pass = reports.iter().all(|r| r.pass);
    let lines = reports
        .iter()
        .map(|r| {
            let v = if r.pass { "pass" } else { "FAIL" };
            format!("{}: energy {:.2e} reversal {:.2e} jet {:.2e} -> {v}", r.symbol, r.energy_max, r.reversal_max, r.jet_max)
        })
        .collect();
    Ok(Outcome { status: if pass { Status::Pass } else { Status::Fail }, lines, files: vec![csv] })
}

// ---------------------------------------------------------------- verify

#[derive(Clone, Debug, Serialize)]
pub struct VerdictReport {
    pub family: Family,
    pub symbol: String,
    pub q: String,
    pub sigma_detected: String,
    /// Exact target as a fraction.
    pub rho_target: String,
    pub rho_target_float: f64,
    pub slope: Option<f64>,
    pub stderr: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    /// Raw per-λ samples.
    pub raw: PathBuf,
    pub groups: usize,
    pub warnings: Vec<String>,
    /// Diagnostics that explain the detected order rather than cast doubt on it.
    pub notes: Vec<String>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
struct FitSummary {
    slope: f64,
    stderr: f64,
    target_rho: f64,
    pass: bool,
}

/// Sweep levels of a family as `λ` values (for error rows).
fn level_lambdas(family: Family, grid: &LambdaGrid) -> Vec<f64> {
    match family {
        Family::Torus => grid.torus_levels().into_iter().map(|(_, l)| l).collect(),
        Family::Sphere => grid.integer_levels().into_iter().map(|(_, l)| ((l * (l + 1)) as f64).sqrt()).collect(),
        Family::Hermite => grid.integer_levels().into_iter().map(|(_, n)| (2.0 * n as f64 + 2.0).sqrt()).collect(),
    }
}

pub fn sweep_family(
    family: Family,
    spec: &CurveSpec,
    curve: &CurveModel,
    grid: &LambdaGrid,
    seed: u64,
) -> Vec<Result<NormSample, RestrictionError>> {
    let o = SweepOptions { seed, ..SweepOptions::default() };
    match family {
        Family::Torus => torus_sweep(curve, grid, &o),
        Family::Sphere => sphere_sweep(spec, grid, &o),
        Family::Hermite => hermite_sweep(spec, grid, &o),
    }
}

/// Exponent target at `q = 2`: `ρ(2, σ)`, or the oscillator exponent.
pub fn target_for(family: Family, sigma: ContactOrder) -> Rational {
    let q = LebesgueExponent::integer(2);
    match family {
        Family::Hermite => hermite_exponent(&q, sigma).value,
        _ => rho(&q, sigma).value,
    }
}

/// A run of vanishing `‖H‖` is the signature of an infinite-contact curve,
/// so it is reported as a note once the `≥ j_max` flag has been raised.
fn is_expected(w: &ContactWarning, sigma: GlobalSigma) -> bool {
    matches!(w, ContactWarning::NonIsolatedG2 { .. }) && sigma == GlobalSigma::InfinityFlag
}

pub fn sample_rows(family: Family, sigma: &str, levels: &[f64], results: &[Result<NormSample, RestrictionError>]) -> Vec<[String; 9]> {
    results
        .iter()
        .zip(levels)
        .map(|(r, &lam)| match r {
            Ok(s) => [
                family.to_string(),
                num(s.lambda),
                num(s.q),
                sigma.to_string(),
                num(s.value),
                s.meta.dim.to_string(),
                s.meta.quad_n.to_string(),
                s.meta.iterations.to_string(),
                s.meta.flag.clone().unwrap_or_default(),
            ],
            Err(e) => [
                family.to_string(),
                num(lam),
                "2".into(),
                sigma.to_string(),
                "NaN".into(),
                String::new(),
                String::new(),
                String::new(),
                format!("error: {e}"),
            ],
        })
        .collect()
}

pub const SAMPLE_HEADER: [&str; 9] = ["family", "lambda", "q", "sigma_predicted", "value", "dim", "quad_n", "iterations", "flag"];

/// Everything a verify pipeline produced.
#[derive(Clone, Debug)]
pub struct VerifyRun {
    pub verdict: VerdictReport,
    pub contact: ContactReport,
    pub fit: Option<ExponentFit>,
    /// Successful samples in λ order.
    pub samples: Vec<NormSample>,
}

/// Contact → target → sweep → fit → verdict. Raw samples are written before
/// the fit so they survive any later failure.
pub fn run_verify(cfg: &ExperimentConfig, family: Family) -> Result<VerifyRun, CmdError> {
    if cfg.family() != Some(family) {
        return Err(usage(anyhow!("symbol `{}` does not belong to the {family} family", cfg.symbol)));
    }
    let mut warnings = Vec::new();
    let qs = cfg.q_values().map_err(usage)?;
    for q in &qs {
        if *q != LebesgueExponent::integer(2) {
            warnings.push(format!("q = {q} ignored: verify measures the L2 operator norm"));
        }
    }
    let (_, spec, curve, contact) = run_contact(cfg)?;
    let mut notes = Vec::new();
    for w in &contact.warnings {
        let text = format!("contact: {}", serde_json::to_string(w).unwrap_or_default());
        if is_expected(w, contact.sigma_global) {
            notes.push(text);
        } else {
            warnings.push(text);
        }
    }
    let sigma = contact_order_of(contact.sigma_global);
    let sigma_label = sigma.to_string();
    let target = target_for(family, sigma);
    let target_f = to_f64(&target);
    let tolerance = cfg.tolerance_for(family);

    let results = sweep_family(family, &spec, &curve, &cfg.lambda_grid, cfg.seed);
    let levels = level_lambdas(family, &cfg.lambda_grid);
    let rows = sample_rows(family, &sigma_label, &levels, &results);
    let raw = write_csv(&cfg.output, "samples.csv", &format!("verify-{family}"), &SAMPLE_HEADER, &rows).map_err(failed)?;
    write_json(&cfg.output, "contact.json", &contact).map_err(failed)?;

    let mut verdict = VerdictReport {
        family,
        symbol: cfg.symbol.clone(),
        q: "2".into(),
        sigma_detected: sigma_label,
        rho_target: format_rational(&target),
        rho_target_float: target_f,
        slope: None,
        stderr: None,
        tolerance,
        pass: false,
        raw,
        groups: 0,
        warnings,
        notes,
        error: None,
    };
    let failures: Vec<String> = results.iter().filter_map(|r| r.as_ref().err().map(|e| e.to_string())).collect();
    let samples: Vec<NormSample> = results.into_iter().filter_map(Result::ok).collect();
    for s in &samples {
        if let Some(f) = &s.meta.flag {
            verdict.warnings.push(format!("lambda = {}: {f}", s.lambda));
        }
    }
    let fit = if failures.is_empty() {
        match fit_exponent(&samples, cfg.lambda_grid.jitter_group) {
            Ok(f) => Some(f),
            Err(e) => {
                verdict.error = Some(e.to_string());
                None
            }
        }
    } else {
        verdict.error = Some(format!("{} sample(s) failed; first: {}", failures.len(), failures[0]));
        None
    };
    if let Some(f) = &fit {
        verdict.slope = Some(f.slope);
        verdict.stderr = Some(f.stderr);
        verdict.groups = f.n_points;
        verdict.pass = (f.slope - target_f).abs() <= tolerance;
        let summary = FitSummary { slope: f.slope, stderr: f.stderr, target_rho: target_f, pass: verdict.pass };
        write_json(&cfg.output, "fit.json", &summary).map_err(failed)?;
    }
    write_json(&cfg.output, "verdict.json", &verdict).map_err(failed)?;
    Ok(VerifyRun { verdict, contact, fit, samples })
}

pub fn cmd_verify(cfg: &ExperimentConfig, family: Family) -> CmdResult {
    let v = run_verify(cfg, family)?.verdict;
    let mut lines = vec![format!("family = {family}, sigma_detected = {}, target = {} ({:.6})", v.sigma_detected, v.rho_target, v.rho_target_float)];
    match (v.slope, v.stderr) {
        (Some(s), Some(e)) => lines.push(format!(
            "slope = {s:.6} ± {e:.6} over {} groups; |slope - target| = {:.6} (tolerance {}) -> {}",
            v.groups,
            (s - v.rho_target_float).abs(),
            v.tolerance,
            if v.pass { "PASS" } else { "FAIL" }
        )),
        _ => lines.push(format!("no fit: {}", v.error.clone().unwrap_or_default())),
    }
    lines.extend(v.notes.iter().map(|w| format!("note: {w}")));
    lines.extend(v.warnings.iter().map(|w| format!("warning: {w}")));
    lines.push(format!("raw samples: {}", v.raw.display()));
    let status = match (v.pass, v.warnings.is_empty()) {
        (false, _) => Status::Fail,
        (true, true) => Status::Pass,
        (true, false) => Status::Warn,
    };
    let files = vec![v.raw.clone(), cfg.output.join("verdict.json")];
    Ok(Outcome { status, lines, files })
}

// ---------------------------------------------------------------- extremize

#[derive(Clone, Debug, Serialize)]
struct ExtremizeReport {
    lambda: f64,
    sigma: u32,
    c_width: f64,
    angle: f64,
    cap_size: usize,
    gram_norm: f64,
    /// `(q, cap ratio, ascent ratio)`; the ascent is absent for `q = 2, ∞`.
    ratios: Vec<(String, f64, Option<f64>)>,
}

pub fn cmd_extremize(cfg: &ExperimentConfig) -> CmdResult {
    let e = &cfg.extremize;
    if e.sigma < 1 {
        return Err(usage(anyhow!("sigma must be ≥ 1")));
    }
    let curve = match &e.curve {
        Some(c) => CurveModel::from_spec(&c.spec().map_err(usage)?).map_err(usage)?,
        None => CurveModel::monomial_graph(e.sigma as usize + 1, [-0.6, 0.6]).map_err(usage)?,
    };
    if !curve.contains(e.t0) {
        return Err(usage(anyhow!("t0 = {} lies outside the curve interval", e.t0)));
    }
    let qs = cfg.q_values().map_err(usage)?;
    let qf: Vec<f64> = qs.iter().map(|q| if let LebesgueExponent::Finite(r) = q { to_f64(r) } else { f64::INFINITY }).collect();
    let quad = curve_quadrature(&curve, Metric::Euclidean, e.lambda + 1.0).map_err(failed)?;
    let (basis, cap) = cap_extremizer_torus(e.lambda, &curve, e.sigma, e.c_width, e.t0, &qf, &quad).map_err(failed)?;
    let opts = restriction_lab::LanczosOptions { seed: cfg.seed, ..Default::default() };
    let gram = gram_operator_norm(&basis, &quad, &opts).sample.value;
    let map = RestrictionMap::new(&basis, &quad);
    let mut ratios = Vec::new();
    for (q, &(qv, r)) in qs.iter().zip(&cap.ratios) {
        let ascent = (qv > 2.0 && qv.is_finite() && e.ascent_steps > 0)
            .then(|| lower_bound_search(&map, &quad, qv, &cap.coeffs, e.ascent_steps).ratio);
        ratios.push((q.to_string(), r, ascent));
    }
    let rep = ExtremizeReport {
        lambda: e.lambda,
        sigma: e.sigma,
        c_width: cap.c_width,
        angle: cap.angle,
        cap_size: cap.cap_size,
        gram_norm: gram,
        ratios,
    };
    let rows: Vec<[String; 3]> =
        rep.ratios.iter().map(|(q, r, a)| [q.clone(), num(*r), a.map(num).unwrap_or_default()]).collect();
    let csv = write_csv(&cfg.output, "extremize.csv", "extremize", &["q", "cap_ratio", "ascent_ratio"], &rows).map_err(failed)?;
    let json = write_json(&cfg.output, "extremize.json", &rep).map_err(failed)?;
    let mut lines = vec![
        format!("lambda = {}, sigma = {}, cap size = {}, half-angle = {:.6} (c = {})", rep.lambda, rep.sigma, rep.cap_size, rep.angle, rep.c_width),
        format!("L2 operator norm = {gram:.6}"),
    ];
    let mut consistent = true;
    for (q, r, a) in &rep.ratios {
        let mut l = format!("q = {q}: cap ratio = {r:.6}");
        if let Some(a) = a {
            l.push_str(&format!(", ascent ratio = {a:.6}"));
            consistent &= *r <= a + 1e-9;
        }
        if q == "2" {
            consistent &= *r <= gram * (1.0 + 1e-9);
        }
        lines.push(l);
    }
    let status = if consistent { Status::Pass } else { Status::Fail };
    Ok(Outcome { status, lines, files: vec![csv, json] })
}
