//! Acceptance run: one `[PASS]`/`[FAIL]` line per criterion with its pinned
//! tolerance and wall time. Soft criteria report `[WARN]` instead of failing.
//!
//! `ACCEPTANCE_ONLY=5,8` restricts the run to the listed criteria. Outputs of
//! the verify pipelines land in `<target>/tmp/acceptance/`.

use cli_reports::commands::{run_verify, VerifyRun};
use cli_reports::ExperimentConfig;
use contact_order::{
    contact_order_at, g2_scan, global_sigma, leading_vector_b, prepare, ContactConfig, CurveModel, CurveSpec,
    GlobalSigma, SigmaValue, CONFIDENCE_MIN,
};
use eigenfunction_bases::{torus_cluster, BasisError, Family, Indices, DEFAULT_WINDOW};
use exponent_model::{
    hermite_exponent, is_strictly_increasing, rat, rho, ContactOrder, LebesgueExponent, Rational,
};
use restriction_lab::{
    cap_extremizer_torus, curve_quadrature, dense_eigenvalues, fit_exponent, lower_bound_search, measure_sphere,
    top_eigenpair, DenseBasisGram, LambdaGrid, LanczosOptions, Metric, NormSample, RestrictionMap, SampleMeta,
    SweepOptions, TorusGram,
};
use serde_json::json;
use std::collections::{BTreeSet, HashMap};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};
use std::path::PathBuf;
use std::time::Instant;
use symbol_core::SymbolModel;

const SEED: u64 = 20240601;

#[derive(Clone, Copy, PartialEq)]
enum Grade {
    Pass,
    Warn,
    Fail,
}

struct Outcome {
    grade: Grade,
    tol: String,
    details: Vec<String>,
}

impl Outcome {
    fn hard(pass: bool, tol: impl Into<String>, details: Vec<String>) -> Self {
        Outcome { grade: if pass { Grade::Pass } else { Grade::Fail }, tol: tol.into(), details }
    }
}

fn out_dir(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance").join(name)
}

fn verify(family: Family, curve: &str, tolerance: Option<f64>, tag: &str) -> VerifyRun {
    let o = json!({ "curve": curve, "seed": SEED, "output": out_dir(tag), "tolerance": tolerance });
    let cfg = ExperimentConfig::resolve(Some(family), None, &o).expect("acceptance config");
    run_verify(&cfg, family).unwrap_or_else(|e| panic!("{tag}: {e}"))
}

fn verdict_line(tag: &str, v: &VerifyRun) -> String {
    let r = &v.verdict;
    match r.slope {
        Some(s) => format!(
            "{tag}: σ = {}, slope {s:.4} ± {:.4} vs {} ({:.4}), |Δ| = {:.4}, {} groups",
            r.sigma_detected,
            r.stderr.unwrap_or(f64::NAN),
            r.rho_target,
            r.rho_target_float,
            (s - r.rho_target_float).abs(),
            r.groups
        ),
        None => format!("{tag}: no fit ({})", r.error.clone().unwrap_or_default()),
    }
}

fn slope(v: &VerifyRun) -> f64 {
    v.verdict.slope.unwrap_or(f64::NAN)
}

// ------------------------------------------------------------------ 1

fn polylab() -> Outcome {
    let rep = polynomial_lab::run_polylab(40, SEED);
    let failing: Vec<u32> = rep.sigmas.iter().filter(|s| !s.pass).map(|s| s.sigma).collect();
    let details = vec![
        format!("σ = 1..40 failing: {failing:?}"),
        format!("σ = 2 roots exact: {}, critical-point paths: {}", rep.sigma2_roots_exact, rep.p_sigma_paths_ok),
        format!("identity failures: {}", rep.failures.len()),
    ];
    Outcome::hard(rep.pass, "exact; critical points 1e-10; < 5 s", details)
}

// ------------------------------------------------------------------ 2

fn contact() -> Outcome {
    let cfg = ContactConfig::default();
    let torus = SymbolModel::torus_laplace();
    let mut ok = true;
    let mut details = Vec::new();
    for sigma in 1..=5u32 {
        let c = CurveModel::monomial_graph(sigma as usize + 1, [-0.6, 0.6]).unwrap();
        let r = prepare(&torus, &c, &cfg).unwrap();
        let at0 = contact_order_at(&r, 0.0, cfg.j_max, cfg.rtol).unwrap();
        let rep = global_sigma(&torus, &c, &cfg).unwrap();
        let off = rep.per_t.iter().filter(|p| p.t.abs() > 1e-3);
        let off_ok = off.clone().all(|p| p.sigma == SigmaValue::Finite(1));
        let good = at0.sigma == SigmaValue::Finite(sigma)
            && at0.confidence >= CONFIDENCE_MIN
            && off_ok
            && rep.sigma_global == GlobalSigma::Finite(sigma);
        ok &= good;
        details.push(format!(
            "(t, t^{}): σ(0) = {} (confidence {:.1}), σ = 1 at {} other nodes: {off_ok}",
            sigma + 1,
            at0.sigma,
            at0.confidence,
            off.count()
        ));
    }
    let circle = |r: f64| CurveModel::from_spec(&CurveSpec::Circle { center: [0.0, 0.0], radius: r, interval: None }).unwrap();
    let lat = |th: f64| CurveModel::from_spec(&CurveSpec::Latitude { theta0: th, interval: None }).unwrap();
    let cases = [
        ("hermite r = 1/2", SymbolModel::hermite(), circle(0.5), GlobalSigma::Finite(1)),
        ("hermite r = 2^-1/2", SymbolModel::hermite(), circle(0.5f64.sqrt()), GlobalSigma::InfinityFlag),
        ("sphere θ₀ = π/3", SymbolModel::sphere_laplace(), lat(FRAC_PI_3), GlobalSigma::Finite(1)),
        ("sphere equator", SymbolModel::sphere_laplace(), lat(FRAC_PI_2), GlobalSigma::InfinityFlag),
    ];
    for (name, sym, c, want) in cases {
        let got = global_sigma(&sym, &c, &cfg).unwrap().sigma_global;
        ok &= got == want;
        details.push(format!("{name}: {got}"));
    }
    for sigma in 2..=5usize {
        let c = CurveModel::monomial_graph(sigma + 1, [-0.6, 0.6]).unwrap();
        let s = g2_scan(&prepare(&torus, &c, &cfg).unwrap(), 241).unwrap();
        let good = s.points.len() == 1 && s.points[0].abs() < 1e-6 && s.non_isolated.is_empty();
        ok &= good;
        details.push(format!("g2_scan (t, t^{}): {:?}", sigma + 1, s.points));
    }
    Outcome::hard(ok, "exact classes; confidence ≥ 2; g2 point within 1e-6; < 60 s", details)
}

// ------------------------------------------------------------------ 3

fn leading_vector() -> Outcome {
    let torus = SymbolModel::torus_laplace();
    let mut ok = true;
    let mut details = Vec::new();
    for sigma in 1..=3u32 {
        let c = CurveModel::monomial_graph(sigma as usize + 1, [-0.6, 0.6]).unwrap();
        let r = prepare(&torus, &c, &ContactConfig::default()).unwrap();
        let lv = leading_vector_b(&r, 0.0, sigma).unwrap();
        ok &= lv.fit_rel_err <= 0.02 && lv.pairing.abs() >= 1e-3;
        details.push(format!(
            "σ = {sigma}: b = [{:.6}, {:.6}], fit = [{:.6}, {:.6}], rel err {:.2e}, ⟨b, v⟩ = {:.4}",
            lv.b[0], lv.b[1], lv.fit[0], lv.fit[1], lv.fit_rel_err, lv.pairing
        ));
    }
    Outcome::hard(ok, "relative 2%; |⟨b, v⟩| ≥ 1e-3", details)
}

// ------------------------------------------------------------------ 4

fn flow() -> Outcome {
    let mut ok = true;
    let mut details = Vec::new();
    for (i, sym) in [SymbolModel::torus_laplace(), SymbolModel::sphere_laplace(), SymbolModel::hermite()].iter().enumerate() {
        let r = hamiltonian_flow::run_flow_suite(sym, 50, SEED + i as u64, false).unwrap();
        ok &= r.energy_max <= 1e-8 && r.reversal_max <= 1e-7 && r.jet_max <= 1e-4 && r.starts == 50;
        details.push(format!(
            "{}: energy {:.2e}, reversal {:.2e}, jet {:.2e}",
            r.symbol, r.energy_max, r.reversal_max, r.jet_max
        ));
    }
    Outcome::hard(ok, "energy 1e-8; reversal 1e-7; jet 1e-4 rel; < 30 s", details)
}

// ------------------------------------------------------------------ 5

const TORUS_CURVES: [(&str, &str); 4] = [
    ("sigma1", "poly:t,t^2@-0.6,0.6"),
    ("sigma2", "poly:t,t^3@-0.6,0.6"),
    ("sigma3", "poly:t,t^4@-0.6,0.6"),
    ("line", "poly:t,0@-0.6,0.6"),
];

fn torus(store: &mut HashMap<&'static str, VerifyRun>) -> Outcome {
    let mut ok = true;
    let mut details = Vec::new();
    let mut slopes = Vec::new();
    for (tag, curve) in TORUS_CURVES {
        let t = Instant::now();
        let v = verify(Family::Torus, curve, None, &format!("torus-{tag}"));
        ok &= v.verdict.pass && v.verdict.groups >= 8;
        details.push(format!("{} [{:.0} s]", verdict_line(tag, &v), t.elapsed().as_secs_f64()));
        slopes.push(slope(&v));
        store.insert(tag, v);
    }
    let ordered = slopes.windows(2).all(|w| w[0] < w[1]);
    ok &= ordered;
    details.push(format!("strict ordering σ=1 < σ=2 < σ=3 < line: {ordered}"));
    Outcome::hard(ok, "±0.04; ≥ 8 groups; ≤ 15 min", details)
}

// ------------------------------------------------------------------ 6

fn sphere() -> Outcome {
    let third = verify(Family::Sphere, "latitude:1.0471975511965976", Some(0.05), "sphere-third");
    let equator = verify(Family::Sphere, "latitude:1.5707963267948966", Some(0.04), "sphere-equator");
    let o = SweepOptions { seed: SEED, ..SweepOptions::default() };
    let mut cross = 0.0f64;
    for th in [FRAC_PI_3, FRAC_PI_2] {
        let spec = CurveSpec::Latitude { theta0: th, interval: None };
        let a = measure_sphere(&spec, 50, false, &o).unwrap().value;
        let b = measure_sphere(&spec, 50, true, &o).unwrap().value;
        cross = cross.max((a - b).abs() / a);
    }
    let ok = third.verdict.pass && equator.verdict.pass && cross <= 1e-8;
    let details = vec![
        verdict_line("θ₀ = π/3", &third),
        verdict_line("equator", &equator),
        format!("closed form vs generic at l = 50: {cross:.2e}"),
    ];
    Outcome::hard(ok, "π/3 ±0.05; equator ±0.04; cross-check 1e-8; ≤ 5 min", details)
}

// ------------------------------------------------------------------ 7

fn hermite() -> Outcome {
    let half = verify(Family::Hermite, "circle:0,0,0.5", None, "hermite-half");
    let orbit = verify(Family::Hermite, "circle:0,0,0.7071067811865476", None, "hermite-orbit");
    let ordered = slope(&half) < slope(&orbit);
    let ok = half.verdict.pass && orbit.verdict.pass && ordered;
    let details =
        vec![verdict_line("r = 1/2", &half), verdict_line("r = 2^-1/2", &orbit), format!("ordering: {ordered}")];
    Outcome::hard(ok, "±0.06; ≤ 15 min", details)
}

// ------------------------------------------------------------------ 8

fn cap_sample(lambda: f64, value: f64, group: usize, method: &str) -> NormSample {
    NormSample {
        lambda,
        value,
        q: 2.0,
        family: Family::Torus,
        meta: SampleMeta {
            dim: 0,
            quad_n: 0,
            iterations: 0,
            residual: 0.0,
            group,
            method: method.into(),
            flag: None,
        },
    }
}

fn caps(store: &mut HashMap<&'static str, VerifyRun>) -> Outcome {
    let mut ok = true;
    let mut details = Vec::new();
    let mut worst_consistency = 0.0f64;
    for (sigma, tag) in [(1u32, "sigma1"), (2, "sigma2")] {
        if !store.contains_key(tag) {
            let curve = TORUS_CURVES.iter().find(|c| c.0 == tag).unwrap().1;
            store.insert(tag, verify(Family::Torus, curve, None, &format!("torus-{tag}")));
        }
        let gram = &store[tag].samples;
        let curve = CurveModel::monomial_graph(sigma as usize + 1, [-0.6, 0.6]).unwrap();
        let mut cap_samples = Vec::new();
        for s in gram {
            let quad = curve_quadrature(&curve, Metric::Euclidean, s.lambda + 1.0).unwrap();
            let (_, cap) = cap_extremizer_torus(s.lambda, &curve, sigma, 1.0, 0.0, &[2.0], &quad).unwrap();
            let r = cap.ratios[0].1;
            worst_consistency = worst_consistency.max(r / s.value);
            cap_samples.push(cap_sample(s.lambda, r, s.meta.group, "cap"));
        }
        let target = exponent_model::to_f64(&rho(&LebesgueExponent::integer(2), ContactOrder::Finite(sigma as i64)).value);
        let fit = fit_exponent(&cap_samples, 3).unwrap();
        ok &= fit.slope >= target - 0.03;
        details.push(format!("σ = {sigma}: cap exponent {:.4} vs ρ − 0.03 = {:.4}", fit.slope, target - 0.03));
    }
    ok &= worst_consistency <= 1.0 + 1e-9;
    details.push(format!("max cap ratio / operator norm: {worst_consistency:.4}"));
    Outcome::hard(ok, "exponent ≥ ρ(2,σ) − 0.03; cap ≤ norm", details)
}

/// Cap-seeded q = 4 ascent on a shorter grid.
fn ascent() -> Outcome {
    let grid = LambdaGrid { min: 100.0, max: 800.0, points_per_decade: 5.0, jitter_group: 3 };
    let mut soft_ok = true;
    let mut details = Vec::new();
    for sigma in [1u32, 2] {
        let curve = CurveModel::monomial_graph(sigma as usize + 1, [-0.6, 0.6]).unwrap();
        let mut samples = Vec::new();
        for (g, lambda) in grid.torus_levels() {
            let quad = curve_quadrature(&curve, Metric::Euclidean, lambda + 1.0).unwrap();
            let (basis, cap) = cap_extremizer_torus(lambda, &curve, sigma, 1.0, 0.0, &[4.0], &quad).unwrap();
            let map = RestrictionMap::new(&basis, &quad);
            let a = lower_bound_search(&map, &quad, 4.0, &cap.coeffs, 40);
            samples.push(cap_sample(lambda, a.ratio, g, "ascent"));
        }
        let fit = fit_exponent(&samples, 3).unwrap();
        soft_ok &= fit.slope >= 0.20;
        details.push(format!("σ = {sigma}: q = 4 ascent exponent {:.4} (universal target 1/4)", fit.slope));
    }
    Outcome { grade: if soft_ok { Grade::Pass } else { Grade::Warn }, tol: "≥ 0.20 (soft)".into(), details }
}

// ------------------------------------------------------------------ 9

fn brute_force(lambda: f64) -> Vec<[i64; 2]> {
    let (lo, hi) = (lambda + DEFAULT_WINDOW[0], lambda + DEFAULT_WINDOW[1]);
    let r = hi.ceil() as i64 + 1;
    let mut out = Vec::new();
    for k1 in -r..=r {
        for k2 in -r..=r {
            let n = ((k1 * k1 + k2 * k2) as f64).sqrt();
            if n >= lo && n <= hi {
                out.push([k1, k2]);
            }
        }
    }
    out
}

fn oracles() -> Outcome {
    let mut details = Vec::new();
    let opts = LanczosOptions { seed: SEED, ..LanczosOptions::default() };
    let curves = [
        CurveModel::monomial_graph(2, [-0.6, 0.6]).unwrap(),
        CurveModel::monomial_graph(4, [-0.6, 0.6]).unwrap(),
        CurveModel::poly([vec![0.0, 1.0], vec![0.0, 0.3, 0.5, -0.7]], [-0.6, 0.6]).unwrap(),
        CurveModel::poly([vec![0.0, 1.0], vec![0.0]], [-0.6, 0.6]).unwrap(),
    ];
    let mut dense_err = 0.0f64;
    let mut instances = 0;
    let mut all_converged = true;
    for c in &curves {
        for lam in [6.0, 10.0, 14.5, 20.0, 25.0, 30.0, 31.5] {
            let basis = torus_cluster(lam, DEFAULT_WINDOW).unwrap();
            if basis.dim() > 400 {
                continue;
            }
            let quad = curve_quadrature(c, Metric::Euclidean, lam + 1.0).unwrap();
            let top = *dense_eigenvalues(DenseBasisGram::new(&basis, &quad).dense()).last().unwrap();
            let lz = top_eigenpair(&TorusGram::new(&basis, &quad).unwrap(), &opts);
            all_converged &= lz.converged;
            dense_err = dense_err.max((lz.value - top).abs() / top);
            instances += 1;
        }
    }
    details.push(format!("matrix-free vs dense: {instances} instances, max rel {dense_err:.2e}, converged {all_converged}"));

    let o = SweepOptions { seed: SEED, ..SweepOptions::default() };
    let mut closed_err = 0.0f64;
    for th in [0.4, FRAC_PI_3, 1.2, FRAC_PI_2] {
        for l in [20usize, 50] {
            let spec = CurveSpec::Latitude { theta0: th, interval: None };
            let a = measure_sphere(&spec, l, false, &o).unwrap().value;
            let b = measure_sphere(&spec, l, true, &o).unwrap().value;
            closed_err = closed_err.max((a - b).abs() / a);
        }
    }
    details.push(format!("latitude closed form vs generic: max rel {closed_err:.2e}"));

    let mut mismatches = Vec::new();
    let mut checked = 0;
    // the supported range starts at λ = 5; below it the request is refused
    let refused = matches!(torus_cluster(4.5, DEFAULT_WINDOW), Err(BasisError::OutOfRange { .. }));
    for i in 0..=180 {
        let lam = 5.0 + 0.25 * i as f64;
        let brute = brute_force(lam);
        let same = match torus_cluster(lam, DEFAULT_WINDOW) {
            Ok(b) => {
                let Indices::Torus(ks) = &b.indices else { unreachable!() };
                let a: BTreeSet<[i64; 2]> = ks.iter().copied().collect();
                a.len() == ks.len() && a == brute.iter().copied().collect()
            }
            Err(BasisError::EmptyCluster { .. }) => brute.is_empty(),
            Err(_) => false,
        };
        if !same {
            mismatches.push(lam);
        }
        checked += 1;
    }
    details.push(format!("enumeration vs box scan: {checked} values of λ in [5, 50], mismatches {mismatches:?}; λ < 5 refused: {refused}"));
    let ok = dense_err <= 1e-6 && all_converged && closed_err <= 1e-8 && mismatches.is_empty() && refused;
    Outcome::hard(ok, "dense 1e-6; closed form 1e-8; enumeration exact", details)
}

// ------------------------------------------------------------------ 10

fn exponents() -> Outcome {
    let mut ok = true;
    let mut details = Vec::new();
    let q_list: Vec<LebesgueExponent> = (0..20).map(|k| LebesgueExponent::finite(20 + 7 * k, 10)).collect();
    let base = q_list.iter().all(|q| rho(q, ContactOrder::Finite(1)).value == rat(1, 3) - q.recip() / rat(3, 1));
    ok &= base;
    details.push(format!("ρ(q, 1) = 1/3 − 1/(3q) on 20 exponents in [2, 15.3]: {base}"));
    let quarter = (1..=100).all(|s| rho(&LebesgueExponent::integer(4), ContactOrder::Finite(s)).value == rat(1, 4));
    ok &= quarter;
    details.push(format!("ρ(4, σ) = 1/4 for σ ≤ 100: {quarter}"));
    let mono = [LebesgueExponent::integer(2), LebesgueExponent::integer(3), LebesgueExponent::finite(7, 2)]
        .iter()
        .all(|q| is_strictly_increasing(&(1..=100).map(|s| rho(q, ContactOrder::Finite(s)).value).collect::<Vec<Rational>>()));
    ok &= mono;
    details.push(format!("strict σ-monotonicity for q ∈ {{2, 3, 7/2}}: {mono}"));
    let h = hermite_exponent(&LebesgueExponent::integer(2), ContactOrder::Finite(1)).value;
    ok &= h == rat(-1, 6);
    details.push(format!("hermite_exponent(2, 1) = {h}"));
    Outcome::hard(ok, "exact rationals; < 1 s", details)
}

// ------------------------------------------------------------------

fn main() {
    let only: Option<BTreeSet<u32>> =
        std::env::var("ACCEPTANCE_ONLY").ok().map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let wanted = |n: u32| only.as_ref().is_none_or(|o| o.contains(&n));
    let limits = [(1, 5.0), (2, 60.0), (4, 30.0), (5, 900.0), (6, 300.0), (7, 900.0), (10, 1.0)];
    let mut store = HashMap::new();
    let mut failed = Vec::new();
    let mut report = |n: u32, name: &str, start: Instant, o: Outcome| {
        let secs = start.elapsed().as_secs_f64();
        let mut grade = o.grade;
        let limit = limits.iter().find(|l| l.0 == n).map(|l| l.1);
        let slow = limit.is_some_and(|l| secs > l);
        if slow && grade == Grade::Pass {
            grade = Grade::Fail;
        }
        let tag = match grade {
            Grade::Pass => "PASS",
            Grade::Warn => "WARN",
            Grade::Fail => "FAIL",
        };
        let budget = limit.map(|l| format!(" budget {l} s")).unwrap_or_default();
        println!("[{tag}] {n:>2} {name} (tol {}) {secs:.2} s{budget}", o.tol);
        for d in &o.details {
            println!("         {d}");
        }
        if slow {
            println!("         over the time budget");
        }
        if grade == Grade::Fail {
            failed.push(n);
        }
    };
    if wanted(10) {
        let t = Instant::now();
        report(10, "exponent-model exactness", t, exponents());
    }
    if wanted(1) {
        let t = Instant::now();
        report(1, "polynomial suite", t, polylab());
    }
    if wanted(2) {
        let t = Instant::now();
        report(2, "contact classification", t, contact());
    }
    if wanted(3) {
        let t = Instant::now();
        report(3, "leading vector b vs least squares", t, leading_vector());
    }
    if wanted(4) {
        let t = Instant::now();
        report(4, "flow and jet properties", t, flow());
    }
    if wanted(9) {
        let t = Instant::now();
        report(9, "oracle equivalences", t, oracles());
    }
    if wanted(6) {
        let t = Instant::now();
        report(6, "sphere exponents", t, sphere());
    }
    if wanted(7) {
        let t = Instant::now();
        report(7, "hermite exponents", t, hermite());
    }
    if wanted(5) {
        let t = Instant::now();
        report(5, "torus exponents", t, torus(&mut store));
    }
    if wanted(8) {
        let t = Instant::now();
        report(8, "cap extremizers", t, caps(&mut store));
        let t = Instant::now();
        report(8, "q = 4 ascent lower bound", t, ascent());
    }
    if failed.is_empty() {
        println!("acceptance: all hard criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
