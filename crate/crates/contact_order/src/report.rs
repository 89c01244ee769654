//! The full pipeline: branch, reparametrization, classification, G₂ scan, `b`.

use rayon::prelude::*;
use serde::Serialize;
use symbol_core::SymbolModel;

use crate::classify::{
    classification_warnings, contact_order_at, g2_scan, leading_vector_unchecked, sigma_sup, ContactClass,
    GlobalSigma, LeadingVector, SigmaValue, B_FIT_RTOL, DEFAULT_J_MAX, DEFAULT_RTOL,
};
use crate::curve::CurveModel;
use crate::error::{ContactError, ContactWarning};
use crate::reparam::{flow_time_reparam, FlowReparam};
use crate::tangent::{branch_over_interval, sweep_candidates};

#[derive(Clone, Debug)]
pub struct ContactConfig {
    pub j_max: usize,
    pub rtol: f64,
    /// Equispaced classification nodes (G₂ points are added to these).
    pub n_classify: usize,
    /// Nodes for branch continuation.
    pub n_branch: usize,
    /// Nodes for the G₂ scan.
    pub n_g2: usize,
    /// Anchor `L(0)`; defaults to the interval midpoint.
    pub base_t: Option<f64>,
    /// Orientation of the branch (`+1`: `⟨∂_ξ p, γ̇⟩ > 0`).
    pub orientation: i8,
}

impl Default for ContactConfig {
    fn default() -> Self {
        ContactConfig {
            j_max: DEFAULT_J_MAX,
            rtol: DEFAULT_RTOL,
            n_classify: 13,
            n_branch: 201,
            n_g2: 241,
            base_t: None,
            orientation: 1,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ContactReport {
    pub symbol: String,
    pub interval: [f64; 2],
    pub orientation: i8,
    pub j_max: usize,
    pub rtol: f64,
    pub per_t: Vec<ContactClass>,
    pub g2_points: Vec<f64>,
    pub g2_non_isolated: Vec<[f64; 2]>,
    pub sigma_global: GlobalSigma,
    /// Parameter of maximal contact.
    pub t_star: Option<f64>,
    pub b_vec: Option<[f64; 2]>,
    pub v_vec: Option<[f64; 2]>,
    pub b_dot_v: Option<f64>,
    pub leading: Option<LeadingVector>,
    pub warnings: Vec<ContactWarning>,
}

impl ContactReport {
    /// `(t, sigma, confidence)` rows for the CSV summary.
    pub fn summary_rows(&self) -> Vec<(f64, String, f64)> {
        self.per_t.iter().map(|c| (c.t, c.sigma.to_string(), c.confidence)).collect()
    }

    pub fn sigma_at(&self, t: f64) -> Option<SigmaValue> {
        self.per_t.iter().find(|c| (c.t - t).abs() < 1e-12).map(|c| c.sigma)
    }
}

/// Branch and reparametrization with the configured orientation.
pub fn prepare(sym: &SymbolModel, curve: &CurveModel, cfg: &ContactConfig) -> Result<FlowReparam, ContactError> {
    let [a, b] = curve.interval;
    let t0 = cfg.base_t.unwrap_or(0.5 * (a + b));
    let cand = sweep_candidates(sym, curve, t0)
        .into_iter()
        .find(|c| c.orientation == cfg.orientation.signum())
        .ok_or(ContactError::NoTangentialFrequency { t: t0 })?;
    let branch = branch_over_interval(sym, curve, t0, cand.xi, cfg.n_branch)?;
    flow_time_reparam(sym, curve, &branch, t0)
}

pub fn global_sigma(sym: &SymbolModel, curve: &CurveModel, cfg: &ContactConfig) -> Result<ContactReport, ContactError> {
    let reparam = prepare(sym, curve, cfg)?;
    report_from(&reparam, cfg)
}

pub fn report_from(reparam: &FlowReparam, cfg: &ContactConfig) -> Result<ContactReport, ContactError> {
    let curve = &reparam.curve;
    let g2 = g2_scan(reparam, cfg.n_g2)?;

    let mut ts = curve.grid(cfg.n_classify);
    let spacing = if ts.len() > 1 { ts[1] - ts[0] } else { 1.0 };
    for &p in &g2.points {
        if !ts.iter().any(|&t| (t - p).abs() < 1e-9 * spacing.max(1.0)) {
            ts.push(p);
        }
    }
    ts.sort_by(f64::total_cmp);
    let per_t: Vec<ContactClass> = ts
        .par_iter()
        .map(|&t| contact_order_at(reparam, t, cfg.j_max, cfg.rtol))
        .collect::<Result<_, _>>()?;

    let mut warnings = reparam.branch.warnings.clone();
    warnings.extend(classification_warnings(&per_t));
    warnings.extend(g2.non_isolated.iter().map(|r| ContactWarning::NonIsolatedG2 { from: r[0], to: r[1] }));

    let (sigma_global, idx) = sigma_sup(&per_t).expect("non-empty classification grid");
    let t_star = Some(per_t[idx].t);
    let leading = match per_t[idx].sigma.finite() {
        Some(s) if (s as usize) < cfg.j_max => {
            let lv = leading_vector_unchecked(reparam, per_t[idx].t, s)?;
            if !(lv.fit_rel_err <= B_FIT_RTOL) {
                warnings.push(ContactWarning::LeadingVector { t: lv.t, rel_err: lv.fit_rel_err });
            }
            Some(lv)
        }
        _ => None,
    };
    Ok(ContactReport {
        symbol: reparam.sym.id.clone(),
        interval: curve.interval,
        orientation: reparam.branch.orientation,
        j_max: cfg.j_max,
        rtol: cfg.rtol,
        per_t,
        g2_points: g2.points,
        g2_non_isolated: g2.non_isolated,
        sigma_global,
        t_star,
        b_vec: leading.as_ref().map(|l| l.b),
        v_vec: leading.as_ref().map(|l| l.v),
        b_dot_v: leading.as_ref().map(|l| l.pairing),
        leading,
        warnings,
    })
}
