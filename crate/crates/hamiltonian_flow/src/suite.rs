//! Randomized property suite over the built-in symbols: energy conservation,
//! time reversal, recursion-vs-finite-difference jets, and optionally the
//! symplectic form.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use symbol_core::{PhaseSpacePoint, SymbolKind, SymbolModel};

use crate::error::FlowError;
use crate::flow::{flow_map, integrate_flow};
use crate::jet::{flow_jet, JetMethod};

pub const ENERGY_TOL: f64 = 1e-8;
pub const REVERSAL_TOL: f64 = 1e-7;
pub const JET_RTOL: f64 = 1e-4;
pub const SYMPLECTIC_TOL: f64 = 1e-5;
const FLOW_TOL: f64 = 1e-10;

/// A start on `{p = 0}` whose orbit stays inside the chart for `|s| ≤ 1`.
pub fn random_start<R: Rng>(sym: &SymbolModel, rng: &mut R) -> PhaseSpacePoint {
    let a = rng.random_range(0.0..2.0 * PI);
    match sym.kind {
        SymbolKind::SphereLaplace => {
            // |ξ₂| = sin θ_min bounds the orbit away from the poles
            let th = rng.random_range(0.6..PI - 0.6);
            let phi = rng.random_range(-1.0..1.0);
            let m = rng.random_range(0.5f64.sin()..th.sin()) * if rng.random::<bool>() { 1.0 } else { -1.0 };
            let xi1 = (1.0 - (m / th.sin()).powi(2)).max(0.0).sqrt() * if a < PI { 1.0 } else { -1.0 };
            PhaseSpacePoint::new([th, phi], [xi1, m])
        }
        SymbolKind::Hermite => {
            let r = rng.random_range(0.0..0.6f64);
            let b = rng.random_range(0.0..2.0 * PI);
            let q = (1.0 - r * r).sqrt();
            PhaseSpacePoint::new([r * b.cos(), r * b.sin()], [q * a.cos(), q * a.sin()])
        }
        _ => {
            let x = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            PhaseSpacePoint::new(x, [a.cos(), a.sin()])
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowSuiteReport {
    pub symbol: String,
    pub starts: usize,
    pub energy_max: f64,
    pub reversal_max: f64,
    pub jet_max: f64,
    pub symplectic_max: Option<f64>,
    pub pass: bool,
}

fn max_abs(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Largest relative discrepancy (scale `max(1, |rec|)`) over orders `0..=k`.
pub fn jet_discrepancy(sym: &SymbolModel, start: &PhaseSpacePoint, k: usize) -> Result<f64, FlowError> {
    let rec = flow_jet(sym, start, k, JetMethod::Recursion)?;
    let fd = flow_jet(sym, start, k, JetMethod::FiniteDifference)?;
    let mut worst = 0.0f64;
    for j in 0..=k {
        let (a, b) = (rec.state(j), fd.state(j));
        for i in 0..4 {
            worst = worst.max((a[i] - b[i]).abs() / a[i].abs().max(1.0));
        }
    }
    Ok(worst)
}

/// `‖JᵀΩJ − Ω‖_max` for the flow map at time `s` (central differences).
pub fn symplectic_defect(sym: &SymbolModel, start: &PhaseSpacePoint, s: f64) -> Result<f64, FlowError> {
    let h = 1e-5;
    let y0 = start.to_array();
    let mut jac = [[0.0; 4]; 4];
    for c in 0..4 {
        let mut yp = y0;
        let mut ym = y0;
        yp[c] += h;
        ym[c] -= h;
        let fp = flow_map(sym, &PhaseSpacePoint::from_array(&yp), s, 1e-13)?.to_array();
        let fm = flow_map(sym, &PhaseSpacePoint::from_array(&ym), s, 1e-13)?.to_array();
        for r in 0..4 {
            jac[r][c] = (fp[r] - fm[r]) / (2.0 * h);
        }
    }
    // Ω = [[0, I], [−I, 0]]
    let omega = |i: usize, j: usize| -> f64 {
        match (i, j) {
            (0, 2) | (1, 3) => 1.0,
            (2, 0) | (3, 1) => -1.0,
            _ => 0.0,
        }
    };
    let mut worst = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            let mut v = 0.0;
            for a in 0..4 {
                for b in 0..4 {
                    v += jac[a][i] * omega(a, b) * jac[b][j];
                }
            }
            worst = worst.max((v - omega(i, j)).abs());
        }
    }
    Ok(worst)
}

pub fn run_flow_suite(sym: &SymbolModel, starts: usize, seed: u64, symplectic: bool) -> Result<FlowSuiteReport, FlowError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = FlowSuiteReport {
        symbol: sym.id.clone(),
        starts,
        energy_max: 0.0,
        reversal_max: 0.0,
        jet_max: 0.0,
        symplectic_max: symplectic.then_some(0.0),
        pass: true,
    };
    for _ in 0..starts {
        let st = random_start(sym, &mut rng);
        let tr = integrate_flow(sym, &st, 1.0, FLOW_TOL)?;
        let p0 = sym.p(&st.x, &st.xi);
        let mut e = tr.energy_drift;
        for i in 0..=40 {
            let q = tr.at(-1.0 + 0.05 * i as f64);
            e = e.max((sym.p(&q.x, &q.xi) - p0).abs());
        }
        rep.energy_max = rep.energy_max.max(e);
        let fwd = flow_map(sym, &st, 1.0, FLOW_TOL)?;
        let back = flow_map(sym, &fwd, -1.0, FLOW_TOL)?;
        rep.reversal_max = rep.reversal_max.max(max_abs(&back.to_array(), &st.to_array()));
        rep.jet_max = rep.jet_max.max(jet_discrepancy(sym, &st, 5)?);
        if let Some(m) = rep.symplectic_max.as_mut() {
            *m = m.max(symplectic_defect(sym, &st, 0.5)?);
        }
    }
    rep.pass = rep.energy_max <= ENERGY_TOL
        && rep.reversal_max <= REVERSAL_TOL
        && rep.jet_max <= JET_RTOL
        && rep.symplectic_max.is_none_or(|m| m <= SYMPLECTIC_TOL);
    Ok(rep)
}
