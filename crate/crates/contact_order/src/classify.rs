//! Contact order by jet comparison, G₂ detection and the leading vector `b`.

use hamiltonian_flow::{flow_jet, flow_map, JetMethod};
use nalgebra::{DMatrix, DVector};
use polynomial_lab::p_sigma_f64;
use serde::{Serialize, Serializer};
use symbol_core::SymbolModel;

use crate::error::{ContactError, ContactWarning};
use crate::local::LocalLift;
use crate::reparam::FlowReparam;
use crate::tangent::rot90;

pub const DEFAULT_J_MAX: usize = 8;
pub const DEFAULT_RTOL: f64 = 1e-5;
/// Minimum `log₁₀` plateau ratio for a confident classification.
pub const CONFIDENCE_MIN: f64 = 2.0;
/// Noise floor used when no jet gap lies below threshold.
const GAP_FLOOR: f64 = 1e-15;
/// `‖H‖` at or below this counts as a G₂ zero.
pub const G2_ZERO_TOL: f64 = 1e-10;
/// Consecutive vanishing grid nodes that make a zero set non-isolated.
const G2_RUN: usize = 3;
pub const B_FIT_RTOL: f64 = 0.02;
/// Half-width and points per axis of the least-squares sample box.
const FIT_HALF_WIDTH: f64 = 0.05;
const FIT_POINTS: usize = 11;
const FIT_FLOW_TOL: f64 = 1e-13;

/// `σ(t)`: a finite order or "at least `j_max`".
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SigmaValue {
    Finite(u32),
    AtLeast(u32),
}

impl SigmaValue {
    pub fn finite(self) -> Option<u32> {
        match self {
            SigmaValue::Finite(s) => Some(s),
            SigmaValue::AtLeast(_) => None,
        }
    }

    /// Ordering key; "at least" ranks above every finite order.
    fn rank(self) -> u64 {
        match self {
            SigmaValue::Finite(s) => s as u64,
            SigmaValue::AtLeast(_) => u64::MAX,
        }
    }
}

impl std::fmt::Display for SigmaValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SigmaValue::Finite(s) => write!(f, "{s}"),
            SigmaValue::AtLeast(j) => write!(f, ">={j}"),
        }
    }
}

impl Serialize for SigmaValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            SigmaValue::Finite(v) => s.serialize_u32(*v),
            SigmaValue::AtLeast(_) => s.serialize_str(&self.to_string()),
        }
    }
}

/// Global contact order: finite, or the infinity flag.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GlobalSigma {
    Finite(u32),
    InfinityFlag,
}

impl std::fmt::Display for GlobalSigma {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GlobalSigma::Finite(s) => write!(f, "{s}"),
            GlobalSigma::InfinityFlag => write!(f, "inf-flag"),
        }
    }
}

impl Serialize for GlobalSigma {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            GlobalSigma::Finite(v) => s.serialize_u32(*v),
            GlobalSigma::InfinityFlag => s.serialize_str("inf-flag"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ContactClass {
    pub t: f64,
    pub sigma: SigmaValue,
    pub confidence: f64,
    /// `‖D_j‖` for `j = 2..=j_max`.
    pub jet_gaps: Vec<f64>,
    /// `max(1, ‖γ^{(j)}‖)` for the same `j`.
    pub scales: Vec<f64>,
    pub uncertain: bool,
}

fn norm2(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

/// Series order needed to classify up to `j_max` and fit `b`.
pub fn lift_order(j_max: usize) -> usize {
    j_max + 4
}

/// `D_j = ∂_s^j z_s(γ, ξ)|₀ − ∂_s^j γ(L(s))|₀` for `j = 0..=k`.
pub fn jet_gaps(sym: &SymbolModel, lift: &LocalLift, k: usize) -> Result<Vec<[f64; 2]>, ContactError> {
    let jet = flow_jet(sym, &lift.start(), k, JetMethod::Recursion)?;
    Ok((0..=k)
        .map(|j| {
            let z = jet.z_coeffs[j];
            let g = lift.gamma_deriv(j);
            [z[0] - g[0], z[1] - g[1]]
        })
        .collect())
}

/// Classify one lift: `σ = (first j with ‖D_j‖ > rtol·scale_j) − 1`.
pub fn classify_lift(sym: &SymbolModel, lift: &LocalLift, j_max: usize, rtol: f64) -> Result<ContactClass, ContactError> {
    assert!(j_max >= 2, "j_max ≥ 2");
    let d = jet_gaps(sym, lift, j_max)?;
    let mut gaps = Vec::new();
    let mut scales = Vec::new();
    let mut first = None;
    let mut below = 0.0f64;
    for j in 2..=j_max {
        let g = norm2(d[j]);
        let sc = norm2(lift.gamma_deriv(j)).max(1.0);
        gaps.push(g);
        scales.push(sc);
        if first.is_none() {
            if g > rtol * sc {
                first = Some((j, g / sc));
            } else {
                below = below.max(g / sc);
            }
        }
    }
    let (sigma, confidence) = match first {
        Some((j, n)) => (SigmaValue::Finite(j as u32 - 1), (n / below.max(GAP_FLOOR)).log10()),
        None => (SigmaValue::AtLeast(j_max as u32), (rtol / below.max(GAP_FLOOR)).log10()),
    };
    Ok(ContactClass { t: lift.t, sigma, confidence, jet_gaps: gaps, scales, uncertain: confidence < CONFIDENCE_MIN })
}

/// `σ(t)` on a reparametrized curve.
pub fn contact_order_at(reparam: &FlowReparam, t: f64, j_max: usize, rtol: f64) -> Result<ContactClass, ContactError> {
    let lift = reparam.lift(t, lift_order(j_max))?;
    classify_lift(&reparam.sym, &lift, j_max, rtol)
}

/// `H = ∂_s ξ(L(s)) + ∂_x p(γ, ξ)` at `s = 0`.
pub fn g2_residual(sym: &SymbolModel, lift: &LocalLift) -> [f64; 2] {
    let (gx, _) = sym.gradient(&lift.start());
    let xd = lift.xi_deriv(1);
    [xd[0] + gx[0], xd[1] + gx[1]]
}

/// Signed `H` along the unit normal `R_{π/2}∂_ξp/|∂_ξp|` (H is normal to `∂_ξ p`).
fn g2_signed(sym: &SymbolModel, lift: &LocalLift) -> f64 {
    let (_, gxi) = sym.gradient(&lift.start());
    let n = rot90(gxi);
    let h = g2_residual(sym, lift);
    (h[0] * n[0] + h[1] * n[1]) / norm2(gxi)
}

pub fn g2_test(reparam: &FlowReparam, t: f64, rtol: f64) -> Result<bool, ContactError> {
    let lift = reparam.lift(t, 3)?;
    Ok(norm2(g2_residual(&reparam.sym, &lift)) <= rtol)
}

#[derive(Clone, Debug, Serialize)]
pub struct G2Scan {
    pub points: Vec<f64>,
    /// Parameter runs where `‖H‖` vanishes on consecutive nodes.
    pub non_isolated: Vec<[f64; 2]>,
}

/// Scan `H` on `n_grid` nodes: sign changes are bisected, non-crossing local
/// minima of `|H|` are refined by golden section and kept if `‖H‖ ≤ 10⁻¹⁰`.
pub fn g2_scan(reparam: &FlowReparam, n_grid: usize) -> Result<G2Scan, ContactError> {
    let sym = &reparam.sym;
    let h_at = |t: f64| -> Result<f64, ContactError> { Ok(g2_signed(sym, &reparam.lift(t, 3)?)) };
    let grid = reparam.curve.grid(n_grid.max(3));
    let vals: Vec<f64> = grid.iter().map(|&t| h_at(t)).collect::<Result<_, _>>()?;
    let n = grid.len();
    let zero = |v: f64| v.abs() <= G2_ZERO_TOL;

    let mut in_run = vec![false; n];
    let mut non_isolated = Vec::new();
    let mut i = 0;
    while i < n {
        if zero(vals[i]) {
            let mut j = i;
            while j + 1 < n && zero(vals[j + 1]) {
                j += 1;
            }
            if j + 1 - i >= G2_RUN {
                in_run[i..=j].iter_mut().for_each(|f| *f = true);
                non_isolated.push([grid[i], grid[j]]);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }

    let mut pts: Vec<f64> = Vec::new();
    for k in 0..n {
        if in_run[k] {
            continue;
        }
        if vals[k] == 0.0 {
            pts.push(grid[k]);
            continue;
        }
        // sign change on (t_k, t_{k+1})
        if k + 1 < n && !in_run[k + 1] && vals[k + 1] != 0.0 && vals[k].signum() != vals[k + 1].signum() {
            let (mut lo, mut hi, mut flo) = (grid[k], grid[k + 1], vals[k]);
            for _ in 0..200 {
                let m = 0.5 * (lo + hi);
                if m <= lo || m >= hi {
                    break;
                }
                let fm = h_at(m)?;
                if fm == 0.0 {
                    lo = m;
                    hi = m;
                    break;
                }
                if fm.signum() == flo.signum() {
                    lo = m;
                    flo = fm;
                } else {
                    hi = m;
                }
            }
            pts.push(0.5 * (lo + hi));
            continue;
        }
        // non-crossing local minimum of |H|
        let left = if k > 0 { vals[k - 1].abs() } else { f64::INFINITY };
        let right = if k + 1 < n { vals[k + 1].abs() } else { f64::INFINITY };
        let same_sign = |j: usize| vals[j].signum() == vals[k].signum();
        let crossing = (k > 0 && !same_sign(k - 1)) || (k + 1 < n && !same_sign(k + 1));
        if !crossing && vals[k].abs() <= left && vals[k].abs() < right {
            let lo = grid[k.saturating_sub(1)];
            let hi = grid[(k + 1).min(n - 1)];
            let (tm, fm) = golden_min(|t| h_at(t).map(f64::abs), lo, hi)?;
            if fm <= G2_ZERO_TOL {
                pts.push(tm);
            }
        }
    }
    pts.sort_by(f64::total_cmp);
    let spacing = (grid[n - 1] - grid[0]) / (n - 1) as f64;
    pts.dedup_by(|b, a| (*b - *a).abs() < 0.5 * spacing);
    Ok(G2Scan { points: pts, non_isolated })
}

fn golden_min(
    f: impl Fn(f64) -> Result<f64, ContactError>,
    mut a: f64,
    mut b: f64,
) -> Result<(f64, f64), ContactError> {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..120 {
        if (b - a).abs() <= 1e-14 * (1.0 + a.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc < fd { (c, fc) } else { (d, fd) })
}

#[derive(Clone, Debug, Serialize)]
pub struct LeadingVector {
    pub t: f64,
    pub sigma: u32,
    /// `D_{σ+1}`: coefficient of `P_σ(u, v)` in the gap expansion.
    pub b: [f64; 2],
    /// `∂_ξ²p (ξ^{(σ)} + ∂^{σ−1}∂_x p)` along the lift; equals `−b`.
    pub b_formula: [f64; 2],
    /// Unit vector `R_{π/2}∂_ξp/|∂_ξp|`.
    pub v: [f64; 2],
    pub pairing: f64,
    pub fit: [f64; 2],
    pub fit_rel_err: f64,
    /// RMS residual of the least-squares fit relative to the sample RMS.
    pub fit_residual: f64,
}

/// `b` at `t0` from the lift, cross-checked by a least-squares fit of
/// `E(u, v) = z_{v−u}(γ(L(u)), ξ(L(u))) − γ(L(v))` against `P_σ` plus all
/// monomials of degrees `σ+2`, `σ+3`.
pub fn leading_vector_b(reparam: &FlowReparam, t0: f64, sigma: u32) -> Result<LeadingVector, ContactError> {
    let lv = leading_vector_unchecked(reparam, t0, sigma)?;
    if !(lv.fit_rel_err <= B_FIT_RTOL) {
        return Err(ContactError::LeadingVector { b: lv.b, fit: lv.fit, rel_err: lv.fit_rel_err });
    }
    Ok(lv)
}

pub fn leading_vector_unchecked(reparam: &FlowReparam, t0: f64, sigma: u32) -> Result<LeadingVector, ContactError> {
    assert!(sigma >= 1, "σ ≥ 1");
    let sym = &reparam.sym;
    let s = sigma as usize;
    let lift = reparam.lift(t0, (s + 6).max(lift_order(DEFAULT_J_MAX)))?;
    let d = jet_gaps(sym, &lift, s + 1)?;
    let b = d[s + 1];

    let start = lift.start();
    let h = sym.hess_xi(&start);
    let (gx_s, _) = sym.grad(&lift.gamma_s, &lift.xi_s);
    let w = [lift.xi_s[0].deriv(s) + gx_s[0].deriv(s - 1), lift.xi_s[1].deriv(s) + gx_s[1].deriv(s - 1)];
    let b_formula = [h[0][0] * w[0] + h[0][1] * w[1], h[1][0] * w[0] + h[1][1] * w[1]];

    let (_, gxi) = sym.gradient(&start);
    let gn = norm2(gxi);
    let v = [-gxi[1] / gn, gxi[0] / gn];
    let pairing = b[0] * v[0] + b[1] * v[1];

    // least-squares cross-check
    let mut monos: Vec<(i32, i32)> = Vec::new();
    for deg in [s + 2, s + 3] {
        for a in 0..=deg {
            monos.push((a as i32, (deg - a) as i32));
        }
    }
    let m = FIT_POINTS * FIT_POINTS;
    let ncol = 1 + monos.len();
    let mut design = DMatrix::<f64>::zeros(m, ncol);
    let mut rhs = [DVector::<f64>::zeros(m), DVector::<f64>::zeros(m)];
    let node = |k: usize| -FIT_HALF_WIDTH + 2.0 * FIT_HALF_WIDTH * k as f64 / (FIT_POINTS - 1) as f64;
    let mut row = 0;
    for i in 0..FIT_POINTS {
        for j in 0..FIT_POINTS {
            let (u, vv) = (node(i), node(j));
            let from = lift.eval(u);
            let to = lift.eval(vv);
            let e = if i == j { [0.0, 0.0] } else {
                let z = flow_map(sym, &from, vv - u, FIT_FLOW_TOL)?;
                [z.x[0] - to.x[0], z.x[1] - to.x[1]]
            };
            design[(row, 0)] = p_sigma_f64(sigma, u, vv);
            for (c, &(pa, pb)) in monos.iter().enumerate() {
                design[(row, c + 1)] = u.powi(pa) * vv.powi(pb);
            }
            rhs[0][row] = e[0];
            rhs[1][row] = e[1];
            row += 1;
        }
    }
    // column scaling for conditioning
    let colscale: Vec<f64> = (0..ncol).map(|c| design.column(c).norm().max(1e-300)).collect();
    for c in 0..ncol {
        let sc = colscale[c];
        design.column_mut(c).iter_mut().for_each(|x| *x /= sc);
    }
    let svd = design.clone().svd(true, true);
    let mut fit = [0.0; 2];
    let mut res_num = 0.0;
    let mut res_den = 0.0;
    for k in 0..2 {
        let coef = svd.solve(&rhs[k], 1e-14).map_err(|e| ContactError::Curve(e.to_string()))?;
        fit[k] = coef[0] / colscale[0];
        let r = &design * &coef - &rhs[k];
        res_num += r.norm_squared();
        res_den += rhs[k].norm_squared();
    }
    let fit_rel_err = norm2([fit[0] - b[0], fit[1] - b[1]]) / norm2(b).max(1e-300);
    let fit_residual = (res_num / res_den.max(1e-300)).sqrt();
    Ok(LeadingVector { t: t0, sigma, b, b_formula, v, pairing, fit, fit_rel_err, fit_residual })
}

/// Collect `UncertainClassification` warnings.
pub fn classification_warnings(per_t: &[ContactClass]) -> Vec<ContactWarning> {
    per_t
        .iter()
        .filter(|c| c.uncertain)
        .map(|c| ContactWarning::UncertainClassification { t: c.t, confidence: c.confidence })
        .collect()
}

/// Maximum over `per_t`, mapping any "at least `j_max`" to the infinity flag.
pub fn sigma_sup(per_t: &[ContactClass]) -> Option<(GlobalSigma, usize)> {
    let (i, c) = per_t.iter().enumerate().max_by(|a, b| {
        a.1.sigma.rank().cmp(&b.1.sigma.rank()).then(b.0.cmp(&a.0))
    })?;
    Some(match c.sigma {
        SigmaValue::Finite(s) => (GlobalSigma::Finite(s), i),
        SigmaValue::AtLeast(_) => (GlobalSigma::InfinityFlag, i),
    })
}
