//! Global flow-time reparametrization `s ↦ L(s)` of a curve.

use hamiltonian_flow::{DenseSolution, Dopri};
use serde::Serialize;
use symbol_core::{PhaseSpacePoint, SymbolModel};

use crate::curve::CurveModel;
use crate::error::ContactError;
use crate::local::{local_lift, LocalLift, A1_MIN};
use crate::tangent::{tangential_frequency, TangentBranch};

const L_TOL: f64 = 1e-12;

/// Curve together with a tangential-frequency branch and the map `L`.
#[derive(Clone, Debug)]
pub struct FlowReparam {
    pub sym: SymbolModel,
    pub curve: CurveModel,
    pub branch: TangentBranch,
    /// `L(0)`.
    pub anchor: f64,
    /// `L` on its flow-time span (ascending); `y = [L]`.
    pub l_dense: DenseSolution,
    /// Flow times at which `L` reaches the interval ends.
    pub s_range: (f64, f64),
}

#[derive(Clone, Debug, Serialize)]
pub struct ReparamSample {
    pub s: f64,
    pub t: f64,
    /// `|γ'(L)L' − ∂_ξ p(γ(L), ξ(L))|`.
    pub defect: f64,
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// `L'` as a function of the curve parameter.
fn speed_ratio(sym: &SymbolModel, curve: &CurveModel, branch: &TangentBranch, t: f64) -> Result<f64, ContactError> {
    let sol = tangential_frequency(sym, curve, t, branch.seed_at(t))?;
    let (_, g) = sym.gradient(&PhaseSpacePoint::new(curve.point(t), sol.xi));
    let gn = g[0].hypot(g[1]);
    if gn < A1_MIN {
        return Err(ContactError::A1Violation { t, norm: gn });
    }
    let v = curve.velocity(t);
    Ok(dot(g, v) / dot(v, v))
}

/// Solve `L' = ±|∂_ξ p(γ(L), ξ(L))| / |γ'(L)|` (sign from the branch
/// orientation) with `L(0) = anchor`, in both time directions until `L`
/// leaves the curve interval.
pub fn flow_time_reparam(
    sym: &SymbolModel,
    curve: &CurveModel,
    branch: &TangentBranch,
    anchor: f64,
) -> Result<FlowReparam, ContactError> {
    let [a, b] = curve.interval;
    let mut gmin = f64::INFINITY;
    for &t in &branch.t_grid {
        gmin = gmin.min(speed_ratio(sym, curve, branch, t)?.abs());
    }
    let s_end = 1.5 * (b - a) / gmin;
    let failure = std::cell::RefCell::new(None);
    let rhs = |y: &[f64]| -> Vec<f64> {
        let t = y[0].clamp(a, b);
        match speed_ratio(sym, curve, branch, t) {
            Ok(g) => vec![g],
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                vec![f64::NAN]
            }
        }
    };
    // beyond the interval the clamped field continues with |L'| ≥ gmin, so
    // both runs leave [a, b] before ±s_end; the exits are located afterwards
    let solver = Dopri::new(&rhs, L_TOL);
    let fwd = solver.solve(&[anchor], s_end, &|_| true);
    let bwd = solver.solve(&[anchor], -s_end, &|_| true);
    if let Some(e) = failure.borrow_mut().take() {
        return Err(e);
    }
    let (fwd, bwd) = (fwd?, bwd?.ascending());
    let mut l_dense = bwd;
    l_dense.s.extend_from_slice(&fwd.s[1..]);
    l_dense.y.extend_from_slice(&fwd.y[1..]);
    l_dense.f.extend_from_slice(&fwd.f[1..]);
    l_dense.a = None;
    l_dense.steps += fwd.steps;
    l_dense.rejected += fwd.rejected;
    l_dense.stopped |= fwd.stopped;
    let inside = |s: f64| {
        let l = l_dense.eval(s)[0];
        l >= a && l <= b
    };
    let s_range = (exit_time(&inside, 0.0, l_dense.span().0), exit_time(&inside, 0.0, l_dense.span().1));
    Ok(FlowReparam { sym: sym.clone(), curve: curve.clone(), branch: branch.clone(), anchor, l_dense, s_range })
}

/// Last time between `s0` and `s1` (scanning from `s0`) before `inside` fails.
fn exit_time(inside: &dyn Fn(f64) -> bool, s0: f64, s1: f64) -> f64 {
    const SCAN: usize = 512;
    let mut prev = s0;
    for k in 1..=SCAN {
        let s = s0 + (s1 - s0) * k as f64 / SCAN as f64;
        if !inside(s) {
            let (mut lo, mut hi) = (prev, s);
            for _ in 0..100 {
                let m = 0.5 * (lo + hi);
                if inside(m) {
                    lo = m;
                } else {
                    hi = m;
                }
            }
            return lo;
        }
        prev = s;
    }
    s1
}

impl FlowReparam {
    pub fn s_span(&self) -> (f64, f64) {
        self.s_range
    }

    /// `L(s)`.
    pub fn t_of(&self, s: f64) -> f64 {
        self.l_dense.eval(s)[0]
    }

    /// Tangential frequency at curve parameter `t`.
    pub fn xi_at(&self, t: f64) -> Result<[f64; 2], ContactError> {
        Ok(tangential_frequency(&self.sym, &self.curve, t, self.branch.seed_at(t))?.xi)
    }

    /// Series lift at curve parameter `t`.
    pub fn lift(&self, t: f64, order: usize) -> Result<LocalLift, ContactError> {
        local_lift(&self.sym, &self.curve, t, self.xi_at(t)?, order)
    }

    /// `∂_s^j (γ∘L)(s)`, via the local series at `L(s)`.
    pub fn gamma_deriv(&self, s: f64, j: usize) -> Result<[f64; 2], ContactError> {
        Ok(self.lift(self.t_of(s), j + 2)?.gamma_deriv(j))
    }

    /// Samples of `L` on `n` flow times with the defining-equation defect,
    /// using `L'(s) = g(L(s))`.
    pub fn samples(&self, n: usize) -> Result<Vec<ReparamSample>, ContactError> {
        let (lo, hi) = self.s_span();
        (0..n)
            .map(|k| {
                let s = lo + (hi - lo) * k as f64 / (n.max(2) - 1) as f64;
                let t = self.t_of(s).clamp(self.curve.interval[0], self.curve.interval[1]);
                let xi = self.xi_at(t)?;
                let (_, gxi) = self.sym.gradient(&PhaseSpacePoint::new(self.curve.point(t), xi));
                let lp = speed_ratio(&self.sym, &self.curve, &self.branch, t)?;
                let v = self.curve.velocity(t);
                let defect = (v[0] * lp - gxi[0]).hypot(v[1] * lp - gxi[1]);
                Ok(ReparamSample { s, t, defect })
            })
            .collect()
    }
}
