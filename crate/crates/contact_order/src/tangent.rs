//! Tangential frequencies: `ξ` on the fiber zero set with `∂_ξ p ∥ γ̇`.

use nalgebra::Matrix2;
use serde::Serialize;
use symbol_core::{zero_on_ray, PhaseSpacePoint, SymbolModel};

use crate::curve::CurveModel;
use crate::error::{ContactError, ContactWarning};

pub const NEWTON_TOL: f64 = 1e-12;
pub const NEWTON_MAX_ITER: usize = 50;
pub const CONDITION_WARN: f64 = 1e8;
pub const SWEEP_DIRECTIONS: usize = 64;
/// Refinement depth when a continuation step fails (spacing halves each level).
const MAX_HALVINGS: usize = 12;

/// `R_{π/2} v`.
pub fn rot90<T: std::ops::Neg<Output = T>>(v: [T; 2]) -> [T; 2] {
    let [a, b] = v;
    [-b, a]
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// `Θ(t, ξ) = (⟨∂_ξ p(γ, ξ), R_{π/2}γ̇⟩, p(γ, ξ))` and its `ξ`-Jacobian.
fn theta(sym: &SymbolModel, x: [f64; 2], v: [f64; 2], xi: [f64; 2]) -> ([f64; 2], Matrix2<f64>) {
    let pt = PhaseSpacePoint::new(x, xi);
    let (_, gxi) = sym.gradient(&pt);
    let h = sym.hess_xi(&pt);
    let rv = rot90(v);
    let r = [dot(gxi, rv), sym.p(&x, &xi)];
    let j = Matrix2::new(
        h[0][0] * rv[0] + h[1][0] * rv[1],
        h[0][1] * rv[0] + h[1][1] * rv[1],
        gxi[0],
        gxi[1],
    );
    (r, j)
}

#[derive(Clone, Debug, Serialize)]
pub struct TangentSolve {
    pub xi: [f64; 2],
    pub residual: f64,
    pub iterations: usize,
    /// 2-norm condition number of the Jacobian at the root.
    pub condition: f64,
}

impl TangentSolve {
    pub fn warning(&self, t: f64) -> Option<ContactWarning> {
        (self.condition > CONDITION_WARN).then_some(ContactWarning::Admissibility { t, condition: self.condition })
    }
}

fn condition(j: &Matrix2<f64>) -> f64 {
    let sv = j.singular_values();
    let (hi, lo) = (sv.max(), sv.min());
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// Damped Newton on `ξ ↦ Θ(t, ξ)` to `|Θ| ≤ 10⁻¹²`.
pub fn tangential_frequency(
    sym: &SymbolModel,
    curve: &CurveModel,
    t: f64,
    seed: [f64; 2],
) -> Result<TangentSolve, ContactError> {
    let x = curve.point(t);
    let v = curve.velocity(t);
    let vn = v[0].hypot(v[1]);
    let v = [v[0] / vn, v[1] / vn];
    let norm = |r: [f64; 2]| r[0].hypot(r[1]);
    let mut xi = seed;
    let (mut r, mut j) = theta(sym, x, v, xi);
    for it in 0..=NEWTON_MAX_ITER {
        let res = norm(r);
        if res <= NEWTON_TOL {
            return Ok(TangentSolve { xi, residual: res, iterations: it, condition: condition(&j) });
        }
        if it == NEWTON_MAX_ITER || !res.is_finite() {
            return Err(ContactError::Seed { t, residual: res, iterations: it });
        }
        let Some(inv) = j.try_inverse() else {
            return Err(ContactError::Seed { t, residual: res, iterations: it });
        };
        let d = inv * nalgebra::Vector2::new(r[0], r[1]);
        let mut lam = 1.0;
        loop {
            let trial = [xi[0] - lam * d[0], xi[1] - lam * d[1]];
            let (rt, jt) = theta(sym, x, v, trial);
            if norm(rt) < res || lam < 1e-3 {
                xi = trial;
                r = rt;
                j = jt;
                break;
            }
            lam *= 0.5;
        }
    }
    unreachable!()
}

/// Sign of `⟨∂_ξ p, γ̇⟩`.
pub fn orientation_of(sym: &SymbolModel, curve: &CurveModel, t: f64, xi: [f64; 2]) -> i8 {
    let (_, g) = sym.gradient(&PhaseSpacePoint::new(curve.point(t), xi));
    if dot(g, curve.velocity(t)) >= 0.0 {
        1
    } else {
        -1
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TangentCandidate {
    pub xi: [f64; 2],
    pub orientation: i8,
    pub residual: f64,
}

/// All tangential frequencies at `γ(t)` found by the angular sweep of the
/// zero set (sign changes of the tangency residual between adjacent rays).
pub fn sweep_candidates(sym: &SymbolModel, curve: &CurveModel, t: f64) -> Vec<TangentCandidate> {
    let x = curve.point(t);
    let v = curve.velocity(t);
    let rv = rot90(v);
    let c = sym.region.kf_centroid();
    let pts: Vec<Option<([f64; 2], f64)>> = (0..SWEEP_DIRECTIONS)
        .map(|k| {
            let a = 2.0 * std::f64::consts::PI * k as f64 / SWEEP_DIRECTIONS as f64;
            zero_on_ray(sym, x, c, [a.cos(), a.sin()]).map(|xi| {
                let (_, g) = sym.gradient(&PhaseSpacePoint::new(x, xi));
                (xi, dot(g, rv))
            })
        })
        .collect();
    let mut out: Vec<TangentCandidate> = Vec::new();
    for k in 0..SWEEP_DIRECTIONS {
        let (Some((xa, ra)), Some((_, rb))) = (pts[k], pts[(k + 1) % SWEEP_DIRECTIONS]) else {
            continue;
        };
        if ra == 0.0 || ra.signum() != rb.signum() {
            if let Ok(sol) = tangential_frequency(sym, curve, t, xa) {
                let dup = out.iter().any(|o| (o.xi[0] - sol.xi[0]).hypot(o.xi[1] - sol.xi[1]) < 1e-8);
                if !dup {
                    out.push(TangentCandidate {
                        orientation: orientation_of(sym, curve, t, sol.xi),
                        xi: sol.xi,
                        residual: sol.residual,
                    });
                }
            }
        }
    }
    out
}

/// `ξ(t)` along a parameter grid with fixed orientation.
#[derive(Clone, Debug, Serialize)]
pub struct TangentBranch {
    pub t_grid: Vec<f64>,
    pub xi: Vec<[f64; 2]>,
    pub orientation: i8,
    pub residuals: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<ContactWarning>,
}

impl TangentBranch {
    /// Piecewise-linear interpolant of `ξ`, used as a Newton seed. Requires
    /// ascending `t_grid`; clamps outside.
    pub fn seed_at(&self, t: f64) -> [f64; 2] {
        let n = self.t_grid.len();
        let i = self.t_grid.partition_point(|&s| s < t);
        if i == 0 {
            return self.xi[0];
        }
        if i >= n {
            return self.xi[n - 1];
        }
        let (t0, t1) = (self.t_grid[i - 1], self.t_grid[i]);
        let w = (t - t0) / (t1 - t0);
        let (a, b) = (self.xi[i - 1], self.xi[i]);
        [a[0] + w * (b[0] - a[0]), a[1] + w * (b[1] - a[1])]
    }

    fn ascending(mut self) -> Self {
        if self.t_grid.len() > 1 && self.t_grid[0] > self.t_grid[1] {
            self.t_grid.reverse();
            self.xi.reverse();
            self.residuals.reverse();
        }
        self
    }
}

struct Node {
    t: f64,
    sol: TangentSolve,
}

/// One predictor–corrector step from `prev` to `tb`, halving on failure.
fn advance(
    sym: &SymbolModel,
    curve: &CurveModel,
    prev: &[Node],
    tb: f64,
    depth: usize,
    out: &mut Vec<Node>,
) -> Result<(), ContactError> {
    let last = prev.last().unwrap();
    let (ta, xa) = (last.t, last.sol.xi);
    let h = tb - ta;
    let slope = if prev.len() >= 2 {
        let p = &prev[prev.len() - 2];
        let dt = ta - p.t;
        [(xa[0] - p.sol.xi[0]) / dt, (xa[1] - p.sol.xi[1]) / dt]
    } else {
        [0.0, 0.0]
    };
    let pred = [xa[0] + slope[0] * h, xa[1] + slope[1] * h];
    let scale = h.abs() * slope[0].hypot(slope[1]).max(1.0);
    let attempt = tangential_frequency(sym, curve, tb, pred);
    let jump = attempt.as_ref().ok().map(|s| (s.xi[0] - pred[0]).hypot(s.xi[1] - pred[1]));
    match (attempt, jump) {
        (Ok(sol), Some(j)) if j <= 10.0 * scale && orientation_of(sym, curve, tb, sol.xi) == orientation_of(sym, curve, ta, xa) => {
            out.push(Node { t: tb, sol });
            Ok(())
        }
        (res, jump) => {
            if depth >= MAX_HALVINGS {
                return Err(match res {
                    Err(e) => e,
                    Ok(_) => ContactError::Branch { from: ta, to: tb, jump: jump.unwrap_or(f64::NAN), scale },
                });
            }
            let mid = 0.5 * (ta + tb);
            let mut local: Vec<Node> = Vec::new();
            advance(sym, curve, prev, mid, depth + 1, &mut local)?;
            let mut chain: Vec<Node> = prev.iter().rev().take(1).map(|n| Node { t: n.t, sol: n.sol.clone() }).collect();
            chain.extend(local.iter().map(|n| Node { t: n.t, sol: n.sol.clone() }));
            out.extend(local);
            let mut tail = Vec::new();
            advance(sym, curve, &chain, tb, depth + 1, &mut tail)?;
            out.extend(tail);
            Ok(())
        }
    }
}

/// Continue `ξ(t)` from `seed` at `t_grid[0]` along the (monotone) grid.
/// Failed steps are refined by halving; inserted nodes are kept.
pub fn continue_branch(
    sym: &SymbolModel,
    curve: &CurveModel,
    t_grid: &[f64],
    seed: [f64; 2],
) -> Result<TangentBranch, ContactError> {
    assert!(!t_grid.is_empty(), "empty grid");
    let first = tangential_frequency(sym, curve, t_grid[0], seed)?;
    let orientation = orientation_of(sym, curve, t_grid[0], first.xi);
    let mut nodes = vec![Node { t: t_grid[0], sol: first }];
    for &tb in &t_grid[1..] {
        let mut fresh = Vec::new();
        let tail_start = nodes.len().saturating_sub(2);
        advance(sym, curve, &nodes[tail_start..], tb, 0, &mut fresh)?;
        nodes.extend(fresh);
    }
    let warnings = nodes.iter().filter_map(|n| n.sol.warning(n.t)).collect();
    Ok(TangentBranch {
        t_grid: nodes.iter().map(|n| n.t).collect(),
        xi: nodes.iter().map(|n| n.sol.xi).collect(),
        residuals: nodes.iter().map(|n| n.sol.residual).collect(),
        orientation,
        warnings,
    }
    .ascending())
}

/// Branch over the whole curve interval through `(t0, seed)`, continued
/// towards both endpoints with `n` nodes in total.
pub fn branch_over_interval(
    sym: &SymbolModel,
    curve: &CurveModel,
    t0: f64,
    seed: [f64; 2],
    n: usize,
) -> Result<TangentBranch, ContactError> {
    let [a, b] = curve.interval;
    let n = n.max(3);
    let h = (b - a) / (n - 1) as f64;
    let steps = |len: f64| ((len / h).ceil() as usize).max(1);
    let fwd: Vec<f64> = {
        let m = steps(b - t0);
        (0..=m).map(|k| if k == m { b } else { t0 + (b - t0) * k as f64 / m as f64 }).collect()
    };
    let bwd: Vec<f64> = {
        let m = steps(t0 - a);
        (0..=m).map(|k| if k == m { a } else { t0 - (t0 - a) * k as f64 / m as f64 }).collect()
    };
    let right = if b > t0 { Some(continue_branch(sym, curve, &fwd, seed)?) } else { None };
    let left = if t0 > a { Some(continue_branch(sym, curve, &bwd, seed)?) } else { None };
    let mut out = match (left, right) {
        (Some(l), Some(r)) => {
            let mut l = l;
            // left ends at t0 (ascending); right starts at t0
            l.t_grid.extend_from_slice(&r.t_grid[1..]);
            l.xi.extend_from_slice(&r.xi[1..]);
            l.residuals.extend_from_slice(&r.residuals[1..]);
            l.warnings.extend(r.warnings);
            l
        }
        (Some(l), None) => l,
        (None, Some(r)) => r,
        (None, None) => continue_branch(sym, curve, &[t0], seed)?,
    };
    out.warnings.dedup();
    Ok(out)
}

/// Every branch through the sweep candidates at `t0` (both orientations).
pub fn all_branches(
    sym: &SymbolModel,
    curve: &CurveModel,
    t0: f64,
    n: usize,
) -> Vec<Result<TangentBranch, ContactError>> {
    sweep_candidates(sym, curve, t0)
        .into_iter()
        .map(|c| branch_over_interval(sym, curve, t0, c.xi, n))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola_at_origin() {
        let sym = SymbolModel::torus_laplace();
        let c = CurveModel::monomial_graph(2, [-1.0, 1.0]).unwrap();
        let s = tangential_frequency(&sym, &c, 0.0, [0.9, 0.1]).unwrap();
        assert!((s.xi[0] - 1.0).abs() < 1e-12 && s.xi[1].abs() < 1e-12);
        assert!(s.condition < 10.0);
    }

    #[test]
    fn sweep_finds_both_orientations() {
        let sym = SymbolModel::torus_laplace();
        let c = CurveModel::monomial_graph(2, [-1.0, 1.0]).unwrap();
        let cands = sweep_candidates(&sym, &c, 0.3);
        assert_eq!(cands.len(), 2);
        assert_eq!(cands.iter().map(|c| c.orientation as i32).sum::<i32>(), 0);
    }

    #[test]
    fn branch_is_unit_tangent() {
        let sym = SymbolModel::torus_laplace();
        let c = CurveModel::monomial_graph(2, [-1.0, 1.0]).unwrap();
        let grid: Vec<f64> = (0..=40).map(|k| -1.0 + k as f64 / 20.0).collect();
        let br = continue_branch(&sym, &c, &grid, [0.5, -0.8]).unwrap();
        assert_eq!(br.orientation, 1);
        for (t, xi) in br.t_grid.iter().zip(&br.xi) {
            let n = (1.0 + 4.0 * t * t).sqrt();
            assert!((xi[0] - 1.0 / n).abs() < 1e-12 && (xi[1] - 2.0 * t / n).abs() < 1e-12);
        }
        assert!(br.residuals.iter().all(|&r| r <= 1e-10));
    }

    #[test]
    fn coarse_grid_is_refined() {
        // a half-turn in one step would land on the opposite orientation
        let sym = SymbolModel::hermite();
        let c = CurveModel::from_spec(&crate::curve::CurveSpec::Circle { center: [0.0, 0.0], radius: 0.5, interval: None })
            .unwrap();
        let br = continue_branch(&sym, &c, &[0.0, 3.0], [0.0, 0.8]).unwrap();
        assert!(br.t_grid.len() > 2);
        for (t, xi) in br.t_grid.iter().zip(&br.xi) {
            assert_eq!(orientation_of(&sym, &c, *t, *xi), 1);
        }
    }
}
