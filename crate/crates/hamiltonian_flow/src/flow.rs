use serde::Serialize;
use symbol_core::{PhaseSpacePoint, Scalar, SymbolModel, Taylor};

use crate::error::FlowError;
use crate::integrator::{DenseSolution, Dopri};

/// `F(y) = (∂_ξp, −∂ₓp)` on any scalar carrier.
pub fn hamilton_field<T: Scalar>(sym: &SymbolModel, y: &[T; 4]) -> [T; 4] {
    let x = [y[0].clone(), y[1].clone()];
    let xi = [y[2].clone(), y[3].clone()];
    let (gx, gxi) = sym.grad(&x, &xi);
    let [gx0, gx1] = gx;
    let [gxi0, gxi1] = gxi;
    [gxi0, gxi1, -gx0, -gx1]
}

/// Normalized Taylor coefficients `c_j` of the flow, `κ_s = Σ c_j s^j`, `j ≤ k`.
///
/// Taylor-mode recursion: with the series known to order `m`, evaluating the
/// field on it determines the coefficient of order `m + 1`.
pub fn taylor_coefficients(sym: &SymbolModel, start: &[f64; 4], k: usize) -> Vec<[f64; 4]> {
    let mut c = vec![*start];
    for m in 0..k {
        let y: [Taylor; 4] = std::array::from_fn(|i| {
            let coeffs: Vec<f64> = c.iter().map(|cj| cj[i]).collect();
            Taylor::from_coeffs(&coeffs)
        });
        let f = hamilton_field(sym, &y);
        c.push(std::array::from_fn(|i| f[i].c[m] / (m + 1) as f64));
    }
    c
}

pub(crate) fn field_vec(sym: &SymbolModel, y: &[f64]) -> Vec<f64> {
    hamilton_field(sym, &[y[0], y[1], y[2], y[3]]).to_vec()
}

pub(crate) fn accel_vec(sym: &SymbolModel, y: &[f64]) -> Vec<f64> {
    let c = taylor_coefficients(sym, &[y[0], y[1], y[2], y[3]], 2);
    c[2].iter().map(|v| 2.0 * v).collect()
}

#[derive(Clone, Debug)]
pub struct FlowTrajectory {
    pub origin: PhaseSpacePoint,
    pub samples: Vec<(f64, PhaseSpacePoint)>,
    pub energy_drift: f64,
    /// The orbit left the doubled admissibility box and was truncated.
    pub boundary_exit: bool,
    dense: DenseSolution,
}

#[derive(Serialize)]
pub struct TrajectoryRow {
    pub s: f64,
    pub x1: f64,
    pub x2: f64,
    pub xi1: f64,
    pub xi2: f64,
    pub p_value: f64,
}

impl FlowTrajectory {
    pub fn span(&self) -> (f64, f64) {
        self.dense.span()
    }

    /// Dense output at flow time `s`.
    pub fn at(&self, s: f64) -> PhaseSpacePoint {
        PhaseSpacePoint::from_array(&self.dense.eval(s))
    }

    pub fn rows(&self, sym: &SymbolModel) -> Vec<TrajectoryRow> {
        self.samples
            .iter()
            .map(|(s, p)| TrajectoryRow {
                s: *s,
                x1: p.x[0],
                x2: p.x[1],
                xi1: p.xi[0],
                xi2: p.xi[1],
                p_value: sym.p(&p.x, &p.xi),
            })
            .collect()
    }
}

fn check_tol(tol: f64) -> Result<(), FlowError> {
    if (1e-14..=1e-6).contains(&tol) {
        Ok(())
    } else {
        Err(FlowError::Tolerance(tol))
    }
}

/// Flow on `[−s_max, s_max]` with quintic Hermite dense output.
pub fn integrate_flow(
    sym: &SymbolModel,
    start: &PhaseSpacePoint,
    s_max: f64,
    tol: f64,
) -> Result<FlowTrajectory, FlowError> {
    check_tol(tol)?;
    let rhs = |y: &[f64]| field_vec(sym, y);
    let acc = |y: &[f64]| accel_vec(sym, y);
    let region = sym.region.scaled(2.0);
    let guard = |y: &[f64]| region.contains(&PhaseSpacePoint::from_array(y));
    let solver = Dopri::new(&rhs, tol).with_acc(&acc);
    let y0 = start.to_array();
    let fwd = solver.solve(&y0, s_max.abs(), &guard)?;
    let bwd = solver.solve(&y0, -s_max.abs(), &guard)?.ascending();
    let boundary_exit = fwd.stopped || bwd.stopped;
    let mut dense = bwd;
    dense.s.pop();
    dense.y.pop();
    dense.f.pop();
    if let Some(a) = dense.a.as_mut() {
        a.pop();
    }
    dense.s.extend(fwd.s);
    dense.y.extend(fwd.y);
    dense.f.extend(fwd.f);
    if let (Some(a), Some(b)) = (dense.a.as_mut(), fwd.a) {
        a.extend(b);
    }
    dense.steps += fwd.steps;
    dense.rejected += fwd.rejected;
    let p0 = sym.p(&start.x, &start.xi);
    let samples: Vec<(f64, PhaseSpacePoint)> =
        dense.s.iter().zip(&dense.y).map(|(s, y)| (*s, PhaseSpacePoint::from_array(y))).collect();
    let energy_drift =
        samples.iter().map(|(_, p)| (sym.p(&p.x, &p.xi) - p0).abs()).fold(0.0, f64::max);
    Ok(FlowTrajectory { origin: *start, samples, energy_drift, boundary_exit, dense })
}

/// `κ_s(start)` for a single time `s` (either sign).
pub fn flow_map(sym: &SymbolModel, start: &PhaseSpacePoint, s: f64, tol: f64) -> Result<PhaseSpacePoint, FlowError> {
    check_tol(tol)?;
    let rhs = |y: &[f64]| field_vec(sym, y);
    let sol = Dopri::new(&rhs, tol).solve(&start.to_array(), s, &|_| true)?;
    Ok(PhaseSpacePoint::from_array(sol.y.last().unwrap()))
}
