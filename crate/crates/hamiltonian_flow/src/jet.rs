use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use symbol_core::{autodiff::factorial, PhaseSpacePoint, SymbolModel};

use crate::error::FlowError;
use crate::flow::{accel_vec, field_vec, taylor_coefficients};
use crate::integrator::Dopri;

pub const FD_MAX_ORDER: usize = 8;
const FD_TOL: f64 = 1e-13;
/// Fit degree above the requested jet order.
const FIT_EXTRA: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum JetMethod {
    Recursion,
    FiniteDifference,
}

/// Derivatives `∂_s^j z_s` and `∂_s^j ζ_s` at `s = 0`, `j = 0..=order`.
#[derive(Clone, Debug, Serialize)]
pub struct FlowJet {
    pub order: usize,
    pub z_coeffs: Vec<[f64; 2]>,
    pub zeta_coeffs: Vec<[f64; 2]>,
    pub method: JetMethod,
}

impl FlowJet {
    fn from_derivs(d: Vec<[f64; 4]>, method: JetMethod) -> Self {
        FlowJet {
            order: d.len() - 1,
            z_coeffs: d.iter().map(|v| [v[0], v[1]]).collect(),
            zeta_coeffs: d.iter().map(|v| [v[2], v[3]]).collect(),
            method,
        }
    }

    pub fn state(&self, j: usize) -> [f64; 4] {
        let z = self.z_coeffs[j];
        let w = self.zeta_coeffs[j];
        [z[0], z[1], w[0], w[1]]
    }
}

/// Half-width of the finite-difference stencil for a jet of order `k`.
pub fn fd_half_width(k: usize) -> f64 {
    1e-2f64.max(1e-10f64.powf(1.0 / (k as f64 + 3.0)))
}

pub fn flow_jet(sym: &SymbolModel, start: &PhaseSpacePoint, k: usize, method: JetMethod) -> Result<FlowJet, FlowError> {
    match method {
        JetMethod::Recursion => {
            let max = sym.max_order.saturating_sub(2);
            if k > max {
                return Err(FlowError::Order { requested: k, max });
            }
            let c = taylor_coefficients(sym, &start.to_array(), k);
            let d = c
                .iter()
                .enumerate()
                .map(|(j, cj)| cj.map(|v| v * factorial(j)))
                .collect();
            Ok(FlowJet::from_derivs(d, method))
        }
        JetMethod::FiniteDifference => {
            if k > FD_MAX_ORDER {
                return Err(FlowError::Order { requested: k, max: FD_MAX_ORDER });
            }
            let h = fd_half_width(k);
            let coarse = fd_fit(sym, start, k, h)?;
            let fine = fd_fit(sym, start, k, 0.5 * h)?;
            let d = (0..=k)
                .map(|j| {
                    let p = (k + FIT_EXTRA + 1 - j) as i32;
                    let w = 2f64.powi(p);
                    std::array::from_fn(|i| (w * fine[j][i] - coarse[j][i]) / (w - 1.0))
                })
                .collect();
            Ok(FlowJet::from_derivs(d, method))
        }
    }
}

/// Least-squares fit of a degree-(k+4) polynomial to the flow sampled on
/// Chebyshev points of `[−h, h]`; returns derivatives up to order `k`.
///
/// The flow is integrated in displacement form `d(s) = κ_s − κ_0`, so the
/// samples carry rounding relative to `|d| ~ h` rather than to `|κ| ~ 1`.
fn fd_fit(sym: &SymbolModel, start: &PhaseSpacePoint, k: usize, h: f64) -> Result<Vec<[f64; 4]>, FlowError> {
    let y0 = start.to_array();
    let shift = |d: &[f64]| -> [f64; 4] { std::array::from_fn(|i| y0[i] + d[i]) };
    let rhs = |d: &[f64]| field_vec(sym, &shift(d));
    let acc = |d: &[f64]| accel_vec(sym, &shift(d));
    let region = sym.region.scaled(2.0);
    let guard = |d: &[f64]| region.contains(&PhaseSpacePoint::from_array(&shift(d)));
    let mut solver = Dopri::new(&rhs, FD_TOL).with_acc(&acc);
    solver.atol = FD_TOL * h * 1e-3;
    let fwd = solver.solve(&[0.0; 4], h, &guard)?;
    let bwd = solver.solve(&[0.0; 4], -h, &guard)?.ascending();
    if fwd.stopped || bwd.stopped {
        return Err(FlowError::Integration("stencil left the admissible region".into()));
    }
    let deg = k + FIT_EXTRA;
    let m = 10 * (deg + 1);
    let u: Vec<f64> = (0..m)
        .map(|i| (std::f64::consts::PI * (i as f64 + 0.5) / m as f64).cos())
        .collect();
    let v = DMatrix::from_fn(m, deg + 1, |i, j| u[i].powi(j as i32));
    let svd = v.svd(true, true);
    let vals: Vec<Vec<f64>> = u
        .iter()
        .map(|&ui| if ui >= 0.0 { fwd.eval(ui * h) } else { bwd.eval(ui * h) })
        .collect();
    let mut out = vec![[0.0; 4]; k + 1];
    out[0] = y0;
    for comp in 0..4 {
        let rhs = DVector::from_iterator(m, vals.iter().map(|y| y[comp]));
        let a = svd.solve(&rhs, 1e-14).map_err(|e| FlowError::Integration(e.to_string()))?;
        for (j, o) in out.iter_mut().enumerate().skip(1) {
            o[comp] = a[j] * factorial(j) / h.powi(j as i32);
        }
    }
    Ok(out)
}

/// Recursion jet after a finite-difference cross-check with relative
/// tolerance `rtol` (scale `max(1, |value|)`).
pub fn flow_jet_checked(
    sym: &SymbolModel,
    start: &PhaseSpacePoint,
    k: usize,
    rtol: f64,
) -> Result<FlowJet, FlowError> {
    let rec = flow_jet(sym, start, k, JetMethod::Recursion)?;
    let fd = flow_jet(sym, start, k.min(FD_MAX_ORDER), JetMethod::FiniteDifference)?;
    for j in 0..=fd.order {
        let (a, b) = (rec.state(j), fd.state(j));
        if (0..4).any(|i| (a[i] - b[i]).abs() > rtol * a[i].abs().max(1.0)) {
            return Err(FlowError::JetInconsistency { order: j, recursion: a, finite_difference: b });
        }
    }
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_jet_is_linear() {
        let sym = SymbolModel::torus_laplace();
        let start = PhaseSpacePoint::new([0.3, 0.4], [0.6, -0.8]);
        let j = flow_jet(&sym, &start, 6, JetMethod::Recursion).unwrap();
        assert_eq!(j.z_coeffs[0], [0.3, 0.4]);
        assert_eq!(j.z_coeffs[1], [1.2, -1.6]);
        for k in 2..=6 {
            assert_eq!(j.z_coeffs[k], [0.0, 0.0]);
        }
    }

    #[test]
    fn hermite_second_derivative() {
        let sym = SymbolModel::hermite();
        let r: f64 = 0.4;
        let q = (1.0 - r * r).sqrt();
        let start = PhaseSpacePoint::new([r, 0.0], [0.0, q]);
        let j = flow_jet(&sym, &start, 5, JetMethod::Recursion).unwrap();
        assert!((j.z_coeffs[2][0] + 4.0 * r).abs() < 1e-14);
        assert!(j.z_coeffs[2][1].abs() < 1e-14);
        // z = (r cos 2s, q sin 2s): fifth derivative (0, 32 q)
        assert!((j.z_coeffs[5][1] - 32.0 * q).abs() < 1e-12);
    }

    #[test]
    fn finite_difference_agrees_on_hermite() {
        let sym = SymbolModel::hermite();
        let start = PhaseSpacePoint::new([0.2, -0.3], [0.5, 0.4]);
        let j = flow_jet_checked(&sym, &start, 5, 1e-4).unwrap();
        assert_eq!(j.method, JetMethod::Recursion);
    }

    #[test]
    fn order_limits() {
        let sym = SymbolModel::hermite();
        let start = PhaseSpacePoint::new([0.2, -0.3], [0.5, 0.4]);
        assert!(flow_jet(&sym, &start, 11, JetMethod::Recursion).is_err());
        assert!(flow_jet(&sym, &start, 9, JetMethod::FiniteDifference).is_err());
    }

    #[test]
    fn stencil_width_rule() {
        assert!((fd_half_width(5) - 1e-10f64.powf(1.0 / 8.0)).abs() < 1e-15);
        assert!(fd_half_width(0) == 1e-2);
    }
}
