//! Local Taylor lift of a curve to phase space, in flow time.
//!
//! Around a parameter `t`, the tangential frequency `ξ(t + w)` is obtained
//! as a power series by Newton iteration on the tangency system in series
//! arithmetic. The flow-time reparametrization solves `L' = g(L)` with
//! `g = ⟨∂_ξ p, γ'⟩/|γ'|²` by Picard iteration, again on series, so
//! `d/ds γ(L(s)) = ∂_ξ p` holds to all computed orders.

use nalgebra::Matrix2;
use symbol_core::{PhaseSpacePoint, SymbolModel, Taylor, TAYLOR_CAP};

use crate::curve::CurveModel;
use crate::error::ContactError;
use crate::tangent::rot90;

pub const A1_MIN: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct LocalLift {
    pub t: f64,
    /// Number of series coefficients.
    pub order: usize,
    /// `γ(t + w)`.
    pub gamma: [Taylor; 2],
    /// `ξ(t + w)`.
    pub xi: [Taylor; 2],
    /// `L(s) − t`, flow time `s` to curve parameter.
    pub u: Taylor,
    /// `γ(L(s))`.
    pub gamma_s: [Taylor; 2],
    /// `ξ(L(s))`.
    pub xi_s: [Taylor; 2],
}

fn dot(a: &[Taylor; 2], b: &[Taylor; 2]) -> Taylor {
    a[0] * b[0] + a[1] * b[1]
}

impl LocalLift {
    pub fn start(&self) -> PhaseSpacePoint {
        PhaseSpacePoint::new([self.gamma[0].c[0], self.gamma[1].c[0]], [self.xi[0].c[0], self.xi[1].c[0]])
    }

    /// `∂_s^j γ(L(s))` at `s = 0`.
    pub fn gamma_deriv(&self, j: usize) -> [f64; 2] {
        [self.gamma_s[0].deriv(j), self.gamma_s[1].deriv(j)]
    }

    pub fn xi_deriv(&self, j: usize) -> [f64; 2] {
        [self.xi_s[0].deriv(j), self.xi_s[1].deriv(j)]
    }

    /// `L'(0)`.
    pub fn speed_ratio(&self) -> f64 {
        self.u.c[1]
    }

    /// `(γ(L(s)), ξ(L(s)))` for small `s`.
    pub fn eval(&self, s: f64) -> PhaseSpacePoint {
        PhaseSpacePoint::new(
            [self.gamma_s[0].eval(s), self.gamma_s[1].eval(s)],
            [self.xi_s[0].eval(s), self.xi_s[1].eval(s)],
        )
    }
}

/// Series lift at `t` starting from the tangential frequency `xi0`
/// (a root of the tangency system). `order` counts coefficients.
pub fn local_lift(
    sym: &SymbolModel,
    curve: &CurveModel,
    t: f64,
    xi0: [f64; 2],
    order: usize,
) -> Result<LocalLift, ContactError> {
    let n = order.clamp(2, TAYLOR_CAP - 1);
    let gamma_hi = curve.series(t, n + 1);
    let gamma = gamma_hi.map(|g| g.with_order(n));
    let vel = gamma_hi.map(|g| g.derivative().with_order(n));
    let rv = rot90(vel);

    let x0 = [gamma[0].c[0], gamma[1].c[0]];
    let pt0 = PhaseSpacePoint::new(x0, xi0);
    let (_, gxi0) = sym.gradient(&pt0);
    let norm = gxi0[0].hypot(gxi0[1]);
    if norm < A1_MIN {
        return Err(ContactError::A1Violation { t, norm });
    }
    let h = sym.hess_xi(&pt0);
    let rv0 = [rv[0].c[0], rv[1].c[0]];
    let j0 = Matrix2::new(
        h[0][0] * rv0[0] + h[0][1] * rv0[1],
        h[1][0] * rv0[0] + h[1][1] * rv0[1],
        gxi0[0],
        gxi0[1],
    );
    let inv = j0.try_inverse().ok_or(ContactError::Seed { t, residual: f64::NAN, iterations: 0 })?;

    // chord Newton in series arithmetic: each sweep fixes one more coefficient
    let mut xi = xi0.map(|v| Taylor::constant(v, n));
    for _ in 0..=n {
        let (_, gxi) = sym.grad(&gamma, &xi);
        let r0 = dot(&gxi, &rv);
        let r1 = sym.p(&gamma, &xi);
        xi[0] = xi[0] - (r0 * inv[(0, 0)] + r1 * inv[(0, 1)]);
        xi[1] = xi[1] - (r0 * inv[(1, 0)] + r1 * inv[(1, 1)]);
    }
    // pin the constant term to the supplied root
    xi[0].c[0] = xi0[0];
    xi[1].c[0] = xi0[1];

    let (_, gxi) = sym.grad(&gamma, &xi);
    let g = dot(&gxi, &vel) / dot(&vel, &vel);

    let mut u = Taylor::variable(0.0, n) * g.c[0];
    for _ in 0..=n {
        u = g.compose(&u).integral();
    }
    let gamma_s = gamma.map(|c| c.compose(&u));
    let xi_s = xi.map(|c| c.compose(&u));
    Ok(LocalLift { t, order: n, gamma, xi, u, gamma_s, xi_s })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::CurveSpec;

    #[test]
    fn torus_line_has_speed_two() {
        let sym = SymbolModel::torus_laplace();
        let c = CurveModel::poly([vec![0.0, 1.0], vec![0.0]], [-1.0, 1.0]).unwrap();
        let l = local_lift(&sym, &c, 0.2, [1.0, 0.0], 8).unwrap();
        assert!((l.speed_ratio() - 2.0).abs() < 1e-15);
        assert!(l.u.coeffs()[2..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn lift_follows_hamilton_velocity() {
        let sym = SymbolModel::sphere_laplace();
        let c = CurveModel::from_spec(&CurveSpec::Latitude { theta0: 1.0, interval: None }).unwrap();
        let xi0 = [0.0, 1.0f64.sin()];
        let l = local_lift(&sym, &c, 0.0, xi0, 10).unwrap();
        // d/ds γ(L(s)) = ∂_ξ p along the series
        for s in [-0.05, 0.0, 0.04] {
            let pt = l.eval(s);
            let (_, gxi) = sym.gradient(&pt);
            let v = [l.gamma_s[0].derivative().eval(s), l.gamma_s[1].derivative().eval(s)];
            assert!((v[0] - gxi[0]).abs() < 1e-10 && (v[1] - gxi[1]).abs() < 1e-10, "{v:?} {gxi:?}");
            assert!(sym.p(&pt.x, &pt.xi).abs() < 1e-10);
        }
    }

    #[test]
    fn parabola_frequency_series() {
        let sym = SymbolModel::torus_laplace();
        let c = CurveModel::monomial_graph(2, [-1.0, 1.0]).unwrap();
        let t = 0.3;
        let n = (1.0f64 + 4.0 * t * t).sqrt();
        let l = local_lift(&sym, &c, t, [1.0 / n, 2.0 * t / n], 10).unwrap();
        for w in [-0.02, 0.015] {
            let tt = t + w;
            let nn = (1.0f64 + 4.0 * tt * tt).sqrt();
            assert!((l.xi[0].eval(w) - 1.0 / nn).abs() < 1e-9);
            assert!((l.xi[1].eval(w) - 2.0 * tt / nn).abs() < 1e-9);
        }
    }
}
