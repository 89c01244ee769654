//! Conditions (A1) `∂_ξp ≠ 0` and (A2) positive curvature of the fibers
//! `{ξ : p(x, ξ) = 0}`, checked on a sampled zero set.

use serde::Serialize;

use crate::symbol::{PhaseSpacePoint, SymbolModel};

pub const TOL_A1: f64 = 1e-6;
pub const TOL_A2: f64 = 1e-6;
const ZERO_TOL: f64 = 1e-12;

#[derive(Clone, Debug, Serialize)]
pub struct AdmissibilityReport {
    pub a1_min: f64,
    /// Smallest tangential Hessian form, oriented so that a convex zero set
    /// gives positive values.
    pub a2_min: f64,
    pub samples: usize,
    pub skipped: usize,
    /// `+1` when `p` increases outward from the fiber centroid, `-1` otherwise.
    pub orientation: i8,
    pub sign_consistent: bool,
    pub a1_pass: bool,
    pub a2_pass: bool,
}

/// Point on the ray `c + r ω` (within the frequency box) where `p` vanishes.
pub fn zero_on_ray(sym: &SymbolModel, x: [f64; 2], c: [f64; 2], omega: [f64; 2]) -> Option<[f64; 2]> {
    let kf = &sym.region.kf;
    let mut rmax = f64::INFINITY;
    for i in 0..2 {
        if omega[i] > 1e-15 {
            rmax = rmax.min((kf[i][1] - c[i]) / omega[i]);
        } else if omega[i] < -1e-15 {
            rmax = rmax.min((kf[i][0] - c[i]) / omega[i]);
        }
    }
    if !rmax.is_finite() || rmax <= 0.0 {
        return None;
    }
    let f = |r: f64| sym.p(&x, &[c[0] + r * omega[0], c[1] + r * omega[1]]);
    let f0 = f(0.0);
    if f0.abs() <= ZERO_TOL {
        return Some(c);
    }
    // coarse scan for the first sign change
    let n = 64;
    let mut lo = 0.0;
    let mut flo = f0;
    let mut hi = None;
    for k in 1..=n {
        let r = rmax * k as f64 / n as f64;
        let fr = f(r);
        if !fr.is_finite() {
            return None;
        }
        if fr.abs() <= ZERO_TOL {
            return Some([c[0] + r * omega[0], c[1] + r * omega[1]]);
        }
        if fr.signum() != flo.signum() {
            hi = Some(r);
            break;
        }
        lo = r;
        flo = fr;
    }
    let mut hi = hi?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm.abs() <= ZERO_TOL || hi - lo < 1e-17 {
            lo = mid;
            break;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some([c[0] + lo * omega[0], c[1] + lo * omega[1]])
}

/// Sample `n_position²` base points on a grid in `K_P` and `n_angle` rays in each fiber.
pub fn check_admissible(sym: &SymbolModel, n_position: usize, n_angle: usize) -> AdmissibilityReport {
    let kp = &sym.region.kp;
    let c = sym.region.kf_centroid();
    let grid = |b: [f64; 2], k: usize| {
        if n_position <= 1 {
            0.5 * (b[0] + b[1])
        } else {
            b[0] + (b[1] - b[0]) * k as f64 / (n_position - 1) as f64
        }
    };
    let mut a1_min = f64::INFINITY;
    let mut forms = Vec::new();
    let mut skipped = 0;
    let mut orient_votes = 0i64;
    for i in 0..n_position.max(1) {
        for j in 0..n_position.max(1) {
            let x = [grid(kp[0], i), grid(kp[1], j)];
            let outward = if sym.p(&x, &c) < 0.0 { 1.0 } else { -1.0 };
            orient_votes += outward as i64;
            for k in 0..n_angle {
                let th = 2.0 * std::f64::consts::PI * k as f64 / n_angle as f64;
                let Some(xi) = zero_on_ray(sym, x, c, [th.cos(), th.sin()]) else {
                    skipped += 1;
                    continue;
                };
                let pt = PhaseSpacePoint::new(x, xi);
                let (_, g) = sym.gradient(&pt);
                let gn = g[0].hypot(g[1]);
                a1_min = a1_min.min(gn);
                if gn == 0.0 {
                    forms.push(0.0);
                    continue;
                }
                let w = [-g[1] / gn, g[0] / gn];
                let h = sym.hess_xi(&pt);
                let q = w[0] * (h[0][0] * w[0] + h[0][1] * w[1]) + w[1] * (h[1][0] * w[0] + h[1][1] * w[1]);
                forms.push(q * outward);
            }
        }
    }
    let samples = forms.len();
    let pos = forms.iter().filter(|&&q| q > TOL_A2).count();
    let neg = forms.iter().filter(|&&q| q < -TOL_A2).count();
    let sign_consistent = samples > 0 && (pos == samples || neg == samples);
    let orientation = if orient_votes >= 0 { 1 } else { -1 };
    let a2_min = if samples > 0 && neg == samples {
        forms.iter().map(|q| -q).fold(f64::INFINITY, f64::min)
    } else {
        forms.iter().cloned().fold(f64::INFINITY, f64::min)
    };
    let a2_min = if samples == 0 { 0.0 } else { a2_min };
    let a1_min = if samples == 0 { 0.0 } else { a1_min };
    AdmissibilityReport {
        a1_min,
        a2_min,
        samples,
        skipped,
        orientation,
        sign_consistent,
        a1_pass: samples > 0 && a1_min > TOL_A1,
        a2_pass: sign_consistent && a2_min > TOL_A2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::Region;

    #[test]
    fn torus_on_annulus_box() {
        let r = check_admissible(&SymbolModel::torus_laplace(), 3, 32);
        assert!(r.a1_pass && r.a2_pass);
        assert!((r.a1_min - 2.0).abs() < 1e-9);
        assert!((r.a2_min - 2.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_linear_symbol_fails_a2() {
        let s = SymbolModel::custom("xi1").unwrap().with_region(Region {
            kp: [[-1.0, 1.0], [-1.0, 1.0]],
            kf: [[-1.0, 2.0], [-1.0, 1.0]],
        });
        let r = check_admissible(&s, 2, 32);
        assert!(r.a1_pass);
        assert!(!r.a2_pass);
        assert!(r.a2_min.abs() < 1e-12);
    }
}
