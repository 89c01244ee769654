//! Cap extremizers on the torus: equal-weight superpositions of the cluster
//! frequencies in an angular cap around the tangent at the contact point.

use contact_order::CurveModel;
use eigenfunction_bases::{torus_cluster, ClusterBasis, Indices, DEFAULT_WINDOW};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::RestrictionError;
use crate::lq::lq_from_values;
use crate::norms::RestrictionMap;
use crate::quadrature::QuadratureRule;

pub const CAP_WIDENINGS: usize = 3;

#[derive(Clone, Debug, Serialize)]
pub struct CapResult {
    pub lambda: f64,
    pub sigma: u32,
    /// Width constant actually used (after any widening).
    pub c_width: f64,
    /// Angular half-width `c_width · λ^{−σ/(2σ+1)}`.
    pub angle: f64,
    pub cap_size: usize,
    /// `(q, ‖f‖_{L^q(γ)} / ‖f‖_{L²(T²)})`.
    pub ratios: Vec<(f64, f64)>,
    #[serde(skip)]
    pub coeffs: Vec<Complex64>,
}

/// Angular half-width of the cap at contact order `σ`.
pub fn cap_angle(lambda: f64, sigma: u32, c_width: f64) -> f64 {
    let s = sigma as f64;
    c_width * lambda.powf(-s / (2.0 * s + 1.0))
}

/// Unit coefficient vector over `basis` supported on the cap.
pub fn cap_coefficients(basis: &ClusterBasis, dir: [f64; 2], at: [f64; 2], angle: f64) -> Vec<Complex64> {
    let Indices::Torus(ks) = &basis.indices else { return Vec::new() };
    let cos_max = angle.min(std::f64::consts::PI).cos();
    let mut c: Vec<Complex64> = ks
        .iter()
        .map(|k| {
            let (k1, k2) = (k[0] as f64, k[1] as f64);
            let cos = (k1 * dir[0] + k2 * dir[1]) / k1.hypot(k2);
            if cos >= cos_max {
                Complex64::from_polar(1.0, -(k1 * at[0] + k2 * at[1]))
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    let n = c.iter().filter(|z| z.norm_sqr() > 0.0).count();
    if n > 0 {
        let s = 1.0 / (n as f64).sqrt();
        c.iter_mut().for_each(|z| *z *= s);
    }
    c
}

/// Cap extremizer at `γ(t0)` with ratios for each requested `q`.
pub fn cap_extremizer_torus(
    lambda: f64,
    curve: &CurveModel,
    sigma: u32,
    c_width: f64,
    t0: f64,
    qs: &[f64],
    quad: &QuadratureRule,
) -> Result<(ClusterBasis, CapResult), RestrictionError> {
    let basis = torus_cluster(lambda, DEFAULT_WINDOW)?;
    let v = curve.velocity(t0);
    let vn = v[0].hypot(v[1]);
    let dir = [v[0] / vn, v[1] / vn];
    let at = curve.point(t0);
    let mut c_used = c_width;
    for _ in 0..=CAP_WIDENINGS {
        let angle = cap_angle(lambda, sigma, c_used);
        let coeffs = cap_coefficients(&basis, dir, at, angle);
        let cap_size = coeffs.iter().filter(|z| z.norm_sqr() > 0.0).count();
        if cap_size > 0 {
            let map = RestrictionMap::new(&basis, quad);
            let vals = map.values(&coeffs, quad);
            let mut ratios = Vec::new();
            for &q in qs {
                let r = if q.is_infinite() {
                    // sup over a 4× refined set
                    let fine = quad.refined(curve, 4);
                    let m = RestrictionMap::new(&basis, &fine);
                    lq_from_values(&m.values(&coeffs, &fine), &fine, q)
                } else {
                    lq_from_values(&vals, quad, q)
                };
                ratios.push((q, r));
            }
            let res = CapResult { lambda, sigma, c_width: c_used, angle, cap_size, ratios, coeffs };
            return Ok((basis, res));
        }
        c_used *= 2.0;
    }
    Err(RestrictionError::Cap { lambda, c_width: c_used / 2.0 })
}
