//! Composite Gauss–Legendre rules along a curve, weighted by arclength.

use contact_order::CurveModel;
use gauss_quad::GaussLegendre;
use serde::Serialize;
use std::f64::consts::TAU;
use std::num::NonZeroUsize;

use crate::error::RestrictionError;

pub const NODES_PER_PANEL: usize = 12;
pub const MIN_NODES: usize = 64;
pub const MAX_REFINEMENTS: usize = 3;
/// Allowed change of the self-test integrals under one refinement,
/// relative to the arclength.
pub const SELF_TEST_TOL: f64 = 1e-9;

/// Which metric measures arclength in the curve's chart.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Euclidean,
    /// Unit sphere in `(θ, φ)`: `ds² = dθ² + sin²θ dφ²`.
    Sphere,
}

impl Metric {
    pub fn speed(&self, x: [f64; 2], v: [f64; 2]) -> f64 {
        match self {
            Metric::Euclidean => v[0].hypot(v[1]),
            Metric::Sphere => v[0].hypot(x[0].sin() * v[1]),
        }
    }

    /// Isometric picture of the chart point, used by the self-test.
    fn embed(&self, x: [f64; 2]) -> [f64; 3] {
        match self {
            Metric::Euclidean => [x[0], x[1], 0.0],
            Metric::Sphere => [x[0].sin() * x[1].cos(), x[0].sin() * x[1].sin(), x[0].cos()],
        }
    }
}

#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    /// Include the arclength factor.
    pub weights: Vec<f64>,
    pub points: Vec<[f64; 2]>,
    /// Panel boundaries in the curve parameter.
    pub breaks: Vec<f64>,
    pub metric: Metric,
    pub lambda_max: f64,
    /// Refinements performed by the self-test.
    pub refinements: usize,
}

pub(crate) fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    GaussLegendre::new(NonZeroUsize::new(n).expect("positive order")).as_node_weight_pairs().to_vec()
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn arclength(&self) -> f64 {
        self.weights.iter().sum()
    }

    fn on_breaks(curve: &CurveModel, metric: Metric, breaks: Vec<f64>, lambda_max: f64) -> Self {
        let gl = gauss_legendre(NODES_PER_PANEL);
        let n = (breaks.len() - 1) * NODES_PER_PANEL;
        let (mut nodes, mut weights, mut points) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            let h = 0.5 * (b - a);
            for &(x, wt) in &gl {
                let t = a + h * (x + 1.0);
                let p = curve.point(t);
                nodes.push(t);
                points.push(p);
                weights.push(h * wt * metric.speed(p, curve.velocity(t)));
            }
        }
        QuadratureRule { nodes, weights, points, breaks, metric, lambda_max, refinements: 0 }
    }

    /// Split every panel into `factor` equal parts.
    pub fn refined(&self, curve: &CurveModel, factor: usize) -> Self {
        let mut breaks = Vec::with_capacity((self.breaks.len() - 1) * factor + 1);
        for w in self.breaks.windows(2) {
            for j in 0..factor {
                breaks.push(w[0] + (w[1] - w[0]) * j as f64 / factor as f64);
            }
        }
        breaks.push(*self.breaks.last().expect("non-empty"));
        let mut r = Self::on_breaks(curve, self.metric, breaks, self.lambda_max);
        r.refinements = self.refinements;
        r
    }

    fn self_test(&self) -> Vec<num_complex::Complex64> {
        let dirs: Vec<[f64; 3]> = (0..9)
            .map(|j| {
                let a = j as f64 * TAU / 18.0;
                let b = 0.4 * j as f64;
                [a.cos() * b.cos(), a.sin() * b.cos(), b.sin()]
            })
            .collect();
        let mut out = vec![num_complex::Complex64::new(self.arclength(), 0.0)];
        for d in dirs {
            let s = self
                .points
                .iter()
                .zip(&self.weights)
                .map(|(p, w)| {
                    let e = self.metric.embed(*p);
                    num_complex::Complex64::from_polar(*w, self.lambda_max * (d[0] * e[0] + d[1] * e[1] + d[2] * e[2]))
                })
                .sum();
            out.push(s);
        }
        out
    }
}

/// Cumulative arclength on a fine parameter grid.
fn arclength_table(curve: &CurveModel, metric: Metric, m: usize) -> (Vec<f64>, Vec<f64>) {
    let [a, b] = curve.interval;
    let gl = gauss_legendre(8);
    let mut ts = vec![a];
    let mut ss = vec![0.0];
    for k in 0..m {
        let lo = a + (b - a) * k as f64 / m as f64;
        let hi = a + (b - a) * (k + 1) as f64 / m as f64;
        let h = 0.5 * (hi - lo);
        let seg: f64 = gl
            .iter()
            .map(|&(x, w)| {
                let t = lo + h * (x + 1.0);
                h * w * metric.speed(curve.point(t), curve.velocity(t))
            })
            .sum();
        ts.push(hi);
        ss.push(ss[k] + seg);
    }
    (ts, ss)
}

/// Parameter where the tabulated arclength reaches `target` (linear inside
/// a table cell; panels only need to be roughly equal).
fn invert(ts: &[f64], ss: &[f64], target: f64) -> f64 {
    let k = ss.partition_point(|&s| s < target).clamp(1, ss.len() - 1);
    let f = (target - ss[k - 1]) / (ss[k] - ss[k - 1]);
    ts[k - 1] + f * (ts[k] - ts[k - 1])
}

/// Composite rule with about `NODES_PER_PANEL` nodes per wavelength
/// `2π/λ_max` of arclength, at least `MIN_NODES` nodes, checked by one
/// refinement.
pub fn curve_quadrature(curve: &CurveModel, metric: Metric, lambda_max: f64) -> Result<QuadratureRule, RestrictionError> {
    let (ts, ss) = arclength_table(curve, metric, 512);
    let total = *ss.last().expect("table");
    let wavelength = TAU / lambda_max.max(1e-12);
    // 10% slack for the unequal panels of the linear inversion
    let mut panels = ((1.1 * total / wavelength).ceil() as usize).max(MIN_NODES.div_ceil(NODES_PER_PANEL));
    let mut change = f64::INFINITY;
    for refinements in 0..=MAX_REFINEMENTS {
        let mut breaks: Vec<f64> = (0..=panels).map(|p| invert(&ts, &ss, total * p as f64 / panels as f64)).collect();
        breaks[0] = curve.interval[0];
        breaks[panels] = curve.interval[1];
        let mut rule = QuadratureRule::on_breaks(curve, metric, breaks, lambda_max);
        let fine = rule.refined(curve, 2);
        let (c, f) = (rule.self_test(), fine.self_test());
        change = c.iter().zip(&f).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / total;
        if change <= SELF_TEST_TOL {
            rule.refinements = refinements;
            return Ok(rule);
        }
        panels *= 2;
    }
    Err(RestrictionError::Quadrature { refinements: MAX_REFINEMENTS, change })
}
