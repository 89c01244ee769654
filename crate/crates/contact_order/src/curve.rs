//! Plane curves with local Taylor expansions.

use serde::{Deserialize, Serialize};
use symbol_core::{AffineMap, Expr, Scalar, Taylor, TAYLOR_CAP};

use crate::error::ContactError;

/// Nodes used by the local interpolant of a point table.
const TABLE_WINDOW: usize = 8;
const SPEED_SAMPLES: usize = 400;
const MIN_SPEED: f64 = 1e-8;

/// Curve description as found in configuration files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CurveSpec {
    /// `γ_i(t) = Σ_k coeffs[i][k] t^k`.
    Poly {
        coeffs: [Vec<f64>; 2],
        #[serde(default, skip_serializing_if = "Option::is_none")]
        interval: Option<[f64; 2]>,
    },
    Circle {
        center: [f64; 2],
        radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        interval: Option<[f64; 2]>,
    },
    /// `(θ₀, t)` in the sphere chart.
    Latitude {
        theta0: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        interval: Option<[f64; 2]>,
    },
    /// Ordered points, parametrized by chord length.
    Table { points: Vec<[f64; 2]> },
}

impl CurveSpec {
    /// Short forms: `poly:<x(t)>,<y(t)>`, `circle:cx,cy,r`, `latitude:θ₀`.
    /// An optional `@a,b` suffix sets the interval.
    pub fn parse_short(src: &str) -> Result<CurveSpec, ContactError> {
        let (body, interval) = match src.split_once('@') {
            Some((b, iv)) => (b, Some(parse_pair(iv)?)),
            None => (src, None),
        };
        let (kind, args) =
            body.split_once(':').ok_or_else(|| ContactError::Curve(format!("expected <kind>:<args>, got `{src}`")))?;
        match kind.trim() {
            "poly" => {
                let parts: Vec<&str> = args.split(',').collect();
                if parts.len() != 2 {
                    return Err(ContactError::Curve(format!("poly needs two components, got {}", parts.len())));
                }
                let c0 = poly_coeffs(parts[0])?;
                let c1 = poly_coeffs(parts[1])?;
                Ok(CurveSpec::Poly { coeffs: [c0, c1], interval })
            }
            "circle" => {
                let v = parse_floats(args)?;
                if v.len() != 3 {
                    return Err(ContactError::Curve("circle needs cx,cy,r".into()));
                }
                Ok(CurveSpec::Circle { center: [v[0], v[1]], radius: v[2], interval })
            }
            "latitude" => {
                let v = parse_floats(args)?;
                if v.len() != 1 {
                    return Err(ContactError::Curve("latitude needs θ₀".into()));
                }
                Ok(CurveSpec::Latitude { theta0: v[0], interval })
            }
            other => Err(ContactError::Curve(format!("unknown curve kind `{other}`"))),
        }
    }
}

fn parse_floats(s: &str) -> Result<Vec<f64>, ContactError> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| ContactError::Curve(format!("`{p}`: {e}"))))
        .collect()
}

fn parse_pair(s: &str) -> Result<[f64; 2], ContactError> {
    let v = parse_floats(s)?;
    if v.len() != 2 || v[0] >= v[1] {
        return Err(ContactError::Curve(format!("interval `{s}` must be a,b with a < b")));
    }
    Ok([v[0], v[1]])
}

/// Coefficients of a polynomial expression in `t`, read off its Taylor series at 0.
fn poly_coeffs(src: &str) -> Result<Vec<f64>, ContactError> {
    let e = Expr::parse(src.trim(), &["t"]).map_err(|err| ContactError::Curve(format!("`{src}`: {err}")))?;
    let ser = e.eval(&[Taylor::variable(0.0, TAYLOR_CAP)]);
    let mut c = ser.coeffs().to_vec();
    while c.len() > 1 && c[c.len() - 1] == 0.0 {
        c.pop();
    }
    // reject non-polynomials: the truncated series must reproduce the expression
    for t in [0.37, -0.61, 0.93] {
        let exact = e.eval(&[t]);
        let approx = c.iter().rev().fold(0.0, |a, &k| a * t + k);
        if c.len() >= TAYLOR_CAP || !((exact - approx).abs() <= 1e-12 * exact.abs().max(1.0)) {
            return Err(ContactError::Curve(format!("`{src}` is not a polynomial in t of degree < {TAYLOR_CAP}")));
        }
    }
    Ok(c)
}

#[derive(Clone, Debug)]
enum Shape {
    Poly([Vec<f64>; 2]),
    Circle { center: [f64; 2], radius: f64 },
    Latitude(f64),
    Table { s: Vec<f64>, pts: Vec<[f64; 2]> },
    /// `inner ∘ φ` for a polynomial `φ`.
    Composed { inner: Box<Shape>, phi: Vec<f64> },
    /// `A · inner + c`.
    Affine { inner: Box<Shape>, map: AffineMap },
}

impl Shape {
    fn series(&self, t: f64, n: usize) -> [Taylor; 2] {
        match self {
            Shape::Poly(c) => c.clone().map(|ci| {
                let u = Taylor::variable(t, n);
                let mut acc = Taylor::constant(*ci.last().unwrap_or(&0.0), n);
                for &k in ci.iter().rev().skip(1) {
                    acc = acc * u + k;
                }
                acc
            }),
            Shape::Circle { center, radius } => {
                let u = Taylor::variable(t, n);
                [u.cos() * *radius + center[0], u.sin() * *radius + center[1]]
            }
            Shape::Latitude(th) => [Taylor::constant(*th, n), Taylor::variable(t, n)],
            Shape::Table { s, pts } => table_series(s, pts, t, n),
            Shape::Composed { inner, phi } => {
                let u = Taylor::variable(t, n);
                let mut p = Taylor::constant(*phi.last().unwrap_or(&0.0), n);
                for &k in phi.iter().rev().skip(1) {
                    p = p * u + k;
                }
                let g = inner.series(p.c[0], n);
                [g[0].compose(&p), g[1].compose(&p)]
            }
            Shape::Affine { inner, map } => map.apply(&inner.series(t, n)),
        }
    }
}

/// Lagrange interpolation through the `TABLE_WINDOW` nodes nearest to `t`.
fn table_series(s: &[f64], pts: &[[f64; 2]], t: f64, n: usize) -> [Taylor; 2] {
    let m = TABLE_WINDOW.min(s.len());
    let pos = s.partition_point(|&v| v < t);
    let lo = pos.saturating_sub(m / 2).min(s.len() - m);
    let idx = lo..lo + m;
    let u = Taylor::variable(t, n);
    let mut out = [Taylor::constant(0.0, n), Taylor::constant(0.0, n)];
    for i in idx.clone() {
        let mut basis = Taylor::constant(1.0, n);
        for j in idx.clone() {
            if j != i {
                basis = (basis * (u - s[j])) / (s[i] - s[j]);
            }
        }
        out[0] = out[0] + basis * pts[i][0];
        out[1] = out[1] + basis * pts[i][1];
    }
    out
}

/// Regular parametrized curve on `[a, b]`.
#[derive(Clone, Debug)]
pub struct CurveModel {
    shape: Shape,
    pub interval: [f64; 2],
    pub min_speed: f64,
}

impl CurveModel {
    fn build(shape: Shape, interval: [f64; 2]) -> Result<Self, ContactError> {
        if !(interval[0] < interval[1]) || !interval.iter().all(|v| v.is_finite()) {
            return Err(ContactError::Curve(format!("bad interval {interval:?}")));
        }
        let mut c = CurveModel { shape, interval, min_speed: 0.0 };
        let mut ms = f64::INFINITY;
        for k in 0..=SPEED_SAMPLES {
            let t = interval[0] + (interval[1] - interval[0]) * k as f64 / SPEED_SAMPLES as f64;
            let v = c.velocity(t);
            ms = ms.min(v[0].hypot(v[1]));
        }
        if !(ms >= MIN_SPEED) {
            return Err(ContactError::Curve(format!("curve is not regular: min |γ'| = {ms:e}")));
        }
        c.min_speed = ms;
        Ok(c)
    }

    pub fn from_spec(spec: &CurveSpec) -> Result<Self, ContactError> {
        use std::f64::consts::PI;
        match spec {
            CurveSpec::Poly { coeffs, interval } => {
                if coeffs.iter().any(|c| c.is_empty()) {
                    return Err(ContactError::Curve("empty coefficient list".into()));
                }
                Self::build(Shape::Poly(coeffs.clone()), interval.unwrap_or([-1.0, 1.0]))
            }
            CurveSpec::Circle { center, radius, interval } => {
                if !(*radius > 0.0) {
                    return Err(ContactError::Curve("radius must be positive".into()));
                }
                Self::build(Shape::Circle { center: *center, radius: *radius }, interval.unwrap_or([0.0, 2.0 * PI]))
            }
            CurveSpec::Latitude { theta0, interval } => {
                if !(*theta0 > 0.0 && *theta0 < PI) {
                    return Err(ContactError::Curve("θ₀ must lie in (0, π)".into()));
                }
                Self::build(Shape::Latitude(*theta0), interval.unwrap_or([-PI, PI]))
            }
            CurveSpec::Table { points } => {
                if points.len() < 4 {
                    return Err(ContactError::Curve("table needs at least 4 points".into()));
                }
                let mut s = vec![0.0];
                for w in points.windows(2) {
                    let d = (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]);
                    if !(d > 0.0) {
                        return Err(ContactError::Curve("repeated table point".into()));
                    }
                    s.push(s.last().unwrap() + d);
                }
                let end = *s.last().unwrap();
                Self::build(Shape::Table { s, pts: points.clone() }, [0.0, end])
            }
        }
    }

    pub fn poly(coeffs: [Vec<f64>; 2], interval: [f64; 2]) -> Result<Self, ContactError> {
        Self::from_spec(&CurveSpec::Poly { coeffs, interval: Some(interval) })
    }

    /// `t ↦ (t, t^k)` on `interval`.
    pub fn monomial_graph(k: usize, interval: [f64; 2]) -> Result<Self, ContactError> {
        let mut y = vec![0.0; k + 1];
        y[k] = 1.0;
        Self::poly([vec![0.0, 1.0], y], interval)
    }

    /// Same curve with parameter `t ↦ φ(t)` for an increasing polynomial `φ`;
    /// the new interval is `φ⁻¹([a, b])`.
    pub fn reparametrized(&self, phi: Vec<f64>) -> Result<Self, ContactError> {
        let f = |t: f64| phi.iter().rev().fold(0.0, |a, &k| a * t + k);
        let inv = |target: f64| {
            let (mut lo, mut hi) = (-1.0, 1.0);
            while f(lo) > target {
                lo *= 2.0;
                if lo < -1e8 {
                    return None;
                }
            }
            while f(hi) < target {
                hi *= 2.0;
                if hi > 1e8 {
                    return None;
                }
            }
            for _ in 0..200 {
                let m = 0.5 * (lo + hi);
                if f(m) < target {
                    lo = m;
                } else {
                    hi = m;
                }
            }
            Some(0.5 * (lo + hi))
        };
        let (Some(a), Some(b)) = (inv(self.interval[0]), inv(self.interval[1])) else {
            return Err(ContactError::Curve("reparametrization does not cover the interval".into()));
        };
        Self::build(Shape::Composed { inner: Box::new(self.shape.clone()), phi }, [a, b])
    }

    /// Image under an affine chart change.
    pub fn transported(&self, map: &AffineMap) -> Result<Self, ContactError> {
        Self::build(Shape::Affine { inner: Box::new(self.shape.clone()), map: map.clone() }, self.interval)
    }

    /// `γ(t + ε)` to order `n` (`n` coefficients).
    pub fn series(&self, t: f64, n: usize) -> [Taylor; 2] {
        self.shape.series(t, n)
    }

    pub fn point(&self, t: f64) -> [f64; 2] {
        let s = self.series(t, 1);
        [s[0].c[0], s[1].c[0]]
    }

    pub fn velocity(&self, t: f64) -> [f64; 2] {
        self.deriv(t, 1)
    }

    /// `γ^{(j)}(t)`.
    pub fn deriv(&self, t: f64, j: usize) -> [f64; 2] {
        let s = self.series(t, j + 1);
        [s[0].deriv(j), s[1].deriv(j)]
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.interval[0] && t <= self.interval[1]
    }

    /// `n` equispaced parameters covering the interval (endpoints included).
    pub fn grid(&self, n: usize) -> Vec<f64> {
        let [a, b] = self.interval;
        if n < 2 {
            return vec![0.5 * (a + b)];
        }
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        // symmetric about the midpoint so that the centre is hit exactly for odd n
        (0..n)
            .map(|k| {
                let r = (2 * k) as f64 / (n - 1) as f64 - 1.0;
                mid + half * r
            })
            .collect()
    }
}
