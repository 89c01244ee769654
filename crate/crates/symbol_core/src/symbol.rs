use serde::{Deserialize, Serialize};

use crate::autodiff::{BoxJet, Grad, Scalar, Taylor};
use crate::error::SymbolError;
use crate::expr::Expr;

pub const BUILTIN_MAX_ORDER: usize = 12;
pub const SYMBOL_VARS: [&str; 4] = ["x1", "x2", "xi1", "xi2"];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpacePoint {
    pub x: [f64; 2],
    pub xi: [f64; 2],
}

impl PhaseSpacePoint {
    pub fn new(x: [f64; 2], xi: [f64; 2]) -> Self {
        PhaseSpacePoint { x, xi }
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.x[0], self.x[1], self.xi[0], self.xi[1]]
    }

    pub fn from_array(y: &[f64]) -> Self {
        PhaseSpacePoint { x: [y[0], y[1]], xi: [y[2], y[3]] }
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

/// `y = A x + c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub a: [[f64; 2]; 2],
    pub c: [f64; 2],
}

impl AffineMap {
    pub fn identity() -> Self {
        AffineMap { a: [[1.0, 0.0], [0.0, 1.0]], c: [0.0, 0.0] }
    }

    pub fn det(&self) -> f64 {
        self.a[0][0] * self.a[1][1] - self.a[0][1] * self.a[1][0]
    }

    pub fn apply<T: Scalar>(&self, x: &[T; 2]) -> [T; 2] {
        [
            x[0].clone() * self.a[0][0] + x[1].clone() * self.a[0][1] + self.c[0],
            x[0].clone() * self.a[1][0] + x[1].clone() * self.a[1][1] + self.c[1],
        ]
    }

    pub fn inverse(&self) -> AffineMap {
        let d = self.det();
        let ai = [[self.a[1][1] / d, -self.a[0][1] / d], [-self.a[1][0] / d, self.a[0][0] / d]];
        let c = [
            -(ai[0][0] * self.c[0] + ai[0][1] * self.c[1]),
            -(ai[1][0] * self.c[0] + ai[1][1] * self.c[1]),
        ];
        AffineMap { a: ai, c }
    }
}

pub(crate) fn mat_vec<T: Scalar>(m: &[[f64; 2]; 2], v: &[T; 2]) -> [T; 2] {
    [
        v[0].clone() * m[0][0] + v[1].clone() * m[0][1],
        v[0].clone() * m[1][0] + v[1].clone() * m[1][1],
    ]
}

pub(crate) fn transpose(m: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [[m[0][0], m[1][0]], [m[0][1], m[1][1]]]
}

/// Position box `kp` and frequency box `kf`, each `[[lo, hi]; 2]` per coordinate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub kp: [[f64; 2]; 2],
    pub kf: [[f64; 2]; 2],
}

impl Region {
    pub fn contains(&self, pt: &PhaseSpacePoint) -> bool {
        (0..2).all(|i| pt.x[i] >= self.kp[i][0] && pt.x[i] <= self.kp[i][1])
            && (0..2).all(|i| pt.xi[i] >= self.kf[i][0] && pt.xi[i] <= self.kf[i][1])
    }

    /// Box scaled by `f` about its center.
    pub fn scaled(&self, f: f64) -> Region {
        let sc = |b: [f64; 2]| {
            let m = 0.5 * (b[0] + b[1]);
            let h = 0.5 * (b[1] - b[0]) * f;
            [m - h, m + h]
        };
        Region { kp: [sc(self.kp[0]), sc(self.kp[1])], kf: [sc(self.kf[0]), sc(self.kf[1])] }
    }

    pub fn kf_centroid(&self) -> [f64; 2] {
        [0.5 * (self.kf[0][0] + self.kf[0][1]), 0.5 * (self.kf[1][0] + self.kf[1][1])]
    }
}

fn bbox(pts: &[[f64; 2]]) -> [[f64; 2]; 2] {
    let mut b = [[f64::INFINITY, f64::NEG_INFINITY]; 2];
    for p in pts {
        for i in 0..2 {
            b[i][0] = b[i][0].min(p[i]);
            b[i][1] = b[i][1].max(p[i]);
        }
    }
    b
}

fn corners(b: &[[f64; 2]; 2]) -> [[f64; 2]; 4] {
    [[b[0][0], b[1][0]], [b[0][0], b[1][1]], [b[0][1], b[1][0]], [b[0][1], b[1][1]]]
}

#[derive(Clone, Debug)]
pub enum SymbolKind {
    /// `|ξ|² − 1`
    TorusLaplace,
    /// `ξ₁² + ξ₂²/sin²θ − 1` in the chart `x = (θ, φ)`
    SphereLaplace,
    /// `|x|² + |ξ|² − 1`
    Hermite,
    Custom { src: String, expr: Expr },
    /// `p̃(y, η) = p(τ⁻¹y, Aᵀη)` for the affine map `τ = (A, c)`.
    Transported { inner: Box<SymbolModel>, map: AffineMap },
}

#[derive(Clone, Debug)]
pub struct SymbolModel {
    pub id: String,
    pub kind: SymbolKind,
    pub max_order: usize,
    pub region: Region,
}

impl SymbolModel {
    pub fn torus_laplace() -> Self {
        SymbolModel {
            id: "torus_laplace".into(),
            kind: SymbolKind::TorusLaplace,
            max_order: BUILTIN_MAX_ORDER,
            region: Region { kp: [[-4.0, 4.0], [-4.0, 4.0]], kf: [[-2.0, 2.0], [-2.0, 2.0]] },
        }
    }

    pub fn sphere_laplace() -> Self {
        let pi = std::f64::consts::PI;
        SymbolModel {
            id: "sphere_laplace".into(),
            kind: SymbolKind::SphereLaplace,
            max_order: BUILTIN_MAX_ORDER,
            region: Region { kp: [[0.1, pi - 0.1], [-7.0, 7.0]], kf: [[-2.0, 2.0], [-2.0, 2.0]] },
        }
    }

    pub fn hermite() -> Self {
        SymbolModel {
            id: "hermite".into(),
            kind: SymbolKind::Hermite,
            max_order: BUILTIN_MAX_ORDER,
            region: Region { kp: [[-0.9, 0.9], [-0.9, 0.9]], kf: [[-2.0, 2.0], [-2.0, 2.0]] },
        }
    }

    pub fn custom(src: &str) -> Result<Self, SymbolError> {
        let expr = Expr::parse(src, &SYMBOL_VARS)?;
        Ok(SymbolModel {
            id: format!("custom:{src}"),
            kind: SymbolKind::Custom { src: src.to_string(), expr },
            max_order: BUILTIN_MAX_ORDER,
            region: Region { kp: [[-1.0, 1.0], [-1.0, 1.0]], kf: [[-2.0, 2.0], [-2.0, 2.0]] },
        })
    }

    /// `"torus_laplace" | "sphere_laplace" | "hermite" | "custom:<expr>"`.
    pub fn from_name(name: &str) -> Result<Self, SymbolError> {
        match name {
            "torus_laplace" => Ok(Self::torus_laplace()),
            "sphere_laplace" => Ok(Self::sphere_laplace()),
            "hermite" => Ok(Self::hermite()),
            _ => match name.strip_prefix("custom:") {
                Some(src) => Self::custom(src),
                None => Err(SymbolError::Unknown(name.to_string())),
            },
        }
    }

    pub fn with_region(mut self, region: Region) -> Self {
        self.region = region;
        self
    }

    /// Push the symbol forward along an affine chart change (with cotangent lift).
    pub fn transported(self, map: AffineMap) -> Self {
        let kp = bbox(&corners(&self.region.kp).map(|p| map.apply(&p)));
        let ait = transpose(&map.inverse().a);
        let kf = bbox(&corners(&self.region.kf).map(|p| mat_vec(&ait, &p)));
        SymbolModel {
            id: format!("transported({})", self.id),
            max_order: self.max_order,
            region: Region { kp, kf },
            kind: SymbolKind::Transported { inner: Box::new(self), map },
        }
    }

    pub fn is_builtin(&self) -> bool {
        matches!(self.kind, SymbolKind::TorusLaplace | SymbolKind::SphereLaplace | SymbolKind::Hermite)
    }

    /// Generic evaluation on any scalar carrier.
    pub fn p<T: Scalar>(&self, x: &[T; 2], xi: &[T; 2]) -> T {
        match &self.kind {
            SymbolKind::TorusLaplace => xi[0].sqr() + xi[1].sqr() - 1.0,
            SymbolKind::Hermite => x[0].sqr() + x[1].sqr() + xi[0].sqr() + xi[1].sqr() - 1.0,
            SymbolKind::SphereLaplace => {
                let s = x[0].sin();
                xi[0].sqr() + xi[1].sqr() / s.sqr() - 1.0
            }
            SymbolKind::Custom { expr, .. } => {
                expr.eval(&[x[0].clone(), x[1].clone(), xi[0].clone(), xi[1].clone()])
            }
            SymbolKind::Transported { inner, map } => {
                let inv = map.inverse();
                let xx = inv.apply(x);
                let xixi = mat_vec(&transpose(&map.a), xi);
                inner.p(&xx, &xixi)
            }
        }
    }

    /// `(∂ₓp, ∂_ξp)` on any scalar carrier.
    pub fn grad<T: Scalar>(&self, x: &[T; 2], xi: &[T; 2]) -> ([T; 2], [T; 2]) {
        match &self.kind {
            SymbolKind::TorusLaplace => {
                let z = xi[0].cst(0.0);
                ([z.clone(), z], [xi[0].clone() * 2.0, xi[1].clone() * 2.0])
            }
            SymbolKind::Hermite => (
                [x[0].clone() * 2.0, x[1].clone() * 2.0],
                [xi[0].clone() * 2.0, xi[1].clone() * 2.0],
            ),
            SymbolKind::SphereLaplace => {
                let s = x[0].sin();
                let c = x[0].cos();
                let inv_s2 = s.sqr().recip();
                let dtheta = -(xi[1].sqr() * c * 2.0) * inv_s2.clone() / s;
                ([dtheta, xi[0].cst(0.0)], [xi[0].clone() * 2.0, xi[1].clone() * 2.0 * inv_s2])
            }
            SymbolKind::Custom { .. } => {
                let g = self.p(
                    &[Grad::variable(x[0].clone(), 0), Grad::variable(x[1].clone(), 1)],
                    &[Grad::variable(xi[0].clone(), 2), Grad::variable(xi[1].clone(), 3)],
                );
                let [d0, d1, d2, d3] = g.d;
                ([d0, d1], [d2, d3])
            }
            SymbolKind::Transported { inner, map } => {
                let inv = map.inverse();
                let xx = inv.apply(x);
                let xixi = mat_vec(&transpose(&map.a), xi);
                let (gx, gxi) = inner.grad(&xx, &xixi);
                (mat_vec(&transpose(&inv.a), &gx), mat_vec(&map.a, &gxi))
            }
        }
    }

    pub fn eval(&self, pt: &PhaseSpacePoint) -> Result<f64, SymbolError> {
        let v = self.p(&pt.x, &pt.xi);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(SymbolError::Domain(format!("{pt:?}")))
        }
    }

    pub fn gradient(&self, pt: &PhaseSpacePoint) -> ([f64; 2], [f64; 2]) {
        self.grad(&pt.x, &pt.xi)
    }

    /// Partial derivative `∂^α p` with `α` over `(x₁, x₂, ξ₁, ξ₂)`.
    pub fn derivative(&self, pt: &PhaseSpacePoint, alpha: [usize; 4]) -> Result<f64, SymbolError> {
        let order: usize = alpha.iter().sum();
        if order > self.max_order {
            return Err(SymbolError::Order { requested: order, max: self.max_order });
        }
        if order == 0 {
            return self.eval(pt);
        }
        let y = pt.to_array();
        let only = |slot: usize| (0..4).all(|k| k == slot || alpha[k] == 0);
        let v = match &self.kind {
            SymbolKind::TorusLaplace => (2..4)
                .filter(|&s| only(s))
                .map(|s| square_deriv(y[s], alpha[s]))
                .sum(),
            SymbolKind::Hermite => {
                (0..4).filter(|&s| only(s)).map(|s| square_deriv(y[s], alpha[s])).sum()
            }
            SymbolKind::SphereLaplace => {
                let mut v = 0.0;
                if only(2) {
                    v += square_deriv(y[2], alpha[2]);
                }
                if alpha[1] == 0 && alpha[2] == 0 {
                    v += csc2_deriv(y[0], alpha[0]) * square_deriv(y[3], alpha[3]);
                }
                v
            }
            SymbolKind::Custom { .. } | SymbolKind::Transported { .. } => {
                let x = [BoxJet::variable(y[0], 0, alpha), BoxJet::variable(y[1], 1, alpha)];
                let xi = [BoxJet::variable(y[2], 2, alpha), BoxJet::variable(y[3], 3, alpha)];
                self.p(&x, &xi).partial(&alpha)
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(SymbolError::Domain(format!("{pt:?}")))
        }
    }

    /// Full 4×4 Hessian in `(x₁, x₂, ξ₁, ξ₂)`.
    pub fn hessian(&self, pt: &PhaseSpacePoint) -> [[f64; 4]; 4] {
        if self.is_builtin() {
            let mut h = [[0.0; 4]; 4];
            for i in 0..4 {
                for j in i..4 {
                    let mut a = [0; 4];
                    a[i] += 1;
                    a[j] += 1;
                    let v = self.derivative(pt, a).unwrap_or(f64::NAN);
                    h[i][j] = v;
                    h[j][i] = v;
                }
            }
            return h;
        }
        let y = pt.to_array();
        let v: [Grad<f64>; 4] = std::array::from_fn(|i| Grad::variable(y[i], i));
        let (gx, gxi) = self.grad(&[v[0].clone(), v[1].clone()], &[v[2].clone(), v[3].clone()]);
        let rows = [&gx[0], &gx[1], &gxi[0], &gxi[1]];
        std::array::from_fn(|i| std::array::from_fn(|j| rows[i].d[j]))
    }

    /// `∂_ξ² p` (2×2 block of the Hessian).
    pub fn hess_xi(&self, pt: &PhaseSpacePoint) -> [[f64; 2]; 2] {
        let h = self.hessian(pt);
        [[h[2][2], h[2][3]], [h[3][2], h[3][3]]]
    }
}

/// `d^k/dv^k v²`.
fn square_deriv(v: f64, k: usize) -> f64 {
    match k {
        0 => v * v,
        1 => 2.0 * v,
        2 => 2.0,
        _ => 0.0,
    }
}

/// `d^k/dθ^k csc²θ` from the power series of `1/sin²`.
fn csc2_deriv(theta: f64, k: usize) -> f64 {
    let t = Taylor::variable(theta, k + 1);
    let s = t.sin();
    (s * s).recip().deriv(k)
}
