use eigenfunction_bases::{legendre_column, polar_radial, ClusterBasis, Family};
use num_complex::Complex64;
use serde::Serialize;

use crate::gram::{DenseBasisGram, TorusGram};
use crate::lanczos::{random_unit, top_eigenpair_from, HermitianOperator, LanczosOptions, TopEigen};
use crate::quadrature::QuadratureRule;

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SampleMeta {
    pub dim: usize,
    pub quad_n: usize,
    pub iterations: usize,
    pub residual: f64,
    /// Index of the jitter group this sample belongs to.
    pub group: usize,
    /// `lanczos`, `latitude-closed-form`, `polar-closed-form`, `cap`, `ascent`.
    pub method: String,
    /// Non-fatal condition, e.g. `lanczos-not-converged`.
    pub flag: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormSample {
    pub lambda: f64,
    pub value: f64,
    /// Lebesgue exponent; `f64::INFINITY` for `q = ∞`.
    pub q: f64,
    pub family: Family,
    pub meta: SampleMeta,
}

impl NormSample {
    pub fn is_valid(&self) -> bool {
        self.value.is_finite() && self.value > 0.0 && self.lambda > 0.0
    }
}

/// Matrix-free restriction map for a basis on a rule: torus row structure
/// when available, otherwise the basis evaluated once on the nodes.
pub enum RestrictionMap {
    Torus(TorusGram),
    Dense(DenseBasisGram),
}

impl RestrictionMap {
    pub fn new(basis: &ClusterBasis, quad: &QuadratureRule) -> Self {
        match TorusGram::new(basis, quad) {
            Some(t) => RestrictionMap::Torus(t),
            None => RestrictionMap::Dense(DenseBasisGram::new(basis, quad)),
        }
    }

    pub fn operator(&self) -> &dyn HermitianOperator {
        match self {
            RestrictionMap::Torus(t) => t,
            RestrictionMap::Dense(d) => d,
        }
    }

    pub fn dim(&self) -> usize {
        self.operator().dim()
    }

    /// `f = Bc` on the rule's nodes.
    pub fn values(&self, c: &[Complex64], quad: &QuadratureRule) -> Vec<Complex64> {
        match self {
            RestrictionMap::Torus(t) => t.synthesize(c, &quad.points),
            RestrictionMap::Dense(d) => d.synthesize_nodes(c),
        }
    }

    /// `B*v`.
    pub fn adjoint(&self, v: &[Complex64]) -> Vec<Complex64> {
        match self {
            RestrictionMap::Torus(t) => t.adjoint(v),
            RestrictionMap::Dense(d) => d.adjoint(v),
        }
    }
}

#[derive(Clone, Debug)]
pub struct GramNorm {
    pub sample: NormSample,
    pub eigen: TopEigen,
}

/// `‖Π‖_{L²→L²(γ)} = √λ_max(G)`.
pub fn gram_operator_norm(basis: &ClusterBasis, quad: &QuadratureRule, opts: &LanczosOptions) -> GramNorm {
    let map = RestrictionMap::new(basis, quad);
    gram_norm_with(&map, basis, quad, opts)
}

pub fn gram_norm_with(map: &RestrictionMap, basis: &ClusterBasis, quad: &QuadratureRule, opts: &LanczosOptions) -> GramNorm {
    gram_norm_from(map, basis, quad, opts, random_unit(map.dim(), opts.seed))
}

/// As [`gram_norm_with`], starting Lanczos from `start` (unit norm).
pub fn gram_norm_from(
    map: &RestrictionMap,
    basis: &ClusterBasis,
    quad: &QuadratureRule,
    opts: &LanczosOptions,
    start: Vec<Complex64>,
) -> GramNorm {
    let eigen = top_eigenpair_from(map.operator(), opts, start);
    let flag = if !eigen.converged {
        Some("lanczos-not-converged".to_string())
    } else if eigen.min_ritz < -1e-8 * eigen.value {
        Some("negative-ritz".to_string())
    } else {
        None
    };
    let sample = NormSample {
        lambda: basis.level,
        value: eigen.value.max(0.0).sqrt(),
        q: 2.0,
        family: basis.family,
        meta: SampleMeta {
            dim: basis.dim(),
            quad_n: quad.len(),
            iterations: eigen.iterations,
            residual: eigen.residual,
            group: 0,
            method: "lanczos".into(),
            flag,
        },
    };
    GramNorm { sample, eigen }
}

/// Full latitude circle `θ = θ₀`: the Gram matrix is diagonal in `m` with
/// entries `sin θ₀ · P̄_l^{|m|}(cos θ₀)²`.
pub fn sphere_latitude_norm(l: usize, theta0: f64) -> NormSample {
    let col = legendre_column(l, theta0.cos());
    let top = col.iter().map(|p| p * p).fold(0.0, f64::max);
    let lf = l as f64;
    NormSample {
        lambda: (lf * (lf + 1.0)).sqrt(),
        value: (theta0.sin() * top).sqrt(),
        q: 2.0,
        family: Family::Sphere,
        meta: SampleMeta { dim: 2 * l + 1, method: "latitude-closed-form".into(), ..SampleMeta::default() },
    }
}

/// Centred circle of radius `radius` (physical coordinates) for the
/// oscillator level `n`: diagonal in angular momentum with entries
/// `radius · R_{k,α}(radius)²`.
pub fn hermite_circle_norm(n: usize, radius: f64) -> NormSample {
    let top = polar_radial(n, radius).iter().map(|(_, r)| r * r).fold(0.0, f64::max);
    NormSample {
        lambda: (2.0 * n as f64 + 2.0).sqrt(),
        value: (radius * top).sqrt(),
        q: 2.0,
        family: Family::Hermite,
        meta: SampleMeta { dim: n + 1, method: "polar-closed-form".into(), ..SampleMeta::default() },
    }
}

