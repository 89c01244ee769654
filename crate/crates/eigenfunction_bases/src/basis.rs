use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use std::fmt;

use crate::error::BasisError;
use crate::hermite::{hermite_functions, HERMITE_MAX_N};
use crate::sphere::{legendre_column, SPHERE_MAX_L};
use crate::torus::{annulus_points, lattice_rows, LatticeRow};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Torus,
    Sphere,
    Hermite,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Torus => "torus",
            Family::Sphere => "sphere",
            Family::Hermite => "hermite",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Indices {
    /// Lattice points, ordered by `k₁` then `k₂`.
    Torus(Vec<[i64; 2]>),
    /// Degree `l` and orders `m = −l..=l`.
    Sphere { l: usize, m: Vec<i64> },
    /// Level `n` and pairs `(n₁, n₂)`, `n₁ = 0..=n`.
    Hermite { n: usize, pairs: Vec<[usize; 2]> },
}

/// Orthonormal basis of one spectral cluster.
///
/// Points are `x ∈ [0, 2π)²` on the torus, `(θ, φ)` on the sphere and
/// `x ∈ R²` for the oscillator.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterBasis {
    pub family: Family,
    /// `λ`.
    pub level: f64,
    pub indices: Indices,
}

pub fn torus_cluster(lambda: f64, window: [f64; 2]) -> Result<ClusterBasis, BasisError> {
    let pts = annulus_points(lambda, window)?;
    Ok(ClusterBasis { family: Family::Torus, level: lambda, indices: Indices::Torus(pts) })
}

pub fn sphere_cluster(l: usize) -> Result<ClusterBasis, BasisError> {
    if !(1..=SPHERE_MAX_L).contains(&l) {
        return Err(BasisError::OutOfRange { what: "l", value: l as f64, range: "[1, 5000]" });
    }
    let lf = l as f64;
    let m = (-(l as i64)..=l as i64).collect();
    Ok(ClusterBasis { family: Family::Sphere, level: (lf * (lf + 1.0)).sqrt(), indices: Indices::Sphere { l, m } })
}

pub fn hermite_cluster(n: usize) -> Result<ClusterBasis, BasisError> {
    if n > HERMITE_MAX_N {
        return Err(BasisError::OutOfRange { what: "n", value: n as f64, range: "[0, 6000]" });
    }
    let pairs = (0..=n).map(|a| [a, n - a]).collect();
    Ok(ClusterBasis {
        family: Family::Hermite,
        level: (2.0 * n as f64 + 2.0).sqrt(),
        indices: Indices::Hermite { n, pairs },
    })
}

impl ClusterBasis {
    pub fn dim(&self) -> usize {
        match &self.indices {
            Indices::Torus(k) => k.len(),
            Indices::Sphere { m, .. } => m.len(),
            Indices::Hermite { pairs, .. } => pairs.len(),
        }
    }

    /// Row structure of a torus cluster.
    pub fn torus_rows(&self) -> Option<Vec<LatticeRow>> {
        match &self.indices {
            Indices::Torus(k) => Some(lattice_rows(k)),
            _ => None,
        }
    }

    /// Eigenvalue of the model operator on this cluster's index `a`:
    /// `|k|²`, `l(l+1)` or `2n + 2`.
    pub fn eigenvalue(&self, a: usize) -> f64 {
        match &self.indices {
            Indices::Torus(k) => (k[a][0] * k[a][0] + k[a][1] * k[a][1]) as f64,
            Indices::Sphere { l, .. } => (*l * (*l + 1)) as f64,
            Indices::Hermite { n, .. } => 2.0 * *n as f64 + 2.0,
        }
    }

    /// All basis functions at one point, written into `out` (length `dim`).
    pub fn eval_into(&self, p: [f64; 2], out: &mut [Complex64]) {
        match &self.indices {
            Indices::Torus(ks) => {
                for (o, k) in out.iter_mut().zip(ks) {
                    let phase = k[0] as f64 * p[0] + k[1] as f64 * p[1];
                    *o = Complex64::from_polar(1.0 / TAU, phase);
                }
            }
            Indices::Sphere { l, m } => {
                let col = legendre_column(*l, p[0].cos());
                let c = 1.0 / TAU.sqrt();
                for (o, &mm) in out.iter_mut().zip(m) {
                    *o = Complex64::from_polar(c, mm as f64 * p[1]) * col[mm.unsigned_abs() as usize];
                }
            }
            Indices::Hermite { n, pairs } => {
                let h1 = hermite_functions(*n, p[0]);
                let h2 = hermite_functions(*n, p[1]);
                for (o, pr) in out.iter_mut().zip(pairs) {
                    *o = Complex64::new(h1[pr[0]] * h2[pr[1]], 0.0);
                }
            }
        }
    }

    pub fn eval_point(&self, p: [f64; 2]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        self.eval_into(p, &mut out);
        out
    }

    /// `(Σ_a |φ_a(p)|²)`, the diagonal of the cluster projector kernel.
    pub fn kernel_diagonal(&self, p: [f64; 2]) -> f64 {
        self.eval_point(p).iter().map(|z| z.norm_sqr()).sum()
    }
}

/// `dim × n_points` values, stored point by point.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisMatrix {
    pub dim: usize,
    pub n_points: usize,
    pub values: Vec<Complex64>,
}

impl BasisMatrix {
    /// `φ_a(p_j)`.
    pub fn get(&self, a: usize, j: usize) -> Complex64 {
        self.values[j * self.dim + a]
    }

    pub fn column(&self, j: usize) -> &[Complex64] {
        &self.values[j * self.dim..(j + 1) * self.dim]
    }
}

/// Evaluate every basis function at every point, in parallel over points.
pub fn evaluate_basis(basis: &ClusterBasis, points: &[[f64; 2]]) -> BasisMatrix {
    let dim = basis.dim();
    let mut values = vec![Complex64::new(0.0, 0.0); dim * points.len()];
    if dim > 0 {
        values.par_chunks_mut(dim).zip(points.par_iter()).for_each(|(col, &p)| basis.eval_into(p, col));
    }
    BasisMatrix { dim, n_points: points.len(), values }
}

/// `(2l + 1)/(4π)`.
pub fn sphere_kernel_diagonal(l: usize) -> f64 {
    (2 * l + 1) as f64 / (4.0 * PI)
}
