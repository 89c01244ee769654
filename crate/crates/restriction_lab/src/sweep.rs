//! λ grids and per-family measurements.

use contact_order::{CurveModel, CurveSpec};
use eigenfunction_bases::{hermite_cluster, sphere_cluster, torus_cluster, Family, Indices};
use num_complex::Complex64;
use std::collections::HashMap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use symbol_core::AffineMap;

use crate::error::RestrictionError;
use crate::lanczos::{random_unit, LanczosOptions};
use crate::norms::{gram_norm_from, gram_operator_norm, hermite_circle_norm, sphere_latitude_norm, NormSample, RestrictionMap};
use crate::quadrature::{curve_quadrature, Metric};

/// Jitter offsets `λ(1 + j·0.3/λ)`.
pub const JITTER_STEP: f64 = 0.3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaGrid {
    pub min: f64,
    pub max: f64,
    pub points_per_decade: f64,
    pub jitter_group: usize,
}

impl LambdaGrid {
    /// Geometric group centres from `min` to `max` inclusive.
    pub fn centres(&self) -> Vec<f64> {
        let decades = (self.max / self.min).log10();
        let n = ((self.points_per_decade * decades).ceil() as usize).max(1) + 1;
        (0..n).map(|i| self.min * (self.max / self.min).powf(i as f64 / (n - 1) as f64)).collect()
    }

    /// `(group, λ)` with the real-valued jitter `λ, λ + 0.3, λ + 0.6, …`.
    pub fn torus_levels(&self) -> Vec<(usize, f64)> {
        self.centres()
            .into_iter()
            .enumerate()
            .flat_map(|(g, c)| (0..self.jitter_group.max(1)).map(move |j| (g, c * (1.0 + j as f64 * JITTER_STEP / c))))
            .collect()
    }

    /// `(group, index)` for integer-indexed families: the rounded centre and
    /// its `jitter_group − 1` successors.
    pub fn integer_levels(&self) -> Vec<(usize, usize)> {
        self.centres()
            .into_iter()
            .enumerate()
            .flat_map(|(g, c)| (0..self.jitter_group.max(1)).map(move |j| (g, c.round() as usize + j)))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct SweepOptions {
    pub lanczos: LanczosOptions,
    pub seed: u64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { lanczos: LanczosOptions::default(), seed: 1 }
    }
}

/// splitmix64 finalizer, used to derive per-job seeds.
pub fn mix_seed(a: u64, b: u64) -> u64 {
    let mut z = a ^ b.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn opts_for(o: &SweepOptions, key: f64) -> LanczosOptions {
    LanczosOptions { seed: mix_seed(o.seed, key.to_bits()), ..o.lanczos }
}

/// `‖Π_λ‖_{L²→L²(γ)}` on the torus.
pub fn measure_torus(curve: &CurveModel, lambda: f64, o: &SweepOptions) -> Result<NormSample, RestrictionError> {
    measure_torus_from(curve, lambda, o, None).map(|(s, _)| s)
}

/// Top eigenvector of a torus measurement, keyed by lattice point.
#[derive(Clone, Debug, Default)]
pub struct TorusState {
    pub vector: HashMap<[i64; 2], Complex64>,
}

/// Weight of the random component mixed into a warm start, so the start
/// keeps an overlap with every eigenvector.
const WARM_NOISE: f64 = 0.01;

/// As [`measure_torus`], starting Lanczos from the eigenvector of a nearby
/// level restricted to the shared lattice points.
pub fn measure_torus_from(
    curve: &CurveModel,
    lambda: f64,
    o: &SweepOptions,
    prev: Option<&TorusState>,
) -> Result<(NormSample, TorusState), RestrictionError> {
    let basis = torus_cluster(lambda, eigenfunction_bases::DEFAULT_WINDOW)?;
    let quad = curve_quadrature(curve, Metric::Euclidean, lambda + 1.0)?;
    let Indices::Torus(ks) = &basis.indices else { unreachable!("torus basis") };
    let opts = opts_for(o, lambda);
    let mut start = random_unit(ks.len(), opts.seed);
    if let Some(p) = prev {
        for (z, k) in start.iter_mut().zip(ks) {
            *z = *z * WARM_NOISE + p.vector.get(k).copied().unwrap_or_default();
        }
        let n = start.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        start.iter_mut().for_each(|z| *z /= n);
    }
    let map = RestrictionMap::new(&basis, &quad);
    let g = gram_norm_from(&map, &basis, &quad, &opts, start);
    let vector = ks.iter().copied().zip(g.eigen.vector).collect();
    Ok((g.sample, TorusState { vector }))
}

/// Full latitude circle, if the spec describes one.
pub fn full_latitude(spec: &CurveSpec) -> Option<f64> {
    match spec {
        CurveSpec::Latitude { theta0, interval } => match interval {
            None => Some(*theta0),
            Some([a, b]) if (b - a).abs() >= TAU - 1e-12 => Some(*theta0),
            _ => None,
        },
        _ => None,
    }
}

/// Full circle centred at the origin, if the spec describes one.
pub fn centred_circle(spec: &CurveSpec) -> Option<f64> {
    match spec {
        CurveSpec::Circle { center, radius, interval } if center[0] == 0.0 && center[1] == 0.0 => match interval {
            None => Some(*radius),
            Some([a, b]) if (b - a).abs() >= TAU - 1e-12 => Some(*radius),
            _ => None,
        },
        _ => None,
    }
}

/// Degree-`l` harmonics on a curve in the `(θ, φ)` chart; full latitudes
/// use the closed form unless `generic` is set.
pub fn measure_sphere(spec: &CurveSpec, l: usize, generic: bool, o: &SweepOptions) -> Result<NormSample, RestrictionError> {
    if let (Some(theta0), false) = (full_latitude(spec), generic) {
        sphere_cluster(l)?;
        return Ok(sphere_latitude_norm(l, theta0));
    }
    let basis = sphere_cluster(l)?;
    let curve = CurveModel::from_spec(spec)?;
    let quad = curve_quadrature(&curve, Metric::Sphere, basis.level + 1.0)?;
    Ok(gram_operator_norm(&basis, &quad, &opts_for(o, l as f64)).sample)
}

/// Oscillator level `n` on the dilated curve `λγ` (physical coordinates).
/// Centred circles use the polar closed form unless `generic` is set.
pub fn measure_hermite(spec: &CurveSpec, n: usize, generic: bool, o: &SweepOptions) -> Result<NormSample, RestrictionError> {
    let basis = hermite_cluster(n)?;
    let lambda = basis.level;
    if let (Some(r), false) = (centred_circle(spec), generic) {
        return Ok(hermite_circle_norm(n, lambda * r));
    }
    let curve = CurveModel::from_spec(spec)?.transported(&AffineMap { a: [[lambda, 0.0], [0.0, lambda]], c: [0.0, 0.0] })?;
    let quad = curve_quadrature(&curve, Metric::Euclidean, lambda)?;
    Ok(gram_operator_norm(&basis, &quad, &opts_for(o, n as f64)).sample)
}

fn tag(mut s: NormSample, group: usize) -> NormSample {
    s.meta.group = group;
    s
}

/// Torus samples over a grid, ordered by `λ`. Failed jobs are returned as
/// errors in place so that partial results survive.
/// Members of a jitter group run in order, each warm-started from the
/// previous one; groups run in parallel.
pub fn torus_sweep(curve: &CurveModel, grid: &LambdaGrid, o: &SweepOptions) -> Vec<Result<NormSample, RestrictionError>> {
    let levels = grid.torus_levels();
    let groups: Vec<Vec<f64>> = levels.chunk_by(|a, b| a.0 == b.0).map(|c| c.iter().map(|x| x.1).collect()).collect();
    groups
        .into_par_iter()
        .enumerate()
        .flat_map_iter(|(g, lambdas)| {
            let mut prev: Option<TorusState> = None;
            lambdas
                .into_iter()
                .map(|l| {
                    let r = measure_torus_from(curve, l, o, prev.as_ref());
                    r.map(|(s, st)| {
                        prev = Some(st);
                        tag(s, g)
                    })
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

pub fn sphere_sweep(spec: &CurveSpec, grid: &LambdaGrid, o: &SweepOptions) -> Vec<Result<NormSample, RestrictionError>> {
    grid.integer_levels().into_par_iter().map(|(g, l)| measure_sphere(spec, l, false, o).map(|s| tag(s, g))).collect()
}

pub fn hermite_sweep(spec: &CurveSpec, grid: &LambdaGrid, o: &SweepOptions) -> Vec<Result<NormSample, RestrictionError>> {
    grid.integer_levels().into_par_iter().map(|(g, n)| measure_hermite(spec, n, false, o).map(|s| tag(s, g))).collect()
}

pub fn family_of(spec_symbol: &str) -> Option<Family> {
    match spec_symbol {
        "torus" | "torus_laplace" => Some(Family::Torus),
        "sphere" | "sphere_laplace" => Some(Family::Sphere),
        "hermite" => Some(Family::Hermite),
        _ => None,
    }
}
