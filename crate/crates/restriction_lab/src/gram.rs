//! Gram operators `c ↦ B*W(Bc)` of cluster bases restricted to a curve.
//!
//! `(Bc)_i = Σ_a c_a φ_a(γ(t_i))` evaluates the cluster function on the
//! quadrature nodes, so `c*Gc = ‖Σ c_a φ_a‖²_{L²(γ)}` and the top eigenvalue
//! of `G` is the squared norm of the cluster projector into `L²(γ)`.

use eigenfunction_bases::{evaluate_basis, BasisMatrix, ClusterBasis, Indices};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::TAU;

use crate::lanczos::HermitianOperator;
use crate::quadrature::QuadratureRule;

/// Node groups per reduction; fixed so results do not depend on the thread
/// count.
const PARTS: usize = 16;
/// Nodes processed together; phase tables are interleaved by node so the
/// inner loop runs over contiguous lanes.
const NB: usize = 8;
const RESYNC: usize = 32;

/// `e^{ikx_b}` for `k = k0, k0+1, …` and every lane `b`. Entry `j` occupies
/// `tab[2NB·j ..]`: `NB` real parts, then `NB` imaginary parts.
fn phase_tables(x: &Lanes, k0: i64, tab: &mut [f64]) {
    let n = tab.len() / (2 * NB);
    let (mut sr, mut si) = ([0.0; NB], [0.0; NB]);
    for b in 0..NB {
        (si[b], sr[b]) = x[b].sin_cos();
    }
    let (mut zr, mut zi) = ([0.0; NB], [0.0; NB]);
    for (j, out) in tab.chunks_exact_mut(2 * NB).enumerate().take(n) {
        if j % RESYNC == 0 {
            let k = (k0 + j as i64) as f64;
            for b in 0..NB {
                (zi[b], zr[b]) = (k * x[b]).sin_cos();
            }
        } else {
            for b in 0..NB {
                let r = zr[b] * sr[b] - zi[b] * si[b];
                zi[b] = zr[b] * si[b] + zi[b] * sr[b];
                zr[b] = r;
            }
        }
        out[..NB].copy_from_slice(&zr);
        out[NB..].copy_from_slice(&zi);
    }
}

struct Tables {
    e1: Vec<f64>,
    e2: Vec<f64>,
}

type Lanes = [f64; NB];

#[inline(always)]
fn entry(v: &[f64], o: usize) -> &[f64; 2 * NB] {
    v[o..o + 2 * NB].try_into().expect("lane width")
}

/// One lattice row: elements `start..end` share `k₁`, whose phase table
/// entry starts at `e1`.
#[derive(Clone, Copy, Debug)]
struct Row {
    e1: u32,
    start: u32,
    end: u32,
}

/// `Σ_a c_a e^{i⟨k_a, p_b⟩}` for every lane `b`, factored by row.
fn synth_kernel(rows: &[Row], idx2: &[u32], e1: &[f64], e2: &[f64], cr: &[f64], ci: &[f64]) -> (Lanes, Lanes) {
    let (mut yr, mut yi) = ([0.0; NB], [0.0; NB]);
    for row in rows {
        let r = row.start as usize..row.end as usize;
        let (mut ar, mut ai) = ([0.0; NB], [0.0; NB]);
        for ((&i2, &xr), &xi) in idx2[r.clone()].iter().zip(&cr[r.clone()]).zip(&ci[r]) {
            let s2 = entry(e2, i2 as usize);
            for b in 0..NB {
                ar[b] += xr * s2[b] - xi * s2[NB + b];
                ai[b] += xr * s2[NB + b] + xi * s2[b];
            }
        }
        let s1 = entry(e1, row.e1 as usize);
        for b in 0..NB {
            yr[b] += s1[b] * ar[b] - s1[NB + b] * ai[b];
            yi[b] += s1[b] * ai[b] + s1[NB + b] * ar[b];
        }
    }
    (yr, yi)
}

/// `z_a += Σ_b s_b · conj(e^{i⟨k_a, p_b⟩})`, factored by row.
#[allow(clippy::too_many_arguments)]
fn spread_kernel(rows: &[Row], idx2: &[u32], e1: &[f64], e2: &[f64], sr: &Lanes, si: &Lanes, zr: &mut [f64], zi: &mut [f64]) {
    for row in rows {
        let s1 = entry(e1, row.e1 as usize);
        let (mut ur, mut ui) = ([0.0; NB], [0.0; NB]);
        for b in 0..NB {
            ur[b] = sr[b] * s1[b] + si[b] * s1[NB + b];
            ui[b] = si[b] * s1[b] - sr[b] * s1[NB + b];
        }
        let r = row.start as usize..row.end as usize;
        for ((&i2, zr), zi) in idx2[r.clone()].iter().zip(&mut zr[r.clone()]).zip(&mut zi[r]) {
            let s2 = entry(e2, i2 as usize);
            let (mut vr, mut vi) = ([0.0; NB], [0.0; NB]);
            for b in 0..NB {
                vr[b] = ur[b] * s2[b] + ui[b] * s2[NB + b];
                vi[b] = ui[b] * s2[b] - ur[b] * s2[NB + b];
            }
            *zr += ((vr[0] + vr[1]) + (vr[2] + vr[3])) + ((vr[4] + vr[5]) + (vr[6] + vr[7]));
            *zi += ((vi[0] + vi[1]) + (vi[2] + vi[3])) + ((vi[4] + vi[5]) + (vi[6] + vi[7]));
        }
    }
}

/// Torus cluster on a curve. Each lattice point is stored as a pair of
/// offsets into per-node phase tables for `k₁` and `k₂`, so a node costs two
/// short tables instead of `dim` complex exponentials.
pub struct TorusGram {
    dim: usize,
    rows: Vec<Row>,
    idx2: Vec<u32>,
    k1_lo: i64,
    n1: usize,
    k2_lo: i64,
    n2: usize,
    points: Vec<[f64; 2]>,
    /// Quadrature weights times `(2π)⁻²`.
    weights: Vec<f64>,
}

/// Runs of equal `k₁` in storage order.
fn lattice_rows(ks: &[[i64; 2]], k1_lo: i64) -> Vec<Row> {
    let mut rows: Vec<Row> = Vec::new();
    for (a, k) in ks.iter().enumerate() {
        let e1 = ((k[0] - k1_lo) as usize * 2 * NB) as u32;
        match rows.last_mut() {
            Some(r) if r.e1 == e1 => r.end = a as u32 + 1,
            _ => rows.push(Row { e1, start: a as u32, end: a as u32 + 1 }),
        }
    }
    rows
}

impl TorusGram {
    pub fn new(basis: &ClusterBasis, quad: &QuadratureRule) -> Option<Self> {
        let Indices::Torus(ks) = &basis.indices else { return None };
        let k1_lo = ks.iter().map(|k| k[0]).min()?;
        let k1_hi = ks.iter().map(|k| k[0]).max()?;
        let k2_lo = ks.iter().map(|k| k[1]).min()?;
        let k2_hi = ks.iter().map(|k| k[1]).max()?;
        Some(TorusGram {
            dim: ks.len(),
            rows: lattice_rows(ks, k1_lo),
            idx2: ks.iter().map(|k| ((k[1] - k2_lo) as usize * 2 * NB) as u32).collect(),
            k1_lo,
            n1: (k1_hi - k1_lo + 1) as usize,
            k2_lo,
            n2: (k2_hi - k2_lo + 1) as usize,
            points: quad.points.clone(),
            weights: quad.weights.iter().map(|w| w / (TAU * TAU)).collect(),
        })
    }

    fn tables(&self) -> Tables {
        Tables { e1: vec![0.0; self.n1 * 2 * NB], e2: vec![0.0; self.n2 * 2 * NB] }
    }

    /// Fill lanes from up to `NB` points; unused lanes repeat the last point.
    fn fill(&self, t: &mut Tables, pts: &[[f64; 2]]) {
        let (mut x1, mut x2) = ([0.0; NB], [0.0; NB]);
        for lane in 0..NB {
            let p = pts[lane.min(pts.len() - 1)];
            x1[lane] = p[0];
            x2[lane] = p[1];
        }
        phase_tables(&x1, self.k1_lo, &mut t.e1);
        phase_tables(&x2, self.k2_lo, &mut t.e2);
    }

    fn synth(&self, t: &Tables, cr: &[f64], ci: &[f64]) -> (Lanes, Lanes) {
        synth_kernel(&self.rows, &self.idx2, &t.e1, &t.e2, cr, ci)
    }

    fn spread(&self, t: &Tables, sr: &Lanes, si: &Lanes, zr: &mut [f64], zi: &mut [f64]) {
        spread_kernel(&self.rows, &self.idx2, &t.e1, &t.e2, sr, si, zr, zi)
    }

    /// Values of `Σ_a c_a φ_a` at arbitrary points.
    pub fn synthesize(&self, c: &[Complex64], points: &[[f64; 2]]) -> Vec<Complex64> {
        let (cr, ci): (Vec<f64>, Vec<f64>) = c.iter().map(|z| (z.re, z.im)).unzip();
        let blocks: Vec<Vec<Complex64>> = points
            .par_chunks(NB)
            .map_init(
                || self.tables(),
                |t, pts| {
                    self.fill(t, pts);
                    let (yr, yi) = self.synth(t, &cr, &ci);
                    (0..pts.len()).map(|b| Complex64::new(yr[b], yi[b]) / TAU).collect()
                },
            )
            .collect();
        blocks.concat()
    }

    /// `Σ_i v_i conj(φ(x_i))` over the operator's own nodes.
    pub fn adjoint(&self, v: &[Complex64]) -> Vec<Complex64> {
        let (zr, zi) = self.reduce(|t, range, zr, zi| {
            let (mut sr, mut si) = ([0.0; NB], [0.0; NB]);
            for (b, i) in range.enumerate() {
                sr[b] = v[i].re / TAU;
                si[b] = v[i].im / TAU;
            }
            self.spread(t, &sr, &si, zr, zi);
        });
        zr.into_iter().zip(zi).map(|(r, i)| Complex64::new(r, i)).collect()
    }

    /// Run `per_block` over node blocks in `PARTS` fixed groups and sum the
    /// group results in order.
    fn reduce<F>(&self, per_block: F) -> (Vec<f64>, Vec<f64>)
    where
        F: Fn(&Tables, std::ops::Range<usize>, &mut [f64], &mut [f64]) + Sync,
    {
        let n = self.points.len();
        let nblocks = n.div_ceil(NB);
        let per_part = nblocks.div_ceil(PARTS).max(1);
        let parts: Vec<(Vec<f64>, Vec<f64>)> = (0..nblocks.div_ceil(per_part))
            .into_par_iter()
            .map(|p| {
                let mut t = self.tables();
                let (mut zr, mut zi) = (vec![0.0; self.dim], vec![0.0; self.dim]);
                for blk in p * per_part..((p + 1) * per_part).min(nblocks) {
                    let range = blk * NB..((blk + 1) * NB).min(n);
                    self.fill(&mut t, &self.points[range.clone()]);
                    per_block(&t, range, &mut zr, &mut zi);
                }
                (zr, zi)
            })
            .collect();
        let mut it = parts.into_iter();
        let (mut zr, mut zi) = it.next().unwrap_or_else(|| (vec![0.0; self.dim], vec![0.0; self.dim]));
        for (r, i) in it {
            zr.iter_mut().zip(&r).for_each(|(a, b)| *a += b);
            zi.iter_mut().zip(&i).for_each(|(a, b)| *a += b);
        }
        (zr, zi)
    }
}

impl HermitianOperator for TorusGram {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        let (cr, ci): (Vec<f64>, Vec<f64>) = x.iter().map(|z| (z.re, z.im)).unzip();
        let (zr, zi) = self.reduce(|t, range, zr, zi| {
            let (yr, yi) = self.synth(t, &cr, &ci);
            let (mut sr, mut si) = ([0.0; NB], [0.0; NB]);
            for (b, i) in range.enumerate() {
                sr[b] = yr[b] * self.weights[i];
                si[b] = yi[b] * self.weights[i];
            }
            self.spread(t, &sr, &si, zr, zi);
        });
        for ((o, r), i) in y.iter_mut().zip(zr).zip(zi) {
            *o = Complex64::new(r, i);
        }
    }
}

/// Any basis, with `B` evaluated once and kept.
pub struct DenseBasisGram {
    pub values: BasisMatrix,
    pub weights: Vec<f64>,
}

impl DenseBasisGram {
    pub fn new(basis: &ClusterBasis, quad: &QuadratureRule) -> Self {
        DenseBasisGram { values: evaluate_basis(basis, &quad.points), weights: quad.weights.clone() }
    }

    pub fn synthesize_nodes(&self, c: &[Complex64]) -> Vec<Complex64> {
        (0..self.values.n_points)
            .into_par_iter()
            .map(|j| self.values.column(j).iter().zip(c).map(|(p, x)| p * x).sum())
            .collect()
    }

    /// `Σ_j v_j conj(φ(x_j))`.
    pub fn adjoint(&self, v: &[Complex64]) -> Vec<Complex64> {
        let d = self.values.dim;
        let mut z = vec![Complex64::new(0.0, 0.0); d];
        for (j, vj) in v.iter().enumerate() {
            for (za, p) in z.iter_mut().zip(self.values.column(j)) {
                *za += vj * p.conj();
            }
        }
        z
    }

    pub fn dense(&self) -> DMatrix<Complex64> {
        let d = self.values.dim;
        let mut g = DMatrix::zeros(d, d);
        for j in 0..self.values.n_points {
            let col = self.values.column(j);
            let w = self.weights[j];
            for a in 0..d {
                let pa = col[a].conj() * w;
                for b in 0..d {
                    g[(a, b)] += pa * col[b];
                }
            }
        }
        g
    }
}

impl HermitianOperator for DenseBasisGram {
    fn dim(&self) -> usize {
        self.values.dim
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        let f = self.synthesize_nodes(x);
        let v: Vec<Complex64> = f.iter().zip(&self.weights).map(|(f, w)| f * w).collect();
        y.copy_from_slice(&self.adjoint(&v));
    }
}

/// Dense Hermitian eigenvalues (ascending).
pub fn dense_eigenvalues(g: DMatrix<Complex64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(g).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `trace(G) = Σ_a ‖φ_a‖²_{L²(γ)}`.
pub fn gram_trace(basis: &ClusterBasis, quad: &QuadratureRule) -> f64 {
    quad.points
        .par_iter()
        .zip(&quad.weights)
        .map(|(p, w)| w * basis.kernel_diagonal(*p))
        .collect::<Vec<f64>>()
        .iter()
        .sum()
}

/// Whether the basis has a row-structured fast path.
pub fn is_torus(basis: &ClusterBasis) -> bool {
    matches!(basis.indices, Indices::Torus(_))
}
