//! Top eigenpair of a Hermitian positive semidefinite operator by restarted
//! Lanczos with full reorthogonalization.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub trait HermitianOperator: Sync {
    fn dim(&self) -> usize;
    /// `y = A x`.
    fn apply(&self, x: &[Complex64], y: &mut [Complex64]);
}

#[derive(Clone, Copy, Debug)]
pub struct LanczosOptions {
    /// Relative residual `‖Av − θv‖ ≤ tol·θ`.
    pub tol: f64,
    /// Total operator applications.
    pub max_iter: usize,
    /// Krylov dimension per restart cycle.
    pub krylov: usize,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 500, krylov: 64, seed: 0x5eed }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TopEigen {
    pub value: f64,
    #[serde(skip)]
    pub vector: Vec<Complex64>,
    pub iterations: usize,
    /// Relative residual of the returned pair.
    pub residual: f64,
    pub converged: bool,
    /// Smallest Ritz value seen; a PSD operator keeps it ≳ 0.
    pub min_ritz: f64,
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn axpy(alpha: Complex64, x: &[Complex64], y: &mut [Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn tridiagonal_eigen(alpha: &[f64], beta: &[f64]) -> SymmetricEigen<f64, nalgebra::Dyn> {
    let k = alpha.len();
    let mut t = DMatrix::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i];
        if i + 1 < k {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    SymmetricEigen::new(t)
}

pub fn random_unit(dim: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<Complex64> =
        (0..dim).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let n = norm(&v);
    v.iter_mut().for_each(|z| *z /= n);
    v
}

pub fn top_eigenpair(op: &dyn HermitianOperator, opts: &LanczosOptions) -> TopEigen {
    top_eigenpair_from(op, opts, random_unit(op.dim(), opts.seed))
}

pub fn top_eigenpair_from(op: &dyn HermitianOperator, opts: &LanczosOptions, start: Vec<Complex64>) -> TopEigen {
    let n = op.dim();
    let m = opts.krylov.clamp(1, n.max(1));
    let mut v0 = start;
    let mut iterations = 0;
    let mut min_ritz = f64::INFINITY;
    let mut best = TopEigen { value: 0.0, vector: v0.clone(), iterations: 0, residual: f64::INFINITY, converged: false, min_ritz };
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    loop {
        let mut basis: Vec<Vec<Complex64>> = vec![v0.clone()];
        let (mut alpha, mut beta) = (Vec::new(), Vec::new());
        let mut done = false;
        for j in 0..m {
            op.apply(&basis[j], &mut w);
            iterations += 1;
            let a = dot(&basis[j], &w).re;
            alpha.push(a);
            // full reorthogonalization, twice
            for _ in 0..2 {
                for v in &basis {
                    let c = dot(v, &w);
                    axpy(-c, v, &mut w);
                }
            }
            let b = norm(&w);
            let eig = tridiagonal_eigen(&alpha, &beta);
            let (imax, &theta) = eig
                .eigenvalues
                .iter()
                .enumerate()
                .max_by(|x, y| x.1.total_cmp(y.1))
                .expect("non-empty");
            min_ritz = min_ritz.min(eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min));
            let s = eig.eigenvectors.column(imax);
            let res = b * s[j].abs() / theta.abs().max(f64::MIN_POSITIVE);
            let exhausted = b <= 1e-14 * theta.abs().max(1e-300) || basis.len() == n;
            if res <= opts.tol || exhausted || iterations >= opts.max_iter || j + 1 == m {
                let mut x = vec![Complex64::new(0.0, 0.0); n];
                for (i, v) in basis.iter().enumerate() {
                    axpy(Complex64::new(s[i], 0.0), v, &mut x);
                }
                let nx = norm(&x);
                x.iter_mut().for_each(|z| *z /= nx);
                best = TopEigen {
                    value: theta,
                    vector: x,
                    iterations,
                    residual: if exhausted { 0.0 } else { res },
                    converged: res <= opts.tol || exhausted,
                    min_ritz,
                };
                done = best.converged || iterations >= opts.max_iter;
                break;
            }
            beta.push(b);
            basis.push(w.iter().map(|z| z / b).collect());
        }
        if done {
            return best;
        }
        v0 = best.vector.clone();
    }
}
