//! Scalar types for forward-mode differentiation.
//!
//! Three carriers share the [`Scalar`] trait so that symbols, curves and
//! vector fields can be written once and evaluated on plain floats, on
//! truncated univariate Taylor series (jets along a parameter), on first-order
//! duals in four variables, or on box-truncated multivariate jets.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Capacity of a [`Taylor`] series (number of coefficients).
pub const TAYLOR_CAP: usize = 20;

pub trait Scalar:
    Clone
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    /// A constant with the same shape (order, box) as `self`.
    fn cst(&self, c: f64) -> Self;
    /// The value part.
    fn value(&self) -> f64;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn recip(&self) -> Self {
        self.cst(1.0) / self.clone()
    }
    fn powi(&self, n: i32) -> Self {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut acc = self.cst(1.0);
        let mut base = self.clone();
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
    fn sqr(&self) -> Self {
        self.clone() * self.clone()
    }
}

impl Scalar for f64 {
    fn cst(&self, c: f64) -> Self {
        c
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn recip(&self) -> Self {
        1.0 / *self
    }
    fn powi(&self, n: i32) -> Self {
        f64::powi(*self, n)
    }
}

// ---------------------------------------------------------------------------
// Taylor

/// Truncated univariate power series `Σ c[k] ε^k`, `k < n`.
#[derive(Clone, Copy)]
pub struct Taylor {
    pub c: [f64; TAYLOR_CAP],
    pub n: usize,
}

impl Debug for Taylor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(&self.c[..self.n]).finish()
    }
}

impl Taylor {
    pub fn constant(v: f64, n: usize) -> Self {
        assert!((1..=TAYLOR_CAP).contains(&n), "taylor order out of range");
        let mut c = [0.0; TAYLOR_CAP];
        c[0] = v;
        Taylor { c, n }
    }

    /// The independent variable `v + ε`.
    pub fn variable(v: f64, n: usize) -> Self {
        let mut t = Self::constant(v, n);
        if n > 1 {
            t.c[1] = 1.0;
        }
        t
    }

    pub fn from_coeffs(coeffs: &[f64]) -> Self {
        let mut t = Self::constant(0.0, coeffs.len().max(1));
        t.c[..coeffs.len()].copy_from_slice(coeffs);
        t
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c[..self.n]
    }

    /// `k`-th derivative at the expansion point.
    pub fn deriv(&self, k: usize) -> f64 {
        if k >= self.n {
            return 0.0;
        }
        self.c[k] * factorial(k)
    }

    pub fn truncate(&self, n: usize) -> Self {
        let mut t = *self;
        for k in n..t.n {
            t.c[k] = 0.0;
        }
        t.n = n.min(self.n).max(1);
        t
    }

    pub fn with_order(&self, n: usize) -> Self {
        let mut t = Self::constant(0.0, n);
        let m = n.min(self.n);
        t.c[..m].copy_from_slice(&self.c[..m]);
        t
    }

    /// Term-wise derivative `d/dε`.
    pub fn derivative(&self) -> Self {
        let mut t = Self::constant(0.0, self.n);
        for k in 1..self.n {
            t.c[k - 1] = self.c[k] * k as f64;
        }
        t
    }

    /// Antiderivative with zero constant term (drops the top coefficient).
    pub fn integral(&self) -> Self {
        let mut t = Self::constant(0.0, self.n);
        for k in 1..self.n {
            t.c[k] = self.c[k - 1] / k as f64;
        }
        t
    }

    /// `f ∘ g` for a series `g` with `g(0)` ignored (treated as 0).
    pub fn compose(&self, g: &Taylor) -> Taylor {
        let n = self.n.max(g.n);
        let mut h = g.with_order(n);
        h.c[0] = 0.0;
        let mut acc = Taylor::constant(self.c[self.n - 1], n);
        for k in (0..self.n - 1).rev() {
            acc = acc * h;
            acc.c[0] += self.c[k];
        }
        acc
    }

    pub fn eval(&self, e: f64) -> f64 {
        self.c[..self.n].iter().rev().fold(0.0, |acc, &c| acc * e + c)
    }

    fn sin_cos(&self) -> (Taylor, Taylor) {
        let n = self.n;
        let mut s = Taylor::constant(self.c[0].sin(), n);
        let mut c = Taylor::constant(self.c[0].cos(), n);
        for k in 1..n {
            let mut ss = 0.0;
            let mut cc = 0.0;
            for j in 1..=k {
                let ja = j as f64 * self.c[j];
                ss += ja * c.c[k - j];
                cc += ja * s.c[k - j];
            }
            s.c[k] = ss / k as f64;
            c.c[k] = -cc / k as f64;
        }
        (s, c)
    }
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |a, i| a * i as f64)
}

impl Add for Taylor {
    type Output = Taylor;
    fn add(mut self, o: Taylor) -> Taylor {
        let n = self.n.max(o.n);
        for k in 0..n {
            self.c[k] += o.c[k];
        }
        self.n = n;
        self
    }
}

impl Sub for Taylor {
    type Output = Taylor;
    fn sub(mut self, o: Taylor) -> Taylor {
        let n = self.n.max(o.n);
        for k in 0..n {
            self.c[k] -= o.c[k];
        }
        self.n = n;
        self
    }
}

impl Mul for Taylor {
    type Output = Taylor;
    fn mul(self, o: Taylor) -> Taylor {
        let n = self.n.max(o.n);
        let mut r = Taylor::constant(0.0, n);
        for i in 0..self.n {
            let a = self.c[i];
            if a == 0.0 {
                continue;
            }
            for j in 0..(n - i).min(o.n) {
                r.c[i + j] += a * o.c[j];
            }
        }
        r
    }
}

impl Div for Taylor {
    type Output = Taylor;
    fn div(self, o: Taylor) -> Taylor {
        let n = self.n.max(o.n);
        let mut q = Taylor::constant(0.0, n);
        let b0 = o.c[0];
        for k in 0..n {
            let mut acc = self.c[k];
            for i in 1..=k.min(o.n - 1) {
                acc -= o.c[i] * q.c[k - i];
            }
            q.c[k] = acc / b0;
        }
        q
    }
}

impl Neg for Taylor {
    type Output = Taylor;
    fn neg(mut self) -> Taylor {
        for k in 0..self.n {
            self.c[k] = -self.c[k];
        }
        self
    }
}

impl Add<f64> for Taylor {
    type Output = Taylor;
    fn add(mut self, o: f64) -> Taylor {
        self.c[0] += o;
        self
    }
}

impl Sub<f64> for Taylor {
    type Output = Taylor;
    fn sub(mut self, o: f64) -> Taylor {
        self.c[0] -= o;
        self
    }
}

impl Mul<f64> for Taylor {
    type Output = Taylor;
    fn mul(mut self, o: f64) -> Taylor {
        for k in 0..self.n {
            self.c[k] *= o;
        }
        self
    }
}

impl Div<f64> for Taylor {
    type Output = Taylor;
    fn div(mut self, o: f64) -> Taylor {
        for k in 0..self.n {
            self.c[k] /= o;
        }
        self
    }
}

impl Scalar for Taylor {
    fn cst(&self, c: f64) -> Self {
        Taylor::constant(c, self.n)
    }
    fn value(&self) -> f64 {
        self.c[0]
    }
    fn sin(&self) -> Self {
        self.sin_cos().0
    }
    fn cos(&self) -> Self {
        self.sin_cos().1
    }
    fn sqrt(&self) -> Self {
        let n = self.n;
        let mut s = Taylor::constant(self.c[0].sqrt(), n);
        for k in 1..n {
            let mut acc = self.c[k];
            for i in 1..k {
                acc -= s.c[i] * s.c[k - i];
            }
            s.c[k] = acc / (2.0 * s.c[0]);
        }
        s
    }
    fn exp(&self) -> Self {
        let n = self.n;
        let mut e = Taylor::constant(self.c[0].exp(), n);
        for k in 1..n {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * self.c[j] * e.c[k - j];
            }
            e.c[k] = acc / k as f64;
        }
        e
    }
}

// ---------------------------------------------------------------------------
// Grad

/// First-order dual number carrying four partial derivatives.
///
/// Nesting (`Grad<Grad<f64>>`, `Grad<Taylor>`) yields Hessians and
/// gradient jets along a parameter.
#[derive(Clone, Debug)]
pub struct Grad<T> {
    pub v: T,
    pub d: [T; 4],
}

impl<T: Scalar> Grad<T> {
    pub fn constant(v: T) -> Self {
        let z = v.cst(0.0);
        Grad { d: [z.clone(), z.clone(), z.clone(), z], v }
    }

    pub fn variable(v: T, slot: usize) -> Self {
        let mut g = Self::constant(v);
        g.d[slot] = g.v.cst(1.0);
        g
    }

    fn chain(&self, v: T, dv: T) -> Self {
        Grad {
            v,
            d: [
                self.d[0].clone() * dv.clone(),
                self.d[1].clone() * dv.clone(),
                self.d[2].clone() * dv.clone(),
                self.d[3].clone() * dv,
            ],
        }
    }
}

impl<T: Scalar> Add for Grad<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let [a0, a1, a2, a3] = self.d;
        let [b0, b1, b2, b3] = o.d;
        Grad { v: self.v + o.v, d: [a0 + b0, a1 + b1, a2 + b2, a3 + b3] }
    }
}

impl<T: Scalar> Sub for Grad<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let [a0, a1, a2, a3] = self.d;
        let [b0, b1, b2, b3] = o.d;
        Grad { v: self.v - o.v, d: [a0 - b0, a1 - b1, a2 - b2, a3 - b3] }
    }
}

impl<T: Scalar> Mul for Grad<T> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, o: Self) -> Self {
        let d = std::array::from_fn(|i| {
            self.d[i].clone() * o.v.clone() + o.d[i].clone() * self.v.clone()
        });
        Grad { v: self.v * o.v, d }
    }
}

impl<T: Scalar> Div for Grad<T> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        let inv = o.v.recip();
        let q = self.v.clone() * inv.clone();
        let d = std::array::from_fn(|i| {
            (self.d[i].clone() - q.clone() * o.d[i].clone()) * inv.clone()
        });
        Grad { v: q, d }
    }
}

impl<T: Scalar> Neg for Grad<T> {
    type Output = Self;
    fn neg(self) -> Self {
        let [a0, a1, a2, a3] = self.d;
        Grad { v: -self.v, d: [-a0, -a1, -a2, -a3] }
    }
}

impl<T: Scalar> Add<f64> for Grad<T> {
    type Output = Self;
    fn add(mut self, o: f64) -> Self {
        self.v = self.v + o;
        self
    }
}

impl<T: Scalar> Sub<f64> for Grad<T> {
    type Output = Self;
    fn sub(mut self, o: f64) -> Self {
        self.v = self.v - o;
        self
    }
}

impl<T: Scalar> Mul<f64> for Grad<T> {
    type Output = Self;
    fn mul(self, o: f64) -> Self {
        let [a0, a1, a2, a3] = self.d;
        Grad { v: self.v * o, d: [a0 * o, a1 * o, a2 * o, a3 * o] }
    }
}

impl<T: Scalar> Div<f64> for Grad<T> {
    type Output = Self;
    fn div(self, o: f64) -> Self {
        self * (1.0 / o)
    }
}

impl<T: Scalar> Scalar for Grad<T> {
    fn cst(&self, c: f64) -> Self {
        Grad::constant(self.v.cst(c))
    }
    fn value(&self) -> f64 {
        self.v.value()
    }
    fn sin(&self) -> Self {
        self.chain(self.v.sin(), self.v.cos())
    }
    fn cos(&self) -> Self {
        self.chain(self.v.cos(), -self.v.sin())
    }
    fn sqrt(&self) -> Self {
        let s = self.v.sqrt();
        let ds = (s.clone() * 2.0).recip();
        self.chain(s, ds)
    }
    fn exp(&self) -> Self {
        let e = self.v.exp();
        self.chain(e.clone(), e)
    }
    fn recip(&self) -> Self {
        let r = self.v.recip();
        let dr = -(r.clone() * r.clone());
        self.chain(r, dr)
    }
    fn powi(&self, n: i32) -> Self {
        if n == 0 {
            return self.cst(1.0);
        }
        let p = self.v.powi(n - 1);
        self.chain(p.clone() * self.v.clone(), p * n as f64)
    }
}

// ---------------------------------------------------------------------------
// BoxJet

/// Multivariate Taylor polynomial in four variables truncated to the box
/// `0 ≤ a_i ≤ deg[i]`. Exact for mixed partials up to the box corner.
#[derive(Clone, Debug)]
pub struct BoxJet {
    pub deg: [usize; 4],
    pub c: Vec<f64>,
}

impl BoxJet {
    fn size(deg: &[usize; 4]) -> usize {
        deg.iter().map(|d| d + 1).product()
    }

    fn index(deg: &[usize; 4], a: &[usize; 4]) -> usize {
        ((a[0] * (deg[1] + 1) + a[1]) * (deg[2] + 1) + a[2]) * (deg[3] + 1) + a[3]
    }

    fn unindex(deg: &[usize; 4], mut i: usize) -> [usize; 4] {
        let mut a = [0; 4];
        for k in (0..4).rev() {
            a[k] = i % (deg[k] + 1);
            i /= deg[k] + 1;
        }
        a
    }

    pub fn constant(v: f64, deg: [usize; 4]) -> Self {
        let mut c = vec![0.0; Self::size(&deg)];
        c[0] = v;
        BoxJet { deg, c }
    }

    pub fn variable(v: f64, slot: usize, deg: [usize; 4]) -> Self {
        let mut j = Self::constant(v, deg);
        if deg[slot] > 0 {
            let mut a = [0; 4];
            a[slot] = 1;
            j.c[Self::index(&deg, &a)] = 1.0;
        }
        j
    }

    /// Coefficient of `Π h_i^{a_i}`.
    pub fn coeff(&self, a: &[usize; 4]) -> f64 {
        if (0..4).any(|k| a[k] > self.deg[k]) {
            return 0.0;
        }
        self.c[Self::index(&self.deg, a)]
    }

    /// Mixed partial derivative `∂^a` at the expansion point.
    pub fn partial(&self, a: &[usize; 4]) -> f64 {
        let f: f64 = a.iter().map(|&k| factorial(k)).product();
        self.coeff(a) * f
    }

    fn total_degree(&self) -> usize {
        self.deg.iter().sum()
    }

    /// `Σ f[k] h^k` where `h = self − self(0)`.
    fn compose_series(&self, f: &[f64]) -> Self {
        let mut h = self.clone();
        h.c[0] = 0.0;
        let mut acc = BoxJet::constant(*f.last().unwrap(), self.deg);
        for k in (0..f.len() - 1).rev() {
            acc = acc * h.clone();
            acc.c[0] += f[k];
        }
        acc
    }
}

impl Add for BoxJet {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        for (a, b) in self.c.iter_mut().zip(&o.c) {
            *a += b;
        }
        self
    }
}

impl Sub for BoxJet {
    type Output = Self;
    fn sub(mut self, o: Self) -> Self {
        for (a, b) in self.c.iter_mut().zip(&o.c) {
            *a -= b;
        }
        self
    }
}

impl Mul for BoxJet {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let deg = self.deg;
        let mut r = BoxJet::constant(0.0, deg);
        for i in 0..self.c.len() {
            let a = self.c[i];
            if a == 0.0 {
                continue;
            }
            let ai = Self::unindex(&deg, i);
            for j in 0..o.c.len() {
                let b = o.c[j];
                if b == 0.0 {
                    continue;
                }
                let bj = Self::unindex(&deg, j);
                let s = [ai[0] + bj[0], ai[1] + bj[1], ai[2] + bj[2], ai[3] + bj[3]];
                if (0..4).all(|k| s[k] <= deg[k]) {
                    r.c[Self::index(&deg, &s)] += a * b;
                }
            }
        }
        r
    }
}

impl Div for BoxJet {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

impl Neg for BoxJet {
    type Output = Self;
    fn neg(mut self) -> Self {
        for a in self.c.iter_mut() {
            *a = -*a;
        }
        self
    }
}

impl Add<f64> for BoxJet {
    type Output = Self;
    fn add(mut self, o: f64) -> Self {
        self.c[0] += o;
        self
    }
}

impl Sub<f64> for BoxJet {
    type Output = Self;
    fn sub(mut self, o: f64) -> Self {
        self.c[0] -= o;
        self
    }
}

impl Mul<f64> for BoxJet {
    type Output = Self;
    fn mul(mut self, o: f64) -> Self {
        for a in self.c.iter_mut() {
            *a *= o;
        }
        self
    }
}

impl Div<f64> for BoxJet {
    type Output = Self;
    fn div(self, o: f64) -> Self {
        self * (1.0 / o)
    }
}

impl Scalar for BoxJet {
    fn cst(&self, c: f64) -> Self {
        BoxJet::constant(c, self.deg)
    }
    fn value(&self) -> f64 {
        self.c[0]
    }
    fn sin(&self) -> Self {
        let (s, c) = (self.c[0].sin(), self.c[0].cos());
        let cyc = [s, c, -s, -c];
        let f: Vec<f64> =
            (0..=self.total_degree()).map(|k| cyc[k % 4] / factorial(k)).collect();
        self.compose_series(&f)
    }
    fn cos(&self) -> Self {
        let (s, c) = (self.c[0].sin(), self.c[0].cos());
        let cyc = [c, -s, -c, s];
        let f: Vec<f64> =
            (0..=self.total_degree()).map(|k| cyc[k % 4] / factorial(k)).collect();
        self.compose_series(&f)
    }
    fn sqrt(&self) -> Self {
        let a0 = self.c[0];
        let mut f = vec![a0.sqrt()];
        let mut binom = 1.0;
        for k in 1..=self.total_degree() {
            binom *= (0.5 - (k - 1) as f64) / k as f64;
            f.push(a0.sqrt() * binom / a0.powi(k as i32));
        }
        self.compose_series(&f)
    }
    fn exp(&self) -> Self {
        let e = self.c[0].exp();
        let f: Vec<f64> = (0..=self.total_degree()).map(|k| e / factorial(k)).collect();
        self.compose_series(&f)
    }
    fn recip(&self) -> Self {
        let a0 = self.c[0];
        let f: Vec<f64> = (0..=self.total_degree())
            .map(|k| if k % 2 == 0 { 1.0 } else { -1.0 } / a0.powi(k as i32 + 1))
            .collect();
        self.compose_series(&f)
    }
}
