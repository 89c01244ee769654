use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Dense univariate polynomial with rational coefficients, ascending degree.
/// The zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolynomialExact {
    coeffs: Vec<Q>,
}

impl PolynomialExact {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        PolynomialExact { coeffs }
    }

    pub fn zero() -> Self {
        PolynomialExact { coeffs: Vec::new() }
    }

    pub fn constant(c: Q) -> Self {
        Self::new(vec![c])
    }

    /// `c·τ^k`.
    pub fn monomial(c: Q, k: usize) -> Self {
        let mut v = vec![Q::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    /// `(a + bτ)^n`, expanded.
    pub fn binomial_power(a: &Q, b: &Q, n: u32) -> Self {
        Self::new(
            (0..=n)
                .map(|k| Q::from_integer(binomial(n, k)) * num::pow(a.clone(), (n - k) as usize) * num::pow(b.clone(), k as usize))
                .collect(),
        )
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Q {
        self.coeffs.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn eval(&self, t: &Q) -> Q {
        self.coeffs.iter().rev().fold(Q::zero(), |acc, c| acc * t + c)
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c.to_f64().unwrap_or(f64::NAN))
    }

    /// Horner evaluation over any ring that embeds the rationals.
    pub fn eval_with<T>(&self, t: &T, embed: impl Fn(&Q) -> T) -> T
    where
        T: Clone + Add<Output = T> + Mul<Output = T>,
    {
        let mut acc = embed(&Q::zero());
        for c in self.coeffs.iter().rev() {
            acc = acc * t.clone() + embed(c);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c * qi(k as i64)).collect())
    }

    pub fn scale(&self, s: &Q) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// `p(a + bτ)`.
    pub fn compose_affine(&self, a: &Q, b: &Q) -> Self {
        let lin = PolynomialExact::new(vec![a.clone(), b.clone()]);
        self.coeffs.iter().rev().fold(Self::zero(), |acc, c| &(&acc * &lin) + &Self::constant(c.clone()))
    }

    /// Euclidean division `self = quot·d + rem`.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let dd = d.degree().unwrap();
        let lead = d.leading();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![Q::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &lead;
            if !c.is_zero() {
                for (j, dj) in d.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * dj;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            let l = a.leading();
            a.scale(&l.recip())
        }
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            self.clone()
        } else {
            self.scale(&self.leading().recip())
        }
    }

    /// Square-free part `p / gcd(p, p')`.
    pub fn square_free(&self) -> Self {
        let g = self.gcd(&self.derivative());
        if g.degree().unwrap_or(0) == 0 {
            self.monic()
        } else {
            self.div_rem(&g).0.monic()
        }
    }

    /// Bound `1 + max|a_k / a_n|` on the modulus of every root.
    pub fn cauchy_bound(&self) -> Q {
        let lead = self.leading().abs();
        let m = self.coeffs[..self.coeffs.len().saturating_sub(1)]
            .iter()
            .map(|c| c.abs() / &lead)
            .fold(Q::zero(), |a, b| if b > a { b } else { a });
        Q::one() + m
    }
}

impl Add for &PolynomialExact {
    type Output = PolynomialExact;
    fn add(self, o: &PolynomialExact) -> PolynomialExact {
        let n = self.coeffs.len().max(o.coeffs.len());
        PolynomialExact::new(
            (0..n)
                .map(|k| {
                    let a = self.coeffs.get(k).cloned().unwrap_or_else(Q::zero);
                    let b = o.coeffs.get(k).cloned().unwrap_or_else(Q::zero);
                    a + b
                })
                .collect(),
        )
    }
}

impl Neg for &PolynomialExact {
    type Output = PolynomialExact;
    fn neg(self) -> PolynomialExact {
        PolynomialExact::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Sub for &PolynomialExact {
    type Output = PolynomialExact;
    fn sub(self, o: &PolynomialExact) -> PolynomialExact {
        self + &(-o)
    }
}

impl Mul for &PolynomialExact {
    type Output = PolynomialExact;
    fn mul(self, o: &PolynomialExact) -> PolynomialExact {
        if self.is_zero() || o.is_zero() {
            return PolynomialExact::zero();
        }
        let mut v = vec![Q::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        PolynomialExact::new(v)
    }
}

/// One real root: an isolating interval `[lo, hi]` with exact endpoints
/// (degenerate when the root is rational and was hit exactly) and a float.
#[derive(Clone, Debug, PartialEq)]
pub struct RealRoot {
    pub lo: Q,
    pub hi: Q,
    pub value: f64,
}

impl RealRoot {
    pub fn width(&self) -> Q {
        &self.hi - &self.lo
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }
}

/// Primitive integer polynomial, ascending degree; used for sign work where
/// rational normalisation would dominate the cost.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPoly(pub Vec<BigInt>);

impl IntPoly {
    /// Positive multiple of `p` with coprime integer coefficients.
    pub fn from_rational(p: &PolynomialExact) -> Self {
        let l = p.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let v: Vec<BigInt> = p.coeffs.iter().map(|c| c.numer() * (&l / c.denom())).collect();
        IntPoly(v).primitive()
    }

    fn primitive(mut self) -> Self {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
        let g = self.0.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if !g.is_zero() && !g.is_one() {
            for c in self.0.iter_mut() {
                *c /= &g;
            }
        }
        self
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn derivative(&self) -> Self {
        IntPoly(self.0.iter().enumerate().skip(1).map(|(k, c)| c * BigInt::from(k)).collect()).primitive()
    }

    /// Sign of `p(t)`, from the homogenised value `Σ c_k a^k b^{n−k}` with
    /// `t = a/b`, `b > 0`.
    pub fn sign_at(&self, t: &Q) -> i8 {
        if self.0.is_empty() {
            return 0;
        }
        let (a, b) = (t.numer(), t.denom());
        let n = self.0.len() - 1;
        let mut val = BigInt::zero();
        let mut apow = BigInt::one();
        let mut bpows = Vec::with_capacity(n + 1);
        let mut bp = BigInt::one();
        for _ in 0..=n {
            bpows.push(bp.clone());
            bp *= b;
        }
        for (k, c) in self.0.iter().enumerate() {
            if !c.is_zero() {
                val += c * &apow * &bpows[n - k];
            }
            apow *= a;
        }
        match val.sign() {
            num::bigint::Sign::Plus => 1,
            num::bigint::Sign::Minus => -1,
            num::bigint::Sign::NoSign => 0,
        }
    }

    /// `c·a mod b` with `c = |lc(b)|^{δ+1} > 0` (positive pseudo-remainder).
    fn pseudo_rem(&self, d: &Self) -> Self {
        let dd = d.0.len() - 1;
        let lead = d.0[dd].clone();
        let lead_abs = lead.abs();
        let mut r = self.0.clone();
        if r.len() <= dd {
            return self.clone();
        }
        for k in (0..r.len() - dd).rev() {
            let top = r[k + dd].clone();
            // r ← |lc|·r − sign(lc)·top·x^k·d, which kills the top coefficient
            for c in r.iter_mut() {
                *c *= &lead_abs;
            }
            if !top.is_zero() {
                let f = if lead.is_negative() { -top } else { top };
                for (j, dj) in d.0.iter().enumerate() {
                    r[k + j] -= &f * dj;
                }
            }
        }
        r.truncate(dd);
        IntPoly(r).primitive()
    }
}

/// Sturm chain `p₀ = p, p₁ = p', p_{k+1} ∝ −rem(p_{k−1}, p_k)`, each member
/// scaled by a positive constant to a primitive integer polynomial.
pub fn sturm_sequence(p: &PolynomialExact) -> Vec<IntPoly> {
    let p0 = IntPoly::from_rational(p);
    let p1 = p0.derivative();
    let mut seq = vec![p0, p1];
    loop {
        let n = seq.len();
        if seq[n - 1].is_zero() {
            seq.pop();
            break;
        }
        let r = seq[n - 2].pseudo_rem(&seq[n - 1]);
        if r.is_zero() {
            break;
        }
        seq.push(IntPoly(r.0.into_iter().map(|c| -c).collect()));
    }
    seq
}

fn sign_changes(seq: &[IntPoly], t: &Q) -> usize {
    let mut changes = 0;
    let mut prev = 0i8;
    for p in seq {
        let s = p.sign_at(t);
        if s != 0 {
            if prev != 0 && s != prev {
                changes += 1;
            }
            prev = s;
        }
    }
    changes
}

/// Number of distinct real roots in `(a, b]`.
pub fn count_roots(seq: &[IntPoly], a: &Q, b: &Q) -> usize {
    sign_changes(seq, a) - sign_changes(seq, b)
}

/// All distinct real roots, isolated by Sturm sequences and refined by exact
/// bisection until the interval is narrower than `width`.
pub fn real_roots(p: &PolynomialExact, width: &Q) -> Vec<RealRoot> {
    if p.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let sf = p.square_free();
    let seq = sturm_sequence(&sf);
    let b = sf.cauchy_bound();
    let mut out = Vec::new();
    let mut stack = vec![(-b.clone(), b)];
    while let Some((lo, hi)) = stack.pop() {
        match count_roots(&seq, &lo, &hi) {
            0 => {}
            1 => out.push(refine(&seq[0], lo, hi, width)),
            _ => {
                let mid = (&lo + &hi) / qi(2);
                stack.push((mid.clone(), hi));
                stack.push((lo, mid));
            }
        }
    }
    out.sort_by(|a, b| a.lo.cmp(&b.lo));
    out
}

/// Bisection on `(lo, hi]` containing exactly one simple root of `f`.
fn refine(f: &IntPoly, mut lo: Q, mut hi: Q, width: &Q) -> RealRoot {
    let s_hi = f.sign_at(&hi);
    if s_hi == 0 {
        let v = hi.to_f64().unwrap();
        return RealRoot { lo: hi.clone(), hi, value: v };
    }
    let s_lo = -s_hi;
    while &hi - &lo > *width {
        let mid = (&lo + &hi) / qi(2);
        let s = f.sign_at(&mid);
        if s == 0 {
            let v = mid.to_f64().unwrap();
            return RealRoot { lo: mid.clone(), hi: mid, value: v };
        }
        if s == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let value = ((&lo + &hi) / qi(2)).to_f64().unwrap();
    RealRoot { lo, hi, value }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> PolynomialExact {
        PolynomialExact::new(c.iter().map(|&v| qi(v)).collect())
    }

    #[test]
    fn arithmetic() {
        let a = p(&[1, 1]);
        let b = p(&[-1, 1]);
        assert_eq!(&a * &b, p(&[-1, 0, 1]));
        assert_eq!((&a * &b).derivative(), p(&[0, 2]));
        let (qq, r) = p(&[-1, 0, 1]).div_rem(&a);
        assert_eq!(qq, b);
        assert!(r.is_zero());
        assert_eq!(PolynomialExact::binomial_power(&qi(1), &qi(1), 3), p(&[1, 3, 3, 1]));
        assert_eq!(p(&[0, 0, 1]).compose_affine(&qi(1), &qi(2)), p(&[1, 4, 4]));
    }

    #[test]
    fn sturm_counts() {
        // (τ−1)(τ−2)(τ+3) with a double root at 2 squared away
        let f = &(&p(&[-1, 1]) * &p(&[-2, 1])) * &(&p(&[3, 1]) * &p(&[-2, 1]));
        let roots = real_roots(&f, &q(1, 1 << 30));
        assert_eq!(roots.len(), 3);
        let vals: Vec<f64> = roots.iter().map(|r| r.value).collect();
        for (v, e) in vals.iter().zip([-3.0, 1.0, 2.0]) {
            assert!((v - e).abs() < 1e-8);
        }
    }

    #[test]
    fn irrational_roots() {
        let f = p(&[-2, 0, 1]);
        let roots = real_roots(&f, &q(1, 1 << 40));
        assert_eq!(roots.len(), 2);
        assert!((roots[1].value - 2f64.sqrt()).abs() < 1e-11);
        assert!(real_roots(&p(&[1, 0, 1]), &q(1, 1024)).is_empty());
    }
}
