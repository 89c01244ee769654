//! The polynomial families attached to a contact order `σ`.
//!
//! `P_σ(u, v)` is the leading term of the flow–curve gap; `℘_{σ,1}`,
//! `℘_{σ,2}` are its one-variable reductions along `v = u + 1` in the two
//! scalings, and `℘̃_{σ,i}(τ) = (1+τ)℘_{σ−1,i}(τ)` their `u`-derivatives.

use num::{BigInt, Integer, One, ToPrimitive, Zero};

use crate::poly::{factorial, qi, PolynomialExact, Q};

fn fact_q(n: u32) -> Q {
    Q::from_integer(factorial(n))
}

/// `Σ_{j=2}^{σ+1} (v−u)^j u^{σ+1−j} / (j!(σ+1−j)!)`.
pub fn p_sigma_sum(sigma: u32, u: &Q, v: &Q) -> Q {
    let d = v - u;
    (2..=sigma + 1)
        .map(|j| {
            num::pow(d.clone(), j as usize) * num::pow(u.clone(), (sigma + 1 - j) as usize)
                / (fact_q(j) * fact_q(sigma + 1 - j))
        })
        .fold(Q::zero(), |a, b| a + b)
}

/// `(v^{σ+1} − (σ+1)(v−u)u^σ − u^{σ+1}) / (σ+1)!`.
pub fn p_sigma_closed(sigma: u32, u: &Q, v: &Q) -> Q {
    let n = sigma + 1;
    (num::pow(v.clone(), n as usize)
        - qi(n as i64) * (v - u) * num::pow(u.clone(), sigma as usize)
        - num::pow(u.clone(), n as usize))
        / fact_q(n)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathMismatch {
    pub sigma: u32,
    pub sum: Q,
    pub closed: Q,
}

/// Both evaluation paths; an error means the defining identity failed.
#[allow(clippy::result_large_err)]
pub fn p_sigma(sigma: u32, u: &Q, v: &Q) -> Result<Q, PathMismatch> {
    let a = p_sigma_sum(sigma, u, v);
    let b = p_sigma_closed(sigma, u, v);
    if a == b {
        Ok(a)
    } else {
        Err(PathMismatch { sigma, sum: a, closed: b })
    }
}

/// Float closed form, for least-squares design matrices.
pub fn p_sigma_f64(sigma: u32, u: f64, v: f64) -> f64 {
    // sum form: no cancellation for small |u|, |v|
    let d = v - u;
    let mut s = 0.0;
    for j in 2..=sigma + 1 {
        let den = (factorial(j) * factorial(sigma + 1 - j)).to_f64().unwrap();
        s += d.powi(j as i32) * u.powi((sigma + 1 - j) as i32) / den;
    }
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    One,
    Two,
}

impl Branch {
    pub fn index(self) -> u8 {
        match self {
            Branch::One => 1,
            Branch::Two => 2,
        }
    }
}

/// `℘_{σ,1}(τ) = ((1+τ)^{σ+1} − τ^{σ+1} − (σ+1)τ^σ)/(σ+1)!`,
/// `℘_{σ,2}(τ) = (τ^{σ+1} + (σ+1)(1+τ)^σ − (1+τ)^{σ+1})/(σ+1)!`.
pub fn wp(sigma: u32, branch: Branch) -> PolynomialExact {
    assert!(sigma >= 1, "σ ≥ 1 required");
    let n = sigma + 1;
    let one = Q::one();
    let one_plus = |k| PolynomialExact::binomial_power(&one, &one, k);
    let tau = |k: u32| PolynomialExact::monomial(one.clone(), k as usize);
    let sp1 = qi(n as i64);
    let num = match branch {
        Branch::One => &(&one_plus(n) - &tau(n)) - &PolynomialExact::monomial(sp1, sigma as usize),
        Branch::Two => &(&tau(n) + &one_plus(sigma).scale(&sp1)) - &one_plus(n),
    };
    num.scale(&fact_q(n).recip())
}

/// `℘̃_{σ,i}(τ) = (1+τ)℘_{σ−1,i}(τ)`, `σ ≥ 2`.
pub fn wp_tilde(sigma: u32, branch: Branch) -> PolynomialExact {
    assert!(sigma >= 2, "σ ≥ 2 required");
    let lin = PolynomialExact::new(vec![Q::one(), Q::one()]);
    &lin * &wp(sigma - 1, branch)
}

/// Exact `P_σ(u, u + 1)`-type reduction used in tests: `P_σ(τ, τ+1) = ℘_{σ,1}(τ)`.
pub fn p_sigma_on_unit_gap(sigma: u32, tau: &Q) -> Q {
    p_sigma_closed(sigma, tau, &(tau + Q::one()))
}

/// Minimum of `℘_{σ,1}` sampled on `[lo, hi]` with `n` points.
pub fn sampled_min(p: &PolynomialExact, lo: f64, hi: f64, n: usize) -> f64 {
    (0..=n)
        .map(|k| p.eval_f64(lo + (hi - lo) * k as f64 / n as f64))
        .fold(f64::INFINITY, f64::min)
}

/// `(−1)^k`.
pub fn sign_pow(k: u32) -> Q {
    if k.is_multiple_of(2) {
        Q::one()
    } else {
        -Q::one()
    }
}

/// Dual numbers over the rationals: `a + bε`, `ε² = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dual {
    pub re: Q,
    pub eps: Q,
}

impl Dual {
    pub fn constant(re: Q) -> Self {
        Dual { re, eps: Q::zero() }
    }
    pub fn variable(re: Q) -> Self {
        Dual { re, eps: Q::one() }
    }
    pub fn recip(&self) -> Self {
        let r = self.re.recip();
        Dual { eps: -(&self.eps) * &r * &r, re: r }
    }
}

impl std::ops::Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual { re: self.re + o.re, eps: self.eps + o.eps }
    }
}

impl std::ops::Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        Dual { re: self.re - o.re, eps: self.eps - o.eps }
    }
}

impl std::ops::Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        Dual { eps: &self.re * &o.eps + &self.eps * &o.re, re: self.re * o.re }
    }
}

/// Horner over dual numbers with a common denominator: the argument is
/// `(t0 + t1·ε)/den` and the result `(A + B·ε)/D`. Integer coefficients keep
/// the loop free of gcd reductions.
fn horner_dual_int(coeffs: &[BigInt], t0: &BigInt, t1: &BigInt, den: &BigInt) -> (BigInt, BigInt, BigInt) {
    let mut a = BigInt::zero();
    let mut b = BigInt::zero();
    let mut d = BigInt::one();
    for c in coeffs.iter().rev() {
        let na = &a * t0;
        let nb = &a * t1 + &b * t0;
        d *= den;
        a = na + c * &d;
        b = nb;
    }
    (a, b, d)
}

fn integer_coeffs(p: &PolynomialExact) -> (Vec<BigInt>, BigInt) {
    let l = p.coeffs().iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    (p.coeffs().iter().map(|c| c.numer() * (&l / c.denom())).collect(), l)
}

fn dual_at(p: &PolynomialExact, tau: &Dual) -> Dual {
    let (ic, l) = integer_coeffs(p);
    let den = tau.re.denom().lcm(tau.eps.denom());
    let t0 = tau.re.numer() * (&den / tau.re.denom());
    let t1 = tau.eps.numer() * (&den / tau.eps.denom());
    let (a, b, d) = horner_dual_int(&ic, &t0, &t1, &den);
    let scale = &d * &l;
    Dual { re: Q::new(a, scale.clone()), eps: Q::new(b, scale) }
}

/// `∂_u ℘(u/(v−u))` exactly, by forward-mode differentiation in `u`.
pub fn chain_rule_lhs_poly(w: &PolynomialExact, u: &Q, v: &Q) -> Q {
    let du = Dual::variable(u.clone());
    let tau = du.clone() * (Dual::constant(v.clone()) - du).recip();
    dual_at(w, &tau).eps
}

/// `(v−u)^{−1} ℘̃(u/(v−u))`.
pub fn chain_rule_rhs_poly(w_tilde: &PolynomialExact, u: &Q, v: &Q) -> Q {
    let d = v - u;
    let tau = Dual::constant(u / &d);
    dual_at(w_tilde, &tau).re / d
}

pub fn chain_rule_lhs(sigma: u32, branch: Branch, u: &Q, v: &Q) -> Q {
    chain_rule_lhs_poly(&wp(sigma, branch), u, v)
}

pub fn chain_rule_rhs(sigma: u32, branch: Branch, u: &Q, v: &Q) -> Q {
    chain_rule_rhs_poly(&wp_tilde(sigma, branch), u, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::q;

    #[test]
    fn p_sigma_examples() {
        assert_eq!(p_sigma(1, &Q::zero(), &qi(5)).unwrap(), q(25, 2));
        assert_eq!(p_sigma(2, &qi(1), &qi(2)).unwrap(), q(2, 3));
        for s in 1..6 {
            assert_eq!(p_sigma(s, &q(3, 7), &q(3, 7)).unwrap(), Q::zero());
        }
        assert!((p_sigma_f64(2, 1.0, 2.0) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn wp_examples() {
        assert_eq!(wp(1, Branch::One), PolynomialExact::constant(q(1, 2)));
        assert_eq!(wp(2, Branch::One), PolynomialExact::new(vec![q(1, 6), q(1, 2)]));
        assert_eq!(wp(2, Branch::Two), PolynomialExact::new(vec![q(1, 3), q(1, 2)]));
        assert_eq!(wp(2, Branch::One).eval(&Q::zero()), q(1, 6));
        assert_eq!(wp(2, Branch::One).eval(&q(-1, 2)), q(-1, 12));
        assert_eq!(wp(3, Branch::One).eval(&q(-1, 3)), q(1, 72));
    }

    #[test]
    fn reduction_along_unit_gap() {
        for s in 1..8 {
            let t = q(-2, 5);
            assert_eq!(p_sigma_on_unit_gap(s, &t), wp(s, Branch::One).eval(&t));
        }
    }

    #[test]
    fn tilde_factor() {
        let t = wp_tilde(3, Branch::Two);
        assert_eq!(t.eval(&-Q::one()), Q::zero());
        assert_eq!(t.degree(), Some(2));
    }
}
