//! Closed-form restriction exponents, held as exact rationals.
//!
//! Every exponent is the power of `λ` (equivalently of `h⁻¹`) in a bound for
//! the `L² → L^q(γ)` norm of the spectral projector on a curve `γ` in a
//! surface. `ρ(q, σ)` depends on the contact order `σ` of `γ` with the flow.

use std::fmt;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Lebesgue exponent `q ∈ [1, ∞]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LebesgueExponent {
    Finite(Rational),
    Infinity,
}

impl LebesgueExponent {
    pub fn finite(n: i64, d: i64) -> Self {
        LebesgueExponent::Finite(rat(n, d))
    }

    pub fn integer(n: i64) -> Self {
        Self::finite(n, 1)
    }

    /// `1/q`, zero at infinity.
    pub fn recip(&self) -> Rational {
        match self {
            LebesgueExponent::Finite(q) => q.recip(),
            LebesgueExponent::Infinity => Rational::zero(),
        }
    }

    pub fn in_sharp_range(&self) -> bool {
        matches!(self, LebesgueExponent::Finite(q) if *q >= rat(2, 1) && *q <= rat(4, 1))
    }

    /// Parses `2`, `7/2`, `3.5`, `inf`.
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        if matches!(s, "inf" | "infinity" | "∞") {
            return Some(LebesgueExponent::Infinity);
        }
        let q = parse_rational(s)?;
        (q >= Rational::one()).then_some(LebesgueExponent::Finite(q))
    }
}

impl fmt::Display for LebesgueExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LebesgueExponent::Finite(q) => write!(f, "{q}"),
            LebesgueExponent::Infinity => write!(f, "inf"),
        }
    }
}

/// Contact order. Non-positive values stand for transversal curves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ContactOrder {
    Finite(i64),
    Infinity,
}

impl ContactOrder {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Some(ContactOrder::Infinity),
            t => t.parse().ok().map(ContactOrder::Finite),
        }
    }
}

impl fmt::Display for ContactOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContactOrder::Finite(s) => write!(f, "{s}"),
            ContactOrder::Infinity => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RhoFlag {
    /// `q` outside `[2, 4]`: the formula is evaluated but is not known to be sharp.
    OutsideSharpRange,
    /// `σ ≤ 0`: the transversal baseline is returned instead.
    Transversal,
    /// `σ = ∞`: the matching lower bound is only known up to `λ^ε`.
    EpsilonCaveat,
}

impl RhoFlag {
    pub fn as_str(&self) -> &'static str {
        match self {
            RhoFlag::OutsideSharpRange => "outside-range",
            RhoFlag::Transversal => "transversal",
            RhoFlag::EpsilonCaveat => "epsilon-caveat",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rho {
    pub value: Rational,
    pub flags: Vec<RhoFlag>,
}

/// `ρ(q, σ) = (1 + σ − 2/q) / (2(2σ + 1))`, and `1/4` at `σ = ∞`.
pub fn rho(q: &LebesgueExponent, sigma: ContactOrder) -> Rho {
    let mut flags = Vec::new();
    if !q.in_sharp_range() {
        flags.push(RhoFlag::OutsideSharpRange);
    }
    let value = match sigma {
        ContactOrder::Infinity => {
            flags.push(RhoFlag::EpsilonCaveat);
            rat(1, 4)
        }
        ContactOrder::Finite(s) if s <= 0 => {
            flags.push(RhoFlag::Transversal);
            tacy_transverse(q)
        }
        ContactOrder::Finite(s) => {
            let s = Rational::from_integer(s.into());
            let one = Rational::one();
            (&one + &s - q.recip() * rat(2, 1)) / ((s * rat(2, 1) + one) * rat(2, 1))
        }
    };
    Rho { value, flags }
}

/// Exact `1/4 − ρ(q, σ) = (4/q − 1) / (4(2σ + 1))` for finite `σ ≥ 1`;
/// tends to zero like `1/σ`.
pub fn rho_gap_to_quarter(q: &LebesgueExponent, sigma: i64) -> Rational {
    let s = Rational::from_integer(sigma.into());
    (q.recip() * rat(4, 1) - Rational::one()) / ((s * rat(2, 1) + Rational::one()) * rat(4, 1))
}

/// Laplacian-eigenfunction bound on a general curve in dimension `d`,
/// branch below the critical exponent: `(d−1)/4 − (d−2)/(2q)`.
pub fn bgt_low(q: &LebesgueExponent, d: u32) -> Rational {
    let d = Rational::from_integer(d.into());
    (&d - Rational::one()) / rat(4, 1) - (d - rat(2, 1)) * q.recip() / rat(2, 1)
}

/// Branch above the critical exponent: `(d−1)/2 − (d−1)/q`.
pub fn bgt_high(q: &LebesgueExponent, d: u32) -> Rational {
    let d1 = Rational::from_integer(d.into()) - Rational::one();
    &d1 / rat(2, 1) - d1 * q.recip()
}

/// Critical exponent `2d/(d−1)` separating the two branches.
pub fn bgt_branch_point(d: u32) -> Rational {
    rat(2 * d as i64, d as i64 - 1)
}

/// Curves with nonvanishing geodesic curvature: `1/3 − 1/(3q)`.
pub fn bgt_curved(q: &LebesgueExponent) -> Rational {
    rat(1, 3) - q.recip() / rat(3, 1)
}

/// Flow-invariant curves for quasimodes: `1/4` for `q ≤ 4`, `1/2 − 1/q` above.
pub fn tacy_flat(q: &LebesgueExponent) -> Rational {
    let high = rat(1, 2) - q.recip();
    if high > rat(1, 4) {
        high
    } else {
        rat(1, 4)
    }
}

/// Transversal curves for quasimodes: `h^{1/q − 1/2}`, i.e. `1/2 − 1/q`.
pub fn tacy_transverse(q: &LebesgueExponent) -> Rational {
    rat(1, 2) - q.recip()
}

/// Harmonic oscillator clusters: `−1 + 1/q + 2ρ(q, σ)`.
pub fn hermite_exponent(q: &LebesgueExponent, sigma: ContactOrder) -> Rho {
    let r = rho(q, sigma);
    Rho { value: q.recip() - Rational::one() + r.value * rat(2, 1), flags: r.flags }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Baselines {
    pub bgt_low: Rational,
    pub bgt_high: Rational,
    pub bgt_curved: Rational,
    pub tacy_flat: Rational,
    pub tacy_transverse: Rational,
}

impl Baselines {
    pub fn named(&self) -> [(&'static str, &Rational); 5] {
        [
            ("bgt_low", &self.bgt_low),
            ("bgt_high", &self.bgt_high),
            ("bgt_curved", &self.bgt_curved),
            ("tacy_flat", &self.tacy_flat),
            ("tacy_transverse", &self.tacy_transverse),
        ]
    }
}

pub fn baselines(q: &LebesgueExponent, d: u32) -> Baselines {
    Baselines {
        bgt_low: bgt_low(q, d),
        bgt_high: bgt_high(q, d),
        bgt_curved: bgt_curved(q),
        tacy_flat: tacy_flat(q),
        tacy_transverse: tacy_transverse(q),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExponentPrediction {
    pub q: LebesgueExponent,
    pub sigma: ContactOrder,
    pub rho: Rho,
    pub baselines: Baselines,
    pub hermite: Rational,
}

pub fn predict(q: &LebesgueExponent, sigma: ContactOrder) -> ExponentPrediction {
    ExponentPrediction {
        q: q.clone(),
        sigma,
        rho: rho(q, sigma),
        baselines: baselines(q, 2),
        hermite: hermite_exponent(q, sigma).value,
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `a/b` for non-integers, `a` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Accepts `n`, `n/d` and finite decimals such as `3.5` or `-0.25`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        return (!d.is_zero()).then(|| Rational::new(n, d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        if fp.is_empty() || !fp.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let neg = ip.starts_with('-');
        let ip: BigInt = match ip.trim_start_matches(['-', '+']) {
            "" => BigInt::zero(),
            t => t.parse().ok()?,
        };
        let scale = num::pow(BigInt::from(10), fp.len());
        let frac: BigInt = fp.parse().ok()?;
        let v = Rational::new(ip * &scale + frac, scale);
        return Some(if neg { -v } else { v });
    }
    s.parse::<BigInt>().ok().map(Rational::from_integer)
}

pub fn is_strictly_increasing(values: &[Rational]) -> bool {
    values.windows(2).all(|w| w[0] < w[1])
}

pub fn abs_diff(a: &Rational, b: &Rational) -> Rational {
    (a - b).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> LebesgueExponent {
        LebesgueExponent::integer(n)
    }

    #[test]
    fn rho_examples() {
        assert_eq!(rho(&q(2), ContactOrder::Finite(1)).value, rat(1, 6));
        assert_eq!(rho(&q(2), ContactOrder::Finite(2)).value, rat(1, 5));
        assert_eq!(rho(&q(2), ContactOrder::Finite(3)).value, rat(3, 14));
        for s in [1, 2, 3, 10] {
            assert_eq!(rho(&q(4), ContactOrder::Finite(s)).value, rat(1, 4));
        }
        let inf = rho(&q(2), ContactOrder::Infinity);
        assert_eq!(inf.value, rat(1, 4));
        assert_eq!(inf.flags, vec![RhoFlag::EpsilonCaveat]);
    }

    #[test]
    fn transversal_routing() {
        let r = rho(&q(2), ContactOrder::Finite(0));
        assert_eq!(r.value, Rational::zero());
        assert!(r.flags.contains(&RhoFlag::Transversal));
    }

    #[test]
    fn outside_range_flagged() {
        let r = rho(&q(6), ContactOrder::Finite(1));
        assert!(r.flags.contains(&RhoFlag::OutsideSharpRange));
        assert_eq!(r.value, rat(1, 3) - rat(1, 18));
    }

    #[test]
    fn baseline_examples() {
        let b = baselines(&q(2), 2);
        assert_eq!(b.bgt_low, rat(1, 4));
        assert_eq!(b.bgt_curved, rat(1, 6));
        assert_eq!(b.tacy_transverse, Rational::zero());
        let b4 = baselines(&q(4), 2);
        assert_eq!(b4.bgt_low, b4.bgt_high);
        assert_eq!(bgt_branch_point(2), rat(4, 1));
        assert_eq!(bgt_high(&LebesgueExponent::Infinity, 2), rat(1, 2));
        assert_eq!(tacy_flat(&q(3)), rat(1, 4));
        assert_eq!(tacy_flat(&q(8)), rat(3, 8));
    }

    #[test]
    fn hermite_examples() {
        assert_eq!(hermite_exponent(&q(2), ContactOrder::Finite(1)).value, rat(-1, 6));
        assert_eq!(hermite_exponent(&q(2), ContactOrder::Infinity).value, Rational::zero());
        assert_eq!(hermite_exponent(&q(4), ContactOrder::Finite(1)).value, rat(-1, 4));
    }

    #[test]
    fn parsing() {
        assert_eq!(parse_rational("7/2"), Some(rat(7, 2)));
        assert_eq!(parse_rational("3.5"), Some(rat(7, 2)));
        assert_eq!(parse_rational("-0.25"), Some(rat(-1, 4)));
        assert_eq!(parse_rational("4"), Some(rat(4, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(LebesgueExponent::parse("inf"), Some(LebesgueExponent::Infinity));
        assert_eq!(ContactOrder::parse("inf"), Some(ContactOrder::Infinity));
        assert_eq!(format_rational(&rat(-2, 6)), "-1/3");
        assert_eq!(format_rational(&rat(4, 2)), "2");
    }
}
