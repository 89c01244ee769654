use num::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::families::{chain_rule_lhs_poly, chain_rule_rhs_poly, p_sigma, sampled_min, sign_pow, wp, wp_tilde, Branch};
use crate::poly::{factorial, q, qi, real_roots, PolynomialExact, RealRoot, Q};

/// Isolating-interval width for reported roots (`2⁻⁴⁰ < 10⁻¹²`).
pub fn root_width() -> Q {
    Q::new(1.into(), num::pow(num::BigInt::from(2), 40))
}

/// Width used when verifying critical values (`2⁻⁶⁰`).
fn critical_width() -> Q {
    Q::new(1.into(), num::pow(num::BigInt::from(2), 60))
}

pub const CRITICAL_RTOL: f64 = 1e-10;
pub const MAX_SIGMA: u32 = 40;

#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub sigma: u32,
    pub branch: Option<u8>,
    pub identity: &'static str,
    pub coeff_index: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RootSummary {
    pub lo: String,
    pub hi: String,
    pub value: f64,
}

impl From<&RealRoot> for RootSummary {
    fn from(r: &RealRoot) -> Self {
        RootSummary { lo: r.lo.to_string(), hi: r.hi.to_string(), value: r.value }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriticalReport {
    pub sigma: u32,
    pub points: Vec<f64>,
    pub max_rel_err: f64,
    /// `℘_{σ,1} − σ τ^{σ−1}/(σ+1)!` vanishes modulo `℘'_{σ,1}`, i.e. at
    /// every complex critical point.
    pub remainder_zero: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SigmaReport {
    pub sigma: u32,
    pub degrees: [usize; 2],
    pub roots: [Vec<RootSummary>; 2],
    pub root_count_ok: bool,
    pub ordering_ok: Option<bool>,
    pub critical: Option<CriticalReport>,
    pub positivity_min: Option<f64>,
    pub tilde_roots_ok: Option<bool>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PolyLabReport {
    pub sigma_max: u32,
    pub sigmas: Vec<SigmaReport>,
    pub sigma2_roots_exact: bool,
    pub p_sigma_paths_ok: bool,
    pub failures: Vec<Failure>,
    pub pass: bool,
}

fn first_mismatch(a: &PolynomialExact, b: &PolynomialExact) -> Option<usize> {
    let n = a.coeffs().len().max(b.coeffs().len());
    (0..n).find(|&k| {
        let x = a.coeffs().get(k).cloned().unwrap_or_else(Q::zero);
        let y = b.coeffs().get(k).cloned().unwrap_or_else(Q::zero);
        x != y
    })
}

fn random_rational(rng: &mut ChaCha8Rng) -> Q {
    q(rng.random_range(-12..=12), rng.random_range(1..=12))
}

/// Reflection, derivative and `℘̃` identities for `σ = 2..=sigma_max`, plus the
/// chain rule at 20 random rational points per `(σ, i)`.
pub fn check_wp_identities(sigma_max: u32, seed: u64) -> Vec<Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let pts: Vec<(Q, Q)> = (0..20)
        .map(|_| loop {
            let (u, v) = (random_rational(&mut rng), random_rational(&mut rng));
            if u != v {
                break (u, v);
            }
        })
        .collect();
    for sigma in 2..=sigma_max {
        let w1 = wp(sigma, Branch::One);
        let w2 = wp(sigma, Branch::Two);
        // ℘_{σ,1}(τ) = (−1)^{σ+1} ℘_{σ,2}(−τ−1)
        let reflected = w2.compose_affine(&-Q::one(), &-Q::one()).scale(&sign_pow(sigma + 1));
        if let Some(k) = first_mismatch(&w1, &reflected) {
            out.push(Failure { sigma, branch: None, identity: "reflection", coeff_index: Some(k) });
        }
        for (br, w) in [(Branch::One, &w1), (Branch::Two, &w2)] {
            let lower = wp(sigma - 1, br);
            if let Some(k) = first_mismatch(&w.derivative(), &lower) {
                out.push(Failure { sigma, branch: Some(br.index()), identity: "derivative", coeff_index: Some(k) });
            }
            let lin = PolynomialExact::new(vec![Q::one(), Q::one()]);
            if let Some(k) = first_mismatch(&wp_tilde(sigma, br), &(&lin * &w.derivative())) {
                out.push(Failure { sigma, branch: Some(br.index()), identity: "tilde", coeff_index: Some(k) });
            }
            let wt = wp_tilde(sigma, br);
            if pts.iter().any(|(u, v)| chain_rule_lhs_poly(w, u, v) != chain_rule_rhs_poly(&wt, u, v)) {
                out.push(Failure { sigma, branch: Some(br.index()), identity: "chain-rule", coeff_index: None });
            }
        }
    }
    out
}

pub fn wp_real_roots(sigma: u32, branch: Branch) -> Vec<RealRoot> {
    real_roots(&wp(sigma, branch), &root_width())
}

/// `℘_{σ,1}(τ) = σ τ^{σ−1}/(σ+1)!` at the real critical points of `℘_{σ,1}`.
pub fn check_critical_values(sigma: u32) -> CriticalReport {
    assert!(sigma >= 2, "σ ≥ 2 required");
    let w = wp(sigma, Branch::One);
    let dw = w.derivative();
    let c = Q::from_integer(sigma.into()) / Q::from_integer(factorial(sigma + 1));
    let rhs_poly = PolynomialExact::monomial(c.clone(), (sigma - 1) as usize);
    let remainder_zero = if dw.degree().unwrap_or(0) == 0 {
        true
    } else {
        (&w - &rhs_poly).div_rem(&dw).1.is_zero()
    };
    let mut points = Vec::new();
    let mut max_rel_err = 0.0f64;
    for r in real_roots(&dw, &critical_width()) {
        let t = (&r.lo + &r.hi) / qi(2);
        let lhs = w.eval(&t);
        let rhs = rhs_poly.eval(&t);
        let err = ((&lhs - &rhs).abs() / rhs.abs().max(Q::new(1.into(), num::pow(num::BigInt::from(10), 30))))
            .to_f64()
            .unwrap_or(f64::INFINITY);
        max_rel_err = max_rel_err.max(err);
        points.push(r.value);
    }
    CriticalReport { sigma, points, max_rel_err, remainder_zero, pass: remainder_zero && max_rel_err <= CRITICAL_RTOL }
}

fn strictly_inside(r: &RealRoot, lo: &Q, hi: &Q) -> bool {
    r.lo > *lo && r.hi < *hi
}

pub fn sigma_report(sigma: u32) -> SigmaReport {
    let branches = [Branch::One, Branch::Two];
    let polys = branches.map(|b| wp(sigma, b));
    let degrees = [0, 1].map(|i| polys[i].degree().unwrap_or(0));
    let roots = branches.map(|b| wp_real_roots(sigma, b));
    let expected = if sigma.is_multiple_of(2) { 1 } else { 0 };
    let root_count_ok = roots.iter().all(|r| r.len() == expected);
    let even = sigma.is_multiple_of(2);
    let ordering_ok = (even && root_count_ok).then(|| {
        let (t1, t2) = (&roots[0][0], &roots[1][0]);
        strictly_inside(t2, &-Q::one(), &q(-1, 2)) && strictly_inside(t1, &q(-1, 2), &Q::zero())
    });
    let critical = (sigma >= 2).then(|| check_critical_values(sigma));
    let positivity_min =
        (sigma % 2 == 1 && sigma <= 15).then(|| sampled_min(&polys[0], -10.0, 10.0, 20_000));
    let tilde_roots_ok = (even && sigma >= 2 && root_count_ok).then(|| {
        branches.iter().enumerate().all(|(i, &b)| {
            let t = wp_tilde(sigma, b);
            let tr = real_roots(&t, &root_width());
            let only_minus_one = tr.len() == 1 && tr[0].lo <= -Q::one() && tr[0].hi >= -Q::one();
            only_minus_one && t.eval_f64(roots[i][0].value).abs() > 0.0
        })
    });
    let degree_ok = degrees.iter().all(|&d| d == (sigma - 1) as usize);
    let pass = degree_ok
        && root_count_ok
        && ordering_ok.unwrap_or(true)
        && critical.as_ref().is_none_or(|c| c.pass)
        && positivity_min.is_none_or(|m| m > 0.0)
        && tilde_roots_ok.unwrap_or(true);
    SigmaReport {
        sigma,
        degrees,
        roots: roots.map(|rs| rs.iter().map(RootSummary::from).collect()),
        root_count_ok,
        ordering_ok,
        critical,
        positivity_min,
        tilde_roots_ok,
        pass,
    }
}

/// Sum and closed forms of `P_σ` at `n` random rational points, `σ ≤ sigma_max`.
pub fn check_p_sigma_paths(sigma_max: u32, n: usize, seed: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (1..=sigma_max).all(|s| {
        (0..n).all(|_| {
            let (u, v) = (random_rational(&mut rng), random_rational(&mut rng));
            p_sigma(s, &u, &v).is_ok()
        })
    })
}

/// Full exact verification for `σ = 1..=sigma_max`.
pub fn run_polylab(sigma_max: u32, seed: u64) -> PolyLabReport {
    assert!((1..=MAX_SIGMA).contains(&sigma_max), "σ_max must lie in 1..={MAX_SIGMA}");
    let sigmas: Vec<SigmaReport> = (1..=sigma_max).map(sigma_report).collect();
    let failures = check_wp_identities(sigma_max, seed);
    let sigma2_roots_exact = {
        // unique isolated root, and the claimed rational is an exact zero inside it
        let exact = |b: Branch, t: Q| {
            let r = wp_real_roots(2, b);
            r.len() == 1 && r[0].lo <= t && t <= r[0].hi && wp(2, b).eval(&t).is_zero()
        };
        exact(Branch::One, q(-1, 3)) && exact(Branch::Two, q(-2, 3))
    };
    let p_sigma_paths_ok = check_p_sigma_paths(sigma_max.min(20), 100, seed ^ 0x5eed);
    let pass = failures.is_empty() && sigmas.iter().all(|s| s.pass) && sigma2_roots_exact && p_sigma_paths_ok;
    PolyLabReport { sigma_max, sigmas, sigma2_roots_exact, p_sigma_paths_ok, failures, pass }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_three_critical_value() {
        let c = check_critical_values(3);
        assert_eq!(c.points.len(), 1);
        assert!((c.points[0] + 1.0 / 3.0).abs() < 1e-15);
        assert!(c.pass);
    }

    #[test]
    fn sigma_two_vacuous() {
        let c = check_critical_values(2);
        assert!(c.points.is_empty() && c.pass);
    }

    #[test]
    fn odd_sigma_has_no_roots() {
        assert!(wp_real_roots(3, Branch::One).is_empty());
        assert!(wp_real_roots(3, Branch::Two).is_empty());
    }
}
