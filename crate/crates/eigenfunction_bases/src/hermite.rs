//! Hermite functions and their polar (Laguerre) counterparts.

use crate::scaled::ScaledPair;

pub const HERMITE_MAX_N: usize = 6000;

/// `h_0(x), …, h_n(x)`, orthonormal on the line.
pub fn hermite_functions(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let ln0 = -0.25 * std::f64::consts::PI.ln() - 0.5 * x * x;
    let mut p = ScaledPair::from_ln(ln0, 1.0);
    out.push(p.value());
    for j in 0..n {
        let jf = j as f64;
        let next = x * (2.0 / (jf + 1.0)).sqrt() * p.cur - (jf / (jf + 1.0)).sqrt() * p.prev;
        p.push(next);
        out.push(p.value());
    }
    out
}

/// Radial parts `R_{k,α}(ρ)` of the oscillator eigenfunctions at level `n`
/// in polar form `R_{k,α}(ρ) e^{±iαθ}/√(2π)`, `n = 2k + α`, normalized by
/// `∫₀^∞ R² ρ dρ = 1`. Returned for `α = n, n−2, …`.
pub fn polar_radial(n: usize, rho: f64) -> Vec<(usize, f64)> {
    let x = rho * rho;
    let mut ln_fact = vec![0.0; n + 1];
    for i in 1..=n {
        ln_fact[i] = ln_fact[i - 1] + (i as f64).ln();
    }
    let mut out = Vec::with_capacity(n / 2 + 1);
    let mut alpha = n as i64;
    while alpha >= 0 {
        let a = alpha as usize;
        let k = (n - a) / 2;
        // ℓ_0^α(x) = x^{α/2} e^{−x/2} / √(α!)
        let ln0 = if a == 0 { -0.5 * x } else { 0.5 * a as f64 * x.ln() - 0.5 * x - 0.5 * ln_fact[a] };
        let mut p = ScaledPair::from_ln(ln0, 1.0);
        let af = a as f64;
        for j in 0..k {
            let jf = j as f64;
            let next = ((2.0 * jf + 1.0 + af - x) * p.cur - (jf * (jf + af)).sqrt() * p.prev)
                / ((jf + 1.0) * (jf + 1.0 + af)).sqrt();
            p.push(next);
        }
        out.push((a, std::f64::consts::SQRT_2 * p.value()));
        alpha -= 2;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_functions() {
        let h = hermite_functions(2, 0.7);
        let g = std::f64::consts::PI.powf(-0.25) * (-0.245f64).exp();
        assert!((h[0] - g).abs() < 1e-15);
        assert!((h[1] - 2f64.sqrt() * 0.7 * g).abs() < 1e-15);
        assert!((h[2] - (2.0 * 0.49 - 1.0) / 2f64.sqrt() * g).abs() < 1e-15);
        assert_eq!(hermite_functions(1, 0.0)[1], 0.0);
    }

    #[test]
    fn far_tail_is_representable() {
        // h_0(60) ≈ e^{−1800} underflows, but h_6000(60) is O(λ^{-1/2})
        let h = hermite_functions(6000, 60.0);
        assert_eq!(h[0], 0.0);
        assert!(h[6000].abs() > 1e-3 && h[6000].abs() < 1.0);
    }

    #[test]
    fn polar_ground_state() {
        let r = polar_radial(0, 0.8);
        assert_eq!(r.len(), 1);
        assert!((r[0].1 - 2f64.sqrt() * (-0.32f64).exp()).abs() < 1e-15);
        let r = polar_radial(1, 0.8);
        assert_eq!(r[0].0, 1);
        assert!((r[0].1 - 2f64.sqrt() * 0.8 * (-0.32f64).exp()).abs() < 1e-15);
    }
}
