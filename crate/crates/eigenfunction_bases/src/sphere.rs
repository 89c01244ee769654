//! Normalized associated Legendre functions `P̄_l^m`, `∫₋₁¹ |P̄_l^m|² dx = 1`.
//!
//! For each `m` the sectoral value `P̄_m^m ∝ (1 − x²)^{m/2}` is carried as a
//! mantissa and a binary exponent, then the degree is raised at fixed `m`
//! with the standard normalized three-term recurrence. Near the poles the
//! sectoral term underflows by thousands of decades for large `m`; the
//! recurrence climbs back into range before the result is converted.

use crate::scaled::ScaledPair;

pub const SPHERE_MAX_L: usize = 5000;

/// `P̄_l^m(x)` for `m = 0..=l`.
pub fn legendre_column(l: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; l + 1];
    let s2 = (1.0 - x) * (1.0 + x);
    let s = s2.max(0.0).sqrt();
    let mut sect = ScaledPair::from_ln(0.5f64.ln() / 2.0, 1.0);
    for m in 0..=l {
        if m > 0 {
            let mf = m as f64;
            sect.scale_cur(s * ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt());
        }
        if sect.cur == 0.0 {
            break;
        }
        out[m] = degree_up(l, m, x, sect);
    }
    out
}

/// `P̄_l^m(x)` from `P̄_m^m(x)`.
fn degree_up(l: usize, m: usize, x: f64, sect: ScaledPair) -> f64 {
    if l == m {
        return sect.value();
    }
    let mut p = sect;
    p.push(x * (2.0 * m as f64 + 3.0).sqrt() * sect.cur);
    let m2 = (m * m) as f64;
    for j in m + 2..=l {
        let jf = j as f64;
        let a = ((4.0 * jf * jf - 1.0) / (jf * jf - m2)).sqrt();
        let jm = jf - 1.0;
        let b = ((jm * jm - m2) / (4.0 * jm * jm - 1.0)).sqrt();
        p.push(a * (x * p.cur - b * p.prev));
    }
    p.value()
}

/// Single `P̄_l^m(x)`.
pub fn legendre(l: usize, m: usize, x: f64) -> f64 {
    assert!(m <= l);
    let s = ((1.0 - x) * (1.0 + x)).max(0.0).sqrt();
    let mut sect = ScaledPair::from_ln(0.5f64.ln() / 2.0, 1.0);
    for k in 1..=m {
        let kf = k as f64;
        sect.scale_cur(s * ((2.0 * kf + 1.0) / (2.0 * kf)).sqrt());
    }
    if sect.cur == 0.0 {
        return 0.0;
    }
    degree_up(l, m, x, sect)
}
