//! Mantissa/exponent arithmetic for recurrences whose terms leave the `f64`
//! range before they come back into it.

const SHIFT: i64 = 256;
const BIG: f64 = f64::from_bits(((1023 + SHIFT) as u64) << 52);
const SMALL: f64 = f64::from_bits(((1023 - SHIFT) as u64) << 52);

/// `m · 2^e`.
pub fn ldexp(m: f64, e: i64) -> f64 {
    if m == 0.0 || e < -1200 {
        return 0.0;
    }
    if e > 1100 {
        return m * f64::INFINITY;
    }
    let h = e / 2;
    m * 2f64.powi(h as i32) * 2f64.powi((e - h) as i32)
}

/// A pair of consecutive recurrence terms sharing one binary exponent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledPair {
    pub prev: f64,
    pub cur: f64,
    pub exp: i64,
}

impl ScaledPair {
    /// Start from `cur = exp(ln_cur)` (with sign) and `prev = 0`.
    pub fn from_ln(ln_cur: f64, sign: f64) -> Self {
        if ln_cur == f64::NEG_INFINITY {
            return Self { prev: 0.0, cur: 0.0, exp: 0 };
        }
        let e = (ln_cur / std::f64::consts::LN_2).floor();
        let m = (ln_cur - e * std::f64::consts::LN_2).exp();
        Self { prev: 0.0, cur: sign * m, exp: e as i64 }
    }

    /// Shift in a new term and keep both mantissas in range.
    pub fn push(&mut self, next: f64) {
        self.prev = self.cur;
        self.cur = next;
        let big = self.cur.abs().max(self.prev.abs());
        if big > BIG {
            self.cur *= SMALL;
            self.prev *= SMALL;
            self.exp += SHIFT;
        } else if big < SMALL && big > 0.0 {
            self.cur *= BIG;
            self.prev *= BIG;
            self.exp -= SHIFT;
        }
    }

    /// Multiply `cur` by a factor (the pair is reset to `prev = 0`).
    pub fn scale_cur(&mut self, f: f64) {
        self.prev = 0.0;
        self.cur *= f;
        let a = self.cur.abs();
        if a > BIG {
            self.cur *= SMALL;
            self.exp += SHIFT;
        } else if a < SMALL && a > 0.0 {
            self.cur *= BIG;
            self.exp -= SHIFT;
        }
    }

    pub fn value(&self) -> f64 {
        ldexp(self.cur, self.exp)
    }

    pub fn ln_abs(&self) -> f64 {
        self.cur.abs().ln() + self.exp as f64 * std::f64::consts::LN_2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ldexp_matches_powi() {
        assert_eq!(ldexp(1.5, 10), 1536.0);
        assert_eq!(ldexp(1.0, -1074), f64::from_bits(1));
        assert_eq!(ldexp(3.0, -5000), 0.0);
        assert_eq!(BIG * SMALL, 1.0);
    }

    #[test]
    fn pair_survives_underflow() {
        let mut p = ScaledPair::from_ln(-2000.0, 1.0);
        for _ in 0..100 {
            p.push(p.cur * 1e10);
        }
        assert!((p.ln_abs() - (-2000.0 + 1000.0 * 10f64.ln())).abs() < 1e-9);
    }
}
