//! Dormand–Prince 5(4) for autonomous systems, with Hermite dense output.
//!
//! When the caller supplies the second derivative `y'' = F'(y)F(y)` the
//! interpolant is quintic Hermite (value, slope and curvature at both ends of
//! every step); otherwise it falls back to cubic Hermite.

use crate::error::FlowError;

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

pub type Field<'a> = &'a dyn Fn(&[f64]) -> Vec<f64>;

#[derive(Clone, Debug)]
pub struct DenseSolution {
    /// Monotone in the direction of integration.
    pub s: Vec<f64>,
    pub y: Vec<Vec<f64>>,
    pub f: Vec<Vec<f64>>,
    pub a: Option<Vec<Vec<f64>>>,
    /// Integration stopped early because the guard rejected a state.
    pub stopped: bool,
    pub steps: usize,
    pub rejected: usize,
}

impl DenseSolution {
    /// Ascending copy (reverses a backward solution).
    pub fn ascending(mut self) -> Self {
        if self.s.len() > 1 && self.s[0] > self.s[self.s.len() - 1] {
            self.s.reverse();
            self.y.reverse();
            self.f.reverse();
            if let Some(a) = self.a.as_mut() {
                a.reverse();
            }
        }
        self
    }

    pub fn span(&self) -> (f64, f64) {
        let (a, b) = (self.s[0], self.s[self.s.len() - 1]);
        (a.min(b), a.max(b))
    }

    /// Dense interpolant; requires ascending storage and `s` within the span.
    pub fn eval(&self, s: f64) -> Vec<f64> {
        let n = self.s.len();
        if n == 1 {
            return self.y[0].clone();
        }
        let i = match self.s.binary_search_by(|v| v.partial_cmp(&s).unwrap()) {
            Ok(i) => return self.y[i].clone(),
            Err(0) => 0,
            Err(i) if i >= n => n - 2,
            Err(i) => i - 1,
        };
        let (s0, s1) = (self.s[i], self.s[i + 1]);
        let h = s1 - s0;
        let t = (s - s0) / h;
        let (y0, y1, f0, f1) = (&self.y[i], &self.y[i + 1], &self.f[i], &self.f[i + 1]);
        let t2 = t * t;
        let t3 = t2 * t;
        match &self.a {
            Some(a) => {
                let (a0, a1) = (&a[i], &a[i + 1]);
                let t4 = t3 * t;
                let t5 = t4 * t;
                let h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
                let h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
                let h2 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
                let g0 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
                let g1 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
                let g2 = 0.5 * (t3 - 2.0 * t4 + t5);
                (0..y0.len())
                    .map(|k| {
                        h0 * y0[k] + h * h1 * f0[k] + h * h * h2 * a0[k]
                            + g0 * y1[k]
                            + h * g1 * f1[k]
                            + h * h * g2 * a1[k]
                    })
                    .collect()
            }
            None => {
                let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
                let h10 = t3 - 2.0 * t2 + t;
                let h01 = -2.0 * t3 + 3.0 * t2;
                let h11 = t3 - t2;
                (0..y0.len())
                    .map(|k| h00 * y0[k] + h * h10 * f0[k] + h01 * y1[k] + h * h11 * f1[k])
                    .collect()
            }
        }
    }
}

pub struct Dopri<'a> {
    pub rhs: Field<'a>,
    pub acc: Option<Field<'a>>,
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl<'a> Dopri<'a> {
    pub fn new(rhs: Field<'a>, tol: f64) -> Self {
        Dopri { rhs, acc: None, rtol: tol, atol: tol, max_steps: 2_000_000 }
    }

    pub fn with_acc(mut self, acc: Field<'a>) -> Self {
        self.acc = Some(acc);
        self
    }

    /// Integrate from `s = 0` to `s_end` (either sign). `guard` returning
    /// false stops the integration at the last accepted state.
    pub fn solve(
        &self,
        y0: &[f64],
        s_end: f64,
        guard: &dyn Fn(&[f64]) -> bool,
    ) -> Result<DenseSolution, FlowError> {
        let dim = y0.len();
        let dir = if s_end >= 0.0 { 1.0 } else { -1.0 };
        let mut s = 0.0f64;
        let mut y = y0.to_vec();
        let mut f = (self.rhs)(&y);
        let mut out = DenseSolution {
            s: vec![0.0],
            y: vec![y.clone()],
            f: vec![f.clone()],
            a: self.acc.map(|acc| vec![acc(&y)]),
            stopped: false,
            steps: 0,
            rejected: 0,
        };
        if s_end == 0.0 {
            return Ok(out);
        }
        let norm = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let mut h = {
            let d0 = norm(&y).max(1e-5);
            let d1 = norm(&f).max(1e-5);
            (0.01 * d0 / d1).min(s_end.abs()).max(1e-6)
        };
        let mut k = vec![vec![0.0; dim]; 7];
        let mut ytmp = vec![0.0; dim];
        while dir * (s_end - s) > 0.0 {
            if out.steps + out.rejected > self.max_steps {
                return Err(FlowError::Integration(format!("step budget exhausted at s = {s}")));
            }
            if dir * (s + dir * h - s_end) > 0.0 {
                h = (s_end - s).abs();
            }
            let hs = dir * h;
            k[0].clone_from(&f);
            for st in 1..7 {
                for j in 0..dim {
                    let mut acc = y[j];
                    for (m, km) in k.iter().enumerate().take(st) {
                        acc += hs * A[st][m] * km[j];
                    }
                    ytmp[j] = acc;
                }
                k[st] = (self.rhs)(&ytmp);
            }
            // ytmp now holds the 5th-order solution (stage 7 abscissa = 1)
            let ynew = ytmp.clone();
            let mut err = 0.0f64;
            for j in 0..dim {
                let e: f64 = (0..7).map(|m| E[m] * k[m][j]).sum::<f64>() * hs;
                let sc = self.atol + self.rtol * y[j].abs().max(ynew[j].abs());
                err = err.max((e / sc).abs());
            }
            if !err.is_finite() {
                h *= 0.1;
                out.rejected += 1;
                if h < 1e-14 * s.abs().max(1.0) {
                    return Err(FlowError::Integration(format!("non-finite state near s = {s}")));
                }
                continue;
            }
            if err <= 1.0 {
                if !guard(&ynew) {
                    out.stopped = true;
                    break;
                }
                s += hs;
                y = ynew;
                f = k[6].clone();
                out.s.push(s);
                out.y.push(y.clone());
                out.f.push(f.clone());
                if let (Some(acc), Some(a)) = (self.acc, out.a.as_mut()) {
                    a.push(acc(&y));
                }
                out.steps += 1;
            } else {
                out.rejected += 1;
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= fac;
            if err > 1.0 && h < 1e-14 * s.abs().max(1.0) {
                return Err(FlowError::Integration(format!("step size collapse at s = {s}")));
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_accuracy() {
        let rhs = |y: &[f64]| vec![y[1], -y[0]];
        let acc = |y: &[f64]| vec![-y[0], -y[1]];
        let sol = Dopri::new(&rhs, 1e-12).with_acc(&acc).solve(&[1.0, 0.0], 3.0, &|_| true).unwrap();
        let yend = sol.y.last().unwrap();
        assert!((yend[0] - 3f64.cos()).abs() < 1e-10);
        for s in [0.1, 0.77, 1.5, 2.9] {
            let y = sol.eval(s);
            assert!((y[0] - s.cos()).abs() < 1e-10, "dense at {s}");
        }
    }

    #[test]
    fn backward_direction() {
        let rhs = |y: &[f64]| vec![y[0]];
        let sol = Dopri::new(&rhs, 1e-12).solve(&[1.0], -1.0, &|_| true).unwrap().ascending();
        assert!((sol.y[0][0] - (-1f64).exp()).abs() < 1e-10);
        assert!((sol.eval(-0.5)[0] - (-0.5f64).exp()).abs() < 1e-8);
    }

    #[test]
    fn quintic_hermite_reproduces_quintics() {
        let p = |s: f64| 1.0 + 2.0 * s - s * s + 0.5 * s.powi(3) - 0.25 * s.powi(4) + 0.1 * s.powi(5);
        let dp = |s: f64| 2.0 - 2.0 * s + 1.5 * s * s - s.powi(3) + 0.5 * s.powi(4);
        let ddp = |s: f64| -2.0 + 3.0 * s - 3.0 * s * s + 2.0 * s.powi(3);
        let sol = DenseSolution {
            s: vec![0.3, 1.1],
            y: vec![vec![p(0.3)], vec![p(1.1)]],
            f: vec![vec![dp(0.3)], vec![dp(1.1)]],
            a: Some(vec![vec![ddp(0.3)], vec![ddp(1.1)]]),
            stopped: false,
            steps: 1,
            rejected: 0,
        };
        for s in [0.35, 0.6, 0.9, 1.05] {
            assert!((sol.eval(s)[0] - p(s)).abs() < 1e-13);
        }
    }

    #[test]
    fn guard_stops_integration() {
        let rhs = |_: &[f64]| vec![1.0];
        let sol = Dopri::new(&rhs, 1e-10).solve(&[0.0], 10.0, &|y| y[0] < 2.0).unwrap();
        assert!(sol.stopped);
        assert!(*sol.s.last().unwrap() < 2.0);
    }
}
