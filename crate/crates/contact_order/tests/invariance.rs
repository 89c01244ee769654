#![allow(clippy::needless_range_loop)]

use contact_order::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symbol_core::{AffineMap, SymbolModel};

fn cfg() -> ContactConfig {
    ContactConfig::default()
}

fn phi(t: f64) -> f64 {
    t * t * t + t
}

#[test]
fn reparametrization_invariance() {
    let sym = SymbolModel::torus_laplace();
    for k in [2, 3, 4, 5] {
        let c = CurveModel::monomial_graph(k, [-0.3, 0.3]).unwrap();
        let r = c.reparametrized(vec![0.0, 1.0, 0.0, 1.0]).unwrap();
        let a = global_sigma(&sym, &c, &cfg()).unwrap();
        let b = global_sigma(&sym, &r, &cfg()).unwrap();
        assert_eq!(a.sigma_global, b.sigma_global, "k = {k}");
        assert_eq!(a.g2_points.len(), b.g2_points.len(), "k = {k}");
        for (p, q) in a.g2_points.iter().zip(&b.g2_points) {
            assert!((p - phi(*q)).abs() < 1e-6, "k = {k}: {p} vs φ({q})");
        }
    }
}

fn random_map(rng: &mut ChaCha8Rng) -> AffineMap {
    loop {
        let a = [[rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5)], [
            rng.random_range(-1.5..1.5),
            rng.random_range(-1.5..1.5),
        ]];
        let m = AffineMap { a, c: [rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)] };
        let det = m.det().abs();
        let norm = a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
        if det > 0.3 && norm < 2.0 {
            return m;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]
    #[test]
    fn chart_invariance(seed in 0u64..10_000, k in 2usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let map = random_map(&mut rng);
        let sym = SymbolModel::torus_laplace();
        let c = CurveModel::monomial_graph(k, [-0.3, 0.3]).unwrap();
        let moved_sym = sym.clone().transported(map.clone());
        let moved = c.transported(&map).unwrap();
        let a = global_sigma(&sym, &c, &cfg()).unwrap();
        let b = global_sigma(&moved_sym, &moved, &cfg()).unwrap();
        prop_assert_eq!(a.sigma_global, b.sigma_global);
        prop_assert_eq!(a.g2_points.len(), b.g2_points.len());
        for (p, q) in a.g2_points.iter().zip(&b.g2_points) {
            prop_assert!((p - q).abs() < 1e-6);
        }
    }
}

/// `g2_test(t) ⟺ σ(t) ≥ 2` on 200 random cases: half generic points, half
/// points where the curve is built to osculate a line to order ≥ 3.
#[test]
fn g2_test_agrees_with_jets() {
    let sym = SymbolModel::torus_laplace();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut agree = 0;
    let mut positives = 0;
    for case in 0..200 {
        let t0: f64 = rng.random_range(-0.2..0.2);
        let slope: f64 = rng.random_range(-0.8..0.8);
        let a3: f64 = rng.random_range(0.5..3.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let a4: f64 = rng.random_range(-2.0..2.0);
        // y = slope·t + a3 (t − t0)^3 + a4 (t − t0)^4, optionally plus a quadratic term
        let a2: f64 = if case % 2 == 0 { 0.0 } else { rng.random_range(0.3..2.0) };
        let mut y = vec![0.0; 5];
        let bin = |n: usize, k: usize| (1..=k).fold(1.0, |acc, i| acc * (n + 1 - i) as f64 / i as f64);
        for (deg, coef) in [(2usize, a2), (3, a3), (4, a4)] {
            for k in 0..=deg {
                y[k] += coef * bin(deg, k) * (-t0).powi((deg - k) as i32);
            }
        }
        y[1] += slope;
        let c = CurveModel::poly([vec![0.0, 1.0], y], [-0.3, 0.3]).unwrap();
        let r = prepare(&sym, &c, &cfg()).unwrap();
        let t = if case % 4 == 3 { rng.random_range(-0.3..0.3) } else { t0 };
        let g2 = g2_test(&r, t, DEFAULT_RTOL).unwrap();
        let cl = contact_order_at(&r, t, DEFAULT_J_MAX, DEFAULT_RTOL).unwrap();
        let ge2 = cl.sigma != SigmaValue::Finite(1);
        positives += ge2 as usize;
        if g2 == ge2 {
            agree += 1;
        } else {
            panic!("case {case}: t = {t}, g2 = {g2}, σ = {}", cl.sigma);
        }
    }
    assert_eq!(agree, 200);
    assert!(positives >= 50, "only {positives} osculating cases");
}
