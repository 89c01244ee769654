use exponent_model::*;
use num::{One, Zero};
use proptest::prelude::*;

fn qf(n: i64, d: i64) -> LebesgueExponent {
    LebesgueExponent::finite(n, d)
}

#[test]
fn sigma_one_matches_curved_baseline_on_twenty_exponents() {
    for k in 0..20 {
        // q = 2 + k/10 covers [2, 3.9]
        let q = qf(20 + k, 10);
        let r = rho(&q, ContactOrder::Finite(1)).value;
        assert_eq!(r, rat(1, 3) - q.recip() / rat(3, 1));
        assert_eq!(r, bgt_curved(&q));
    }
}

#[test]
fn quarter_at_critical_exponent() {
    for s in 1..=100 {
        assert_eq!(rho(&qf(4, 1), ContactOrder::Finite(s)).value, rat(1, 4));
    }
}

#[test]
fn strictly_increasing_in_sigma() {
    for q in [qf(2, 1), qf(3, 1), qf(7, 2)] {
        let vals: Vec<Rational> = (1..=60).map(|s| rho(&q, ContactOrder::Finite(s)).value).collect();
        assert!(is_strictly_increasing(&vals), "q = {q}");
        assert!(vals.iter().all(|v| *v < rat(1, 4)));
    }
}

#[test]
fn limit_is_a_quarter() {
    for q in [qf(2, 1), qf(3, 1), qf(7, 2)] {
        let r = to_f64(&rho(&q, ContactOrder::Finite(1_000_000)).value);
        assert!((r - 0.25).abs() < 1e-6);
        let gaps: Vec<Rational> = [1, 10, 100, 1000, 10_000].iter().map(|&s| rho_gap_to_quarter(&q, s)).collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0] && w[1] > Rational::zero()));
    }
}

#[test]
fn q_two_closed_form() {
    for s in 1..=50i64 {
        assert_eq!(rho(&qf(2, 1), ContactOrder::Finite(s)).value, rat(s, 2 * (2 * s + 1)));
    }
}

#[test]
fn prediction_bundles_everything() {
    let p = predict(&qf(2, 1), ContactOrder::Finite(2));
    assert_eq!(p.rho.value, rat(1, 5));
    assert_eq!(p.hermite, rat(-1, 1) + rat(1, 2) + rat(2, 5));
    assert_eq!(p.baselines.named().len(), 5);
}

proptest! {
    #[test]
    fn gap_identity(n in 2i64..400, d in 1i64..100, s in 1i64..500) {
        prop_assume!(n >= 2 * d && n <= 4 * d);
        let q = qf(n, d);
        let r = rho(&q, ContactOrder::Finite(s)).value;
        prop_assert_eq!(rat(1, 4) - r.clone(), rho_gap_to_quarter(&q, s));
        prop_assert!(r >= rat(1, 6) && r <= rat(1, 4));
    }

    #[test]
    fn hermite_relation(n in 2i64..400, d in 1i64..100, s in 1i64..50) {
        let q = qf(n, d);
        let h = hermite_exponent(&q, ContactOrder::Finite(s)).value;
        let r = rho(&q, ContactOrder::Finite(s)).value;
        prop_assert_eq!(h + Rational::one() - q.recip(), r * rat(2, 1));
    }
}
