use std::time::Instant;

use num::{One, Zero};
use polynomial_lab::poly::{q, qi};
use polynomial_lab::*;
use proptest::prelude::*;

#[test]
fn full_suite_to_forty() {
    let t = Instant::now();
    let rep = run_polylab(40, 1);
    let secs = t.elapsed().as_secs_f64();
    assert!(rep.failures.is_empty(), "{:?}", rep.failures);
    for s in &rep.sigmas {
        assert!(s.pass, "σ = {}: {:?}", s.sigma, s);
    }
    assert!(rep.sigma2_roots_exact);
    assert!(rep.p_sigma_paths_ok);
    assert!(rep.pass);
    assert!(secs < 5.0, "took {secs:.2}s");
}

#[test]
fn even_sigma_root_ordering() {
    for s in [4, 6, 8] {
        let t1 = wp_real_roots(s, Branch::One);
        let t2 = wp_real_roots(s, Branch::Two);
        assert_eq!((t1.len(), t2.len()), (1, 1));
        assert!(-1.0 < t2[0].value && t2[0].value < -0.5 && -0.5 < t1[0].value && t1[0].value < 0.0);
        // reflection maps one root onto the other
        assert!((t1[0].value + t2[0].value + 1.0).abs() < 1e-11);
    }
}

#[test]
fn roots_are_tight() {
    let w = checks::root_width();
    for s in 2..=12 {
        for r in wp_real_roots(s, Branch::One) {
            assert!(r.width() <= w);
        }
    }
}

#[test]
fn sigma_five_critical_points() {
    let c = check_critical_values(5);
    assert!(c.pass && c.remainder_zero);
}

proptest! {
    #[test]
    fn p_sigma_paths_agree(s in 1u32..=20, un in -40i64..40, ud in 1i64..30, vn in -40i64..40, vd in 1i64..30) {
        prop_assert!(p_sigma(s, &q(un, ud), &q(vn, vd)).is_ok());
    }

    #[test]
    fn p_sigma_vanishes_on_diagonal(s in 1u32..=20, un in -40i64..40, ud in 1i64..30) {
        prop_assert!(p_sigma(s, &q(un, ud), &q(un, ud)).unwrap().is_zero());
    }

    #[test]
    fn p_sigma_is_homogeneous(s in 1u32..=12, un in -20i64..20, vn in -20i64..20, c in 1i64..9) {
        let base = p_sigma(s, &qi(un), &qi(vn)).unwrap();
        let scaled = p_sigma(s, &qi(c * un), &qi(c * vn)).unwrap();
        prop_assert_eq!(scaled, base * num::pow(qi(c), (s + 1) as usize));
    }

    #[test]
    fn division_identity(a in proptest::collection::vec(-9i64..9, 1..8), b in proptest::collection::vec(-9i64..9, 1..5)) {
        let pa = PolynomialExact::new(a.iter().map(|&v| qi(v)).collect());
        let pb = PolynomialExact::new(b.iter().map(|&v| qi(v)).collect());
        prop_assume!(!pb.is_zero());
        let (qq, r) = pa.div_rem(&pb);
        prop_assert_eq!(&(&qq * &pb) + &r, pa);
        prop_assert!(r.is_zero() || r.degree() < pb.degree());
    }
}

#[test]
fn wp_one_is_constant_half() {
    assert_eq!(wp(1, Branch::One), PolynomialExact::constant(q(1, 2)));
    assert_eq!(wp(1, Branch::Two).coeffs(), &[q(1, 2)]);
    assert!(!wp(1, Branch::One).eval(&Q::one()).is_zero());
}
