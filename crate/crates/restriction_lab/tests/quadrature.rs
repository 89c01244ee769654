use contact_order::{CurveModel, CurveSpec};
use num_complex::Complex64;
use restriction_lab::quadrature::MIN_NODES;
use restriction_lab::*;
use std::f64::consts::{PI, TAU};

fn circle(r: f64) -> CurveModel {
    CurveModel::from_spec(&CurveSpec::Circle { center: [0.3, -0.2], radius: r, interval: None }).unwrap()
}

#[test]
fn constant_integrand_gives_arclength() {
    let line = CurveModel::poly([vec![0.0, 1.0], vec![0.5, 2.0]], [-1.0, 1.0]).unwrap();
    let q = curve_quadrature(&line, Metric::Euclidean, 40.0).unwrap();
    assert!((q.arclength() - 2.0 * 5f64.sqrt()).abs() < 1e-12);
    assert!(q.len() >= MIN_NODES);
}

#[test]
fn circle_arclength() {
    for r in [0.1, 0.5, 2.0] {
        let q = curve_quadrature(&circle(r), Metric::Euclidean, 30.0).unwrap();
        assert!((q.arclength() - TAU * r).abs() < 1e-10, "r = {r}");
    }
}

#[test]
fn oscillatory_parameter_integral_vanishes() {
    let r = 0.7;
    let q = curve_quadrature(&circle(r), Metric::Euclidean, 60.0).unwrap();
    for k in 1..=40 {
        let s: Complex64 = q.nodes.iter().zip(&q.weights).map(|(t, w)| Complex64::from_polar(w / r, k as f64 * t)).sum();
        assert!(s.norm() < 1e-10, "k = {k}: {s}");
    }
}

#[test]
fn resolution_scales_with_frequency() {
    let c = CurveModel::monomial_graph(2, [-0.6, 0.6]).unwrap();
    for lam in [50.0, 400.0, 1600.0] {
        let q = curve_quadrature(&c, Metric::Euclidean, lam).unwrap();
        let per_wavelength = q.len() as f64 / (q.arclength() * lam / TAU);
        assert!(per_wavelength >= 12.0, "λ = {lam}: {per_wavelength}");
    }
}

#[test]
fn latitude_length_uses_the_round_metric() {
    let theta0 = PI / 3.0;
    let c = CurveModel::from_spec(&CurveSpec::Latitude { theta0, interval: None }).unwrap();
    let q = curve_quadrature(&c, Metric::Sphere, 80.0).unwrap();
    assert!((q.arclength() - TAU * theta0.sin()).abs() < 1e-10);
}

#[test]
fn refinement_changes_norms_little() {
    let c = CurveModel::monomial_graph(3, [-0.6, 0.6]).unwrap();
    let basis = eigenfunction_bases::torus_cluster(120.0, eigenfunction_bases::DEFAULT_WINDOW).unwrap();
    let q = curve_quadrature(&c, Metric::Euclidean, 121.0).unwrap();
    let fine = q.refined(&c, 2);
    assert_eq!(fine.len(), 2 * q.len());
    let o = LanczosOptions::default();
    let a = gram_operator_norm(&basis, &q, &o).sample.value;
    let b = gram_operator_norm(&basis, &fine, &o).sample.value;
    assert!(((a - b) / b).abs() < 1e-3, "{a} vs {b}");
}
