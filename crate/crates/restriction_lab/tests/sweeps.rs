use contact_order::{CurveModel, CurveSpec};
use restriction_lab::*;

#[test]
fn torus_sweep_is_ordered_and_repeatable() {
    let c = CurveModel::monomial_graph(3, [-0.6, 0.6]).unwrap();
    let g = LambdaGrid { min: 30.0, max: 120.0, points_per_decade: 4.0, jitter_group: 2 };
    let o = SweepOptions::default();
    let a: Vec<NormSample> = torus_sweep(&c, &g, &o).into_iter().collect::<Result<_, _>>().unwrap();
    let b: Vec<NormSample> = torus_sweep(&c, &g, &o).into_iter().collect::<Result<_, _>>().unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 2 * g.centres().len());
    assert!(a.windows(2).all(|w| w[0].lambda < w[1].lambda));
    for (s, (grp, l)) in a.iter().zip(g.torus_levels()) {
        assert_eq!(s.meta.group, grp);
        assert_eq!(s.lambda, l);
    }
}

#[test]
fn integer_families_sweep() {
    let g = LambdaGrid { min: 50.0, max: 400.0, points_per_decade: 3.0, jitter_group: 3 };
    let o = SweepOptions::default();
    let eq = CurveSpec::Latitude { theta0: std::f64::consts::FRAC_PI_2, interval: None };
    let s: Vec<NormSample> = sphere_sweep(&eq, &g, &o).into_iter().collect::<Result<_, _>>().unwrap();
    assert!(s.iter().all(|x| x.meta.method == "latitude-closed-form"));
    let f = fit_exponent(&s, 3).unwrap();
    assert!(f.slope > 0.15 && f.slope < 0.35, "{}", f.slope);

    let orbit = CurveSpec::Circle { center: [0.0, 0.0], radius: 0.5f64.sqrt(), interval: None };
    let h: Vec<NormSample> = hermite_sweep(&orbit, &g, &o).into_iter().collect::<Result<_, _>>().unwrap();
    assert_eq!(h.len(), s.len());
    assert!(h.iter().all(|x| x.is_valid()));
}
