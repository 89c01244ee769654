use hamiltonian_flow::suite::{ENERGY_TOL, JET_RTOL, REVERSAL_TOL, SYMPLECTIC_TOL};
use hamiltonian_flow::{cotangent_lift, flow_map, integrate_flow, run_flow_suite};
use proptest::prelude::*;
use symbol_core::{AffineMap, PhaseSpacePoint, SymbolModel};

fn builtins() -> Vec<SymbolModel> {
    vec![SymbolModel::torus_laplace(), SymbolModel::sphere_laplace(), SymbolModel::hermite()]
}

#[test]
fn invariants_on_random_starts() {
    for sym in builtins() {
        let rep = run_flow_suite(&sym, 50, 7, false).unwrap();
        assert!(rep.energy_max <= ENERGY_TOL, "{}: energy {:e}", sym.id, rep.energy_max);
        assert!(rep.reversal_max <= REVERSAL_TOL, "{}: reversal {:e}", sym.id, rep.reversal_max);
        assert!(rep.jet_max <= JET_RTOL, "{}: jets {:e}", sym.id, rep.jet_max);
    }
}

#[test]
fn flow_is_symplectic() {
    for sym in builtins() {
        let rep = run_flow_suite(&sym, 5, 11, true).unwrap();
        let m = rep.symplectic_max.unwrap();
        assert!(m <= SYMPLECTIC_TOL, "{}: {m:e}", sym.id);
    }
}

#[test]
fn custom_expression_matches_builtin_flow() {
    let custom = SymbolModel::custom("xi1^2 + xi2^2 + x1^2 + x2^2 - 1").unwrap();
    let builtin = SymbolModel::hermite();
    let st = PhaseSpacePoint::new([0.3, -0.1], [0.5, (1.0f64 - 0.35).sqrt()]);
    let a = flow_map(&custom, &st, 0.8, 1e-12).unwrap().to_array();
    let b = flow_map(&builtin, &st, 0.8, 1e-12).unwrap().to_array();
    for i in 0..4 {
        assert!((a[i] - b[i]).abs() < 1e-10);
    }
}

#[test]
fn sphere_geodesic_keeps_clairaut_constant() {
    let sym = SymbolModel::sphere_laplace();
    let th: f64 = 1.0;
    let st = PhaseSpacePoint::new([th, 0.0], [0.6, 0.8 * th.sin()]);
    let tr = integrate_flow(&sym, &st, 1.0, 1e-11).unwrap();
    for (_, p) in &tr.samples {
        assert!((p.xi[1] - st.xi[1]).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Conjugating the flow by a linear chart change commutes with the lift.
    #[test]
    fn lift_intertwines_flows(a in -0.5f64..0.5, b in -0.5f64..0.5, ang in 0.0f64..std::f64::consts::TAU) {
        let map = AffineMap { a: [[1.0 + a, b], [0.2, 1.0 - a]], c: [0.1, -0.2] };
        let sym = SymbolModel::torus_laplace();
        let moved = sym.clone().transported(map.clone());
        let st = PhaseSpacePoint::new([0.1, 0.2], [ang.cos(), ang.sin()]);
        let lhs = cotangent_lift(&map, &flow_map(&sym, &st, 0.5, 1e-12).unwrap()).unwrap();
        let rhs = flow_map(&moved, &cotangent_lift(&map, &st).unwrap(), 0.5, 1e-12).unwrap();
        for (u, v) in lhs.to_array().iter().zip(rhs.to_array()) {
            prop_assert!((u - v).abs() < 1e-9);
        }
    }
}
