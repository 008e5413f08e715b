use ncrs_core::delta_shock::{admissibility, build_delta_shock, classify_riemann, SolutionClass};
use ncrs_core::identity_verify::{analytic_balance, identity_residuals, verify, wrong_speed_witness};
use ncrs_core::rh_shock::{shock_speed, volpert_shock_exists, VolpertClass};
use ncrs_core::test_function::TestFunction;
use ncrs_core::{RiemannData, SigmaBarDecomposition};
use proptest::prelude::*;

fn admissible() -> impl Strategy<Value = RiemannData> {
    (0.2f64..3.0, -0.45f64..0.45, -2.0f64..2.0, -2.0f64..2.0).prop_map(|(u1, r, u0, s0)| {
        SigmaBarDecomposition::new(s0, r * u1 * u1, u0, u1).unwrap().to_riemann(0.0).unwrap()
    })
}

#[test]
fn canonical_datum_end_to_end() {
    let data = RiemannData::from_components(2.0, 1.0, 0.0, 0.0, 0.0).unwrap();
    let SolutionClass::DeltaShock { solution, admissibility } = classify_riemann(&data).unwrap() else {
        panic!("expected a delta-shock");
    };
    assert_eq!((solution.phi_dot, solution.e_dot), (0.5, 0.5));
    assert!(admissibility.overcompressive);
    assert!(matches!(volpert_shock_exists(&data), VolpertClass::NoShock { .. }));
    assert_eq!(analytic_balance(&data).unwrap(), 0.0);
    let thetas = [
        TestFunction::new(0.5, 1.0, 1.0, 0.8, 0).unwrap(),
        TestFunction::new(0.0, 0.2, 1.0, 0.5, 3).unwrap(),
    ];
    let rep = verify(&solution, &thetas, 1e-10, Some(0.1)).unwrap();
    assert!(rep.passed);
    assert!(rep.witness.unwrap().residuals.id1 > 1e-3);
}

#[test]
fn witness_respects_lower_bound() {
    let data = RiemannData::from_components(2.0, 1.0, 0.0, 0.0, 0.0).unwrap();
    let sol = build_delta_shock(&data).unwrap();
    let th = TestFunction::new(0.5, 1.0, 0.8, 0.7, 1).unwrap();
    for ds in [0.05, -0.05, 0.1, 0.3, -0.4] {
        let w = wrong_speed_witness(&sol, &th, ds).unwrap();
        assert!(w.residuals.id1 >= 0.5 * ds.abs() * 2.0 * w.front_mass);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn identities_hold_on_admissible_data(
        data in admissible(),
        tc in 0.2f64..1.5,
        dx in -0.3f64..0.3,
        wx in 0.3f64..1.2,
        wt in 0.2f64..0.8,
        deg in 0u32..4,
    ) {
        let sol = build_delta_shock(&data).unwrap();
        let th = TestFunction::new(sol.phi_dot * tc + dx, tc, wx, wt, deg).unwrap();
        let r = identity_residuals(&sol, &th).unwrap();
        prop_assert!(r.max() <= 1e-10, "{:?}", r);
    }

    #[test]
    fn speeds_agree_across_modules(data in admissible()) {
        let phi = build_delta_shock(&data).unwrap().phi_dot;
        let s = shock_speed(&data).unwrap().value();
        prop_assert!((phi - s).abs() <= 1e-14 * s.abs().max(1e-300));
        prop_assert!(admissibility(&data).unwrap().overcompressive);
    }
}
