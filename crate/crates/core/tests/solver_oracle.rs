mod common;

use satcurv_core::gen::{generate_instance, GenSpec, Model};
use satcurv_core::solver::{
    half_crossing, sat_probability_curve, solve_dpll, verify, SatCurveSpec, Status, DEFAULT_DECISION_BUDGET,
};

#[test]
fn dpll_agrees_with_enumeration() {
    for (a, alpha) in [1.0, 3.0, 4.2, 6.0].into_iter().enumerate() {
        for model in [Model::FixedK, Model::BernoulliBipartite] {
            let spec = GenSpec { n_vars: 14, k: 3, alpha, model, seed: a as u64 };
            for i in 0..15 {
                let cnf = generate_instance(&spec, i).unwrap();
                let r = solve_dpll(&cnf, DEFAULT_DECISION_BUDGET);
                let want = common::brute_force_sat(&cnf);
                assert_eq!(r.status == Status::Sat, want, "alpha={alpha} {model:?} #{i}");
                assert_ne!(r.status, Status::Unknown);
                if let Some(x) = r.assignment {
                    assert_eq!(verify(&cnf, &x), Ok(true));
                }
            }
        }
    }
}

#[test]
fn tiny_budget_gives_unknown() {
    let spec = GenSpec { n_vars: 60, k: 3, alpha: 4.3, model: Model::FixedK, seed: 0 };
    let cnf = generate_instance(&spec, 0).unwrap();
    assert_eq!(solve_dpll(&cnf, 1).status, Status::Unknown);
}

#[test]
fn sat_curve_extremes_and_crossing() {
    let spec = SatCurveSpec {
        k: 3,
        n_vars: 60,
        alphas: vec![2.0, 3.5, 4.0, 4.25, 4.5, 5.0, 6.0],
        samples: 30,
        seed: 1,
        budget: DEFAULT_DECISION_BUDGET,
    };
    let pts = sat_probability_curve(&spec).unwrap();
    assert!(pts[0].fraction > 0.95);
    assert!(pts[6].fraction < 0.05);
    let c = half_crossing(&pts).unwrap();
    assert!((3.5..=5.0).contains(&c), "crossing {c}");
    assert_eq!(pts, sat_probability_curve(&spec).unwrap());
}
