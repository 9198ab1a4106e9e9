mod common;

use ofdma_maxmin::maxmin::solve_maxmin_with;
use ofdma_maxmin::{
    check_feasibility, solve_lp, solve_maxmin, solve_mixed, LinearProgramF64, LpStatus, MixedStatus,
    RateMatrixF64, Relation, ServiceClass, ServiceProfileF64, SolverOptions, WeightVectorF64,
};
use proptest::prelude::*;

fn instance(max_users: usize, max_bins: usize) -> impl Strategy<Value = (RateMatrixF64, Vec<f64>)> {
    (1..=max_users, 1..=max_bins).prop_flat_map(|(n, k)| {
        (
            prop::collection::vec(prop::collection::vec(0.1f64..20.0, k), n),
            prop::collection::vec(0.2f64..5.0, n),
        )
            .prop_map(|(rows, w)| (RateMatrixF64::from_rows(rows).unwrap(), w))
    })
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scaling_weights_scales_c((r, w) in instance(5, 12), t in 0.1f64..10.0) {
        let base = solve_maxmin(&r, &WeightVectorF64::new(w.clone()).unwrap()).unwrap();
        let scaled = solve_maxmin(&r, &WeightVectorF64::new(w.iter().map(|g| g * t).collect()).unwrap()).unwrap();
        prop_assert!(rel_close(scaled.c, t * base.c, 1e-9));
    }

    #[test]
    fn adding_a_bin_never_lowers_c((r, w) in instance(4, 10), extra in prop::collection::vec(0.0f64..20.0, 4)) {
        let wv = WeightVectorF64::new(w.clone()).unwrap();
        let before = solve_maxmin(&r, &wv).unwrap();
        let rows: Vec<Vec<f64>> = r.rows().zip(&extra).map(|(row, x)| {
            let mut row = row.to_vec();
            row.push(*x);
            row
        }).collect();
        let after = solve_maxmin(&RateMatrixF64::from_rows(rows).unwrap(), &wv).unwrap();
        prop_assert!(after.c >= before.c - 1e-9 * before.c.max(1.0));
    }

    #[test]
    fn feasibility_margin_is_homogeneous((r, d) in instance(4, 10), t in 0.1f64..10.0) {
        let a = check_feasibility(&r, &d).unwrap();
        let b = check_feasibility(&r, &d.iter().map(|x| x * t).collect::<Vec<_>>()).unwrap();
        prop_assert!(rel_close(b.c * t, a.c, 1e-9));
        prop_assert_eq!(a.feasible, a.c >= 1.0 - 1e-9);
    }

    #[test]
    fn achieved_rates_are_always_feasible((r, w) in instance(5, 12)) {
        let res = solve_maxmin(&r, &WeightVectorF64::new(w).unwrap()).unwrap();
        let f = check_feasibility(&r, &res.user_rates).unwrap();
        prop_assert!(f.feasible, "margin {}", f.c);
    }

    #[test]
    fn mixed_without_voice_matches_maxmin((r, w) in instance(4, 10)) {
        let wv = WeightVectorF64::new(w.clone()).unwrap();
        let plain = solve_maxmin(&r, &wv).unwrap();
        let mixed = solve_mixed(&r, &ServiceProfileF64::all_data(&wv)).unwrap();
        prop_assert_eq!(mixed.c.to_bits(), plain.c.to_bits());
        prop_assert_eq!(&mixed.allocation, &plain.allocation);
    }

    #[test]
    fn voice_floors_are_met_and_tighter_floors_cost_data(
        (r, w) in instance(4, 10).prop_filter("needs two users", |(r, _)| r.n_users() >= 2),
        frac in 0.0f64..0.4,
    ) {
        // User 0 is voice with a floor that is a fraction of its solo rate.
        let solo: f64 = r.row(0).iter().sum();
        let profile = |floor: f64| {
            let mut classes = vec![ServiceClass::Voice { r_min: floor }];
            classes.extend(w[1..].iter().map(|g| ServiceClass::Data { weight: *g }));
            ServiceProfileF64::new(classes).unwrap()
        };
        let low = solve_mixed(&r, &profile(frac * solo / 2.0)).unwrap();
        let high = solve_mixed(&r, &profile(frac * solo)).unwrap();
        prop_assert_eq!(low.status, MixedStatus::Feasible);
        prop_assert_eq!(high.status, MixedStatus::Feasible);
        prop_assert!(high.user_rates[0] >= frac * solo - 1e-9 * solo.max(1.0));
        prop_assert!(high.c <= low.c + 1e-9 * low.c.max(1.0));
    }

    #[test]
    fn vertex_solution_is_feasible_dual_tight_and_deterministic((r, w) in instance(5, 12)) {
        let wv = WeightVectorF64::new(w).unwrap();
        let opts = SolverOptions::default();
        let (res, sol) = solve_maxmin_with(&r, &wv, &opts).unwrap();
        let lp = ofdma_maxmin::build_maxmin_lp(&r, &wv).unwrap();
        prop_assert_eq!(sol.status, LpStatus::Optimal);
        prop_assert!(lp.max_violation(&sol.primal) <= 1e-9);
        prop_assert!(rel_close(lp.dual_objective(&sol), sol.objective_value, 1e-8));
        let nonzero = sol.primal.iter().filter(|x| x.abs() > 1e-12).count();
        prop_assert!(nonzero <= lp.n_constraints());
        let (again, _) = solve_maxmin_with(&r, &wv, &opts).unwrap();
        prop_assert_eq!(res, again);
    }

    #[test]
    fn random_lp_strong_duality(
        a in prop::collection::vec(prop::collection::vec(0.0f64..5.0, 4), 3),
        b in prop::collection::vec(1.0f64..10.0, 3),
        c in prop::collection::vec(-2.0f64..5.0, 4),
    ) {
        // Nonnegative A with positive b keeps the packing LP bounded and feasible.
        let mut lp = LinearProgramF64::maximize(c);
        for (row, rhs) in a.into_iter().zip(b) {
            lp.add_constraint(row, Relation::Le, rhs);
        }
        for j in 0..4 {
            lp.set_bounds(j, 0.0, Some(10.0));
        }
        let sol = solve_lp(&lp).unwrap();
        prop_assert_eq!(sol.status, LpStatus::Optimal);
        prop_assert!(lp.max_violation(&sol.primal) <= 1e-9);
        prop_assert!(rel_close(lp.dual_objective(&sol), sol.objective_value, 1e-8));
    }
}
