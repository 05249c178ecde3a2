mod common;

use madbound::lp_oracle::{
    default_grid, solve, verify_bound, BoundCheck, LpStatus, MomentLp, Objective, Sense, VerifyStatus,
};
use madbound::sums::{sum_tail_bound, MarginalSet};
use madbound::tail_bounds::{mad_knots, markov_mad, sup_tail_ineq_mad};
use madbound::AmbiguitySet;

#[test]
fn certificates_hold_on_random_instances() {
    let mut rng = common::rng(21);
    for i in 0..200 {
        let set = common::random_set(&mut rng);
        let set = if i % 2 == 0 { set } else { set.without_beta() };
        let t = common::uniform_in(&mut rng, set.a, set.b);
        for (objective, sense) in [
            (Objective::indicator_ge(t), Sense::Max),
            (Objective::indicator_gt(t), Sense::Min),
            (Objective::retained(t), Sense::Max),
        ] {
            let lp = MomentLp::new(&set, &objective, sense, 101).unwrap();
            let cert = solve(&lp).unwrap();
            assert_eq!(cert.status, LpStatus::Optimal, "{set:?}");
            assert!(cert.primal_residual(&lp) <= 1e-10, "primal residual {}", cert.primal_residual(&lp));
            assert!(cert.dual_feasibility_residual(&lp) <= 1e-9);
            match sense {
                Sense::Max => assert!(cert.duality_gap(&lp) >= -1e-9),
                Sense::Min => assert!(cert.duality_gap(&lp) <= 1e-9),
            }
            assert!((cert.primal.expect(|x| objective.eval(x)) - cert.optimal_value).abs() <= 1e-9);
        }
    }
}

#[test]
fn refining_the_grid_never_lowers_a_maximum() {
    let mut rng = common::rng(22);
    for _ in 0..50 {
        let set = common::random_set(&mut rng).without_beta();
        let t = common::uniform_in(&mut rng, set.a, set.b);
        let objective = Objective::retained(t);
        let coarse = default_grid(&set, &objective.breakpoints, 11);
        let mut fine = coarse.clone();
        fine.extend(default_grid(&set, &objective.breakpoints, 97));
        let value = |grid: Vec<f64>| solve(&MomentLp::on_grid(&set, &objective, Sense::Max, grid).unwrap()).unwrap().optimal_value;
        assert!(value(fine) >= value(coarse) - 1e-12);
    }
}

#[test]
fn layer_check_from_the_examples() {
    let set = AmbiguitySet::new(0.0, 20.0, 5.0, 1.77).unwrap();
    let rep = verify_bound(&set, 6.0, BoundCheck::Layer { cap: Some(3.0) }, 501).unwrap();
    assert_eq!(rep.status, VerifyStatus::Pass);
    assert!((rep.closed_form - 0.66375).abs() < 1e-12);
}

#[test]
fn uncapped_layer_and_retention_pass_on_shifted_sets() {
    let mut rng = common::rng(23);
    for _ in 0..50 {
        let set = common::random_set(&mut rng);
        let z = common::uniform_in(&mut rng, set.a, set.b);
        for check in [BoundCheck::Retention, BoundCheck::Layer { cap: None }] {
            let rep = verify_bound(&set, z, check, 501).unwrap();
            assert_eq!(rep.status, VerifyStatus::Pass, "{rep:?}");
        }
    }
}

/// Equal marginals summed comonotonically give every member of the scaled
/// set, so the aggregate bound dominates its single-variable bound (closed
/// form and LP alike), with equality once `t` is past the upper knot of the
/// scaled set at the Markov-capped MAD.
#[test]
fn equal_marginals_against_the_scaled_set() {
    let mut rng = common::rng(24);
    let mut equal_hits = 0;
    for _ in 0..200 {
        let n = 2 + (common::uniform_in(&mut rng, 0.0, 3.0) as usize);
        let b = common::uniform_in(&mut rng, 0.5, 10.0);
        let mu = b * common::uniform_in(&mut rng, 0.05, 0.95);
        let d = 2.0 * mu * (b - mu) / b * common::uniform_in(&mut rng, 0.02, 0.98);
        let m = AmbiguitySet::new(0.0, b, mu, d).unwrap();
        let marg = MarginalSet::new(vec![m; n]).unwrap();
        let k = n as f64;
        let scaled = AmbiguitySet::new(0.0, k * b, k * mu, k * d).unwrap();
        let t = common::uniform_in(&mut rng, k * mu, k * b);
        let bound = sum_tail_bound(&marg, t).unwrap();

        let relaxed = sup_tail_ineq_mad(&scaled, t).unwrap();
        let lp = solve(&MomentLp::new(&scaled, &Objective::indicator_ge(t), Sense::Max, 501).unwrap())
            .unwrap()
            .optimal_value;
        assert!(bound >= relaxed - 1e-9, "n={n} {m:?} t={t}: {bound} < {relaxed}");
        assert!(bound >= lp - 1e-6, "n={n} {m:?} t={t}: {bound} < lp {lp}");

        let d_eff = scaled.d.min(markov_mad(scaled.mu, 0.0, t));
        let capped = AmbiguitySet { d: d_eff, ..scaled };
        if t >= mad_knots(&capped).unwrap().tau2 {
            equal_hits += 1;
            assert!((bound - relaxed).abs() <= 1e-9, "n={n} {m:?} t={t}: {bound} vs {relaxed}");
        }
    }
    assert!(equal_hits > 20, "only {equal_hits} draws past the knot");
}
