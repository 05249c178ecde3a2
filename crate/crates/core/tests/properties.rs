use madbound::ambiguity::AmbiguitySet;
use madbound::estimate_from_samples;
use madbound::newsvendor::{order_interval_beta, order_interval_mad, NewsvendorInput};
use madbound::pricing::{mad_thresholds, optimal_price, worst_case_profit};
use madbound::stoploss::{reinsurer_benefit_bound, retention_bound, Layer};
use madbound::sums::{sum_tail_bound, MarginalSet};
use madbound::tail_bounds::{
    inf_tail, inf_tail_beta, inf_tail_by_reflection, mad_knots, markov_mad, sup_tail, sup_tail_beta,
};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

prop_compose! {
    /// Feasible set with `beta` in its feasible range.
    fn any_set()(
        a in -5.0..5.0f64,
        width in 0.5..20.0f64,
        m in 0.05..0.95f64,
        dfrac in 0.02..0.98f64,
        bfrac in 0.0..=1.0f64,
    ) -> AmbiguitySet {
        let b = a + width;
        let mu = a + width * m;
        let d = dfrac * 2.0 * (mu - a) * (b - mu) / width;
        let lo = d / (2.0 * (b - mu));
        let hi = 1.0 - d / (2.0 * (mu - a));
        AmbiguitySet { a, b, mu, d, beta: Some(lo + bfrac * (hi - lo)) }
    }
}

fn at(set: &AmbiguitySet, frac: f64) -> f64 {
    set.a + frac * set.width()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn bounds_are_ordered_and_beta_nests(set in any_set(), f in 0.0..=1.0f64) {
        let t = at(&set, f);
        let plain = set.without_beta();
        let lo = inf_tail(&plain, t).unwrap().value;
        let hi = sup_tail(&plain, t).unwrap().value;
        let lo_b = inf_tail_beta(&set, t).unwrap().value;
        let hi_b = sup_tail_beta(&set, t).unwrap().value;
        prop_assert!((0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi));
        prop_assert!(lo <= hi + TOL);
        prop_assert!(lo <= lo_b + TOL, "{lo} > {lo_b}");
        prop_assert!(hi_b <= hi + TOL, "{hi_b} > {hi}");
        prop_assert!(lo_b <= hi_b + TOL);
    }

    #[test]
    fn bounds_are_monotone_in_t(set in any_set(), f in 0.0..0.99f64, step in 0.0..0.01f64) {
        let plain = set.without_beta();
        let (t0, t1) = (at(&set, f), at(&set, f + step));
        prop_assert!(sup_tail(&plain, t1).unwrap().value <= sup_tail(&plain, t0).unwrap().value + TOL);
        prop_assert!(inf_tail(&plain, t1).unwrap().value <= inf_tail(&plain, t0).unwrap().value + TOL);
    }

    #[test]
    fn reflection_reproduces_lower_bound(set in any_set(), f in 0.0..=1.0f64) {
        let plain = set.without_beta();
        let t = at(&set, f);
        let direct = inf_tail(&plain, t).unwrap().value;
        prop_assert!((inf_tail_by_reflection(&plain, t).unwrap() - direct).abs() <= 1e-12);
    }

    #[test]
    fn beta_jumps_vanish_at_the_ends_of_the_beta_range(set in any_set()) {
        // All lower mass at a: nothing can move just below the mean.
        let top = AmbiguitySet { beta: Some(1.0 - set.d / (2.0 * (set.mu - set.a))), ..set };
        // All upper mass at b: nothing can sit just above the mean.
        let bottom = AmbiguitySet { beta: Some(set.d / (2.0 * (set.b - set.mu))), ..set };
        let h = 1e-9 * set.width();
        let jump = |s: &AmbiguitySet, f: fn(&AmbiguitySet, f64) -> madbound::Result<madbound::tail_bounds::BoundValue>| {
            (f(s, set.mu - h).unwrap().value - f(s, set.mu + h).unwrap().value).abs()
        };
        prop_assert!(jump(&top, sup_tail_beta) < 1e-6, "sup jump {}", jump(&top, sup_tail_beta));
        prop_assert!(jump(&bottom, inf_tail_beta) < 1e-6, "inf jump {}", jump(&bottom, inf_tail_beta));
    }

    #[test]
    fn knots_bracket_the_mean(set in any_set()) {
        let k = mad_knots(&set.without_beta()).unwrap();
        prop_assert!(set.a <= k.tau1 && k.tau1 <= set.mu && set.mu <= k.tau2 && k.tau2 <= set.b);
    }

    #[test]
    fn sup_tail_peaks_at_markov_mad(set in any_set(), f in 0.05..=1.0f64) {
        let plain = set.without_beta();
        let t = set.mu + f * (set.b - set.mu);
        let peak = markov_mad(set.mu, set.a, t).min(plain.d_max());
        let v = |d: f64| sup_tail(&AmbiguitySet { d, ..plain }, t).unwrap().value;
        prop_assert!(v(peak * 0.5) <= v(peak) + TOL);
        prop_assert!(v(plain.d_max()) <= v(peak) + TOL);
        prop_assert!((v(peak) - (set.mu - set.a) / (t - set.a)).abs() <= 1e-9 || peak < markov_mad(set.mu, set.a, t));
    }

    #[test]
    fn newsvendor_intervals(set in any_set(), e0 in 0.01..0.99f64, de in 0.0..0.2f64) {
        let e1 = (e0 + de).min(0.99);
        let plain = set.without_beta();
        let i0 = order_interval_mad(&NewsvendorInput::new(&plain, e0).unwrap()).unwrap();
        let i1 = order_interval_mad(&NewsvendorInput::new(&plain, e1).unwrap()).unwrap();
        prop_assert!(i0.lo <= i1.lo + TOL && i0.hi <= i1.hi + TOL);
        prop_assert!(set.a - TOL <= i0.lo && i0.lo <= i0.hi + TOL && i0.hi <= set.b + TOL);
        let ib = order_interval_beta(&NewsvendorInput::new(&set, e0).unwrap()).unwrap();
        prop_assert!(i0.lo <= ib.lo + TOL && ib.hi <= i0.hi + TOL, "{ib:?} not in {i0:?}");
        // Quantile inversion: the interval ends bracket the critical tail level.
        prop_assert!(inf_tail(&plain, i0.hi).unwrap().value <= 1.0 - e0 + TOL);
        if i0.lo > set.a {
            prop_assert!(sup_tail(&plain, i0.lo).unwrap().value >= 1.0 - e0 - TOL);
        }
    }

    #[test]
    fn stoploss_bounds_are_sane(set in any_set(), f in 0.0..=1.0f64, cap in 0.01..1.0f64) {
        let plain = set.without_beta();
        let shift = plain.a;
        let s = AmbiguitySet { a: 0.0, b: plain.b - shift, mu: plain.mu - shift, ..plain };
        let z = f * s.b;
        let m = cap * s.b;
        let r = retention_bound(&s, z).unwrap();
        prop_assert!(r <= z.min(s.mu) + TOL && r >= -TOL);
        let layer = reinsurer_benefit_bound(&s, Layer::new(z, Some(m)).unwrap()).unwrap();
        prop_assert!(-TOL <= layer && layer <= m.min(s.mu) + TOL);
        let open = reinsurer_benefit_bound(&s, Layer::unlimited(z)).unwrap();
        prop_assert!(layer <= open + TOL);
        // E[min(S,z)] + E[(S-z)+] = mu, so the two worst cases cover the mean.
        prop_assert!(r + open >= s.mu - TOL);
    }

    #[test]
    fn price_beats_a_grid(b in 0.5..5.0f64, m in 0.1..0.9f64, dfrac in 0.0..1.0f64) {
        let mu = b * m;
        let set = AmbiguitySet::new(0.0, b, mu, dfrac * 2.0 * mu * (b - mu) / b).unwrap();
        let sol = optimal_price(&set).unwrap();
        let best = (0..=2000)
            .map(|i| worst_case_profit(&set, (b * i as f64 / 2000.0).min(b)).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(best <= sol.profit + 1e-6, "grid {best} beats {}", sol.profit);
        prop_assert!((worst_case_profit(&set, sol.r_star).unwrap() - sol.profit).abs() <= 1e-12);
    }

    #[test]
    fn sum_bound_grows_with_d_hat(set in any_set(), n in 2usize..5, f in 0.0..=1.0f64, lo in 0.0..1.0f64) {
        let s = set.without_beta();
        let m = AmbiguitySet { a: 0.0, b: s.b - s.a, mu: s.mu - s.a, ..s };
        let marg = MarginalSet::new(vec![m; n]).unwrap();
        let t = f * marg.b_bar();
        let d0 = lo * marg.d_bar();
        let v0 = sum_tail_bound(&marg.clone().with_d_hat(d0).unwrap(), t).unwrap();
        let v1 = sum_tail_bound(&marg, t).unwrap();
        prop_assert!(v0 <= v1 + TOL);
    }

    #[test]
    fn sample_is_a_member_of_its_set(values in prop::collection::vec(-10.0..10.0f64, 2..60)) {
        prop_assume!(values.iter().any(|&v| v != values[0]));
        let (set, _) = estimate_from_samples(&values, None).unwrap();
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let mad = values.iter().map(|v| (v - set.mu).abs()).sum::<f64>() / n;
        let beta = values.iter().filter(|&&v| v >= set.mu).count() as f64 / n;
        prop_assert!((mean - set.mu).abs() <= 1e-12 * (1.0 + mean.abs()));
        prop_assert!((mad - set.d).abs() <= 1e-12);
        prop_assert_eq!(set.beta, Some(beta));
        prop_assert!(set.validate().is_ok());
        let (shifted, _) = set.shift_to_zero();
        prop_assert!(shifted.validate().is_ok());
    }
}

#[test]
fn price_shape_in_d() {
    for (mu, b) in [(0.5, 1.0), (1.0, 3.0), (2.0, 5.0)] {
        let th = mad_thresholds(mu, b).unwrap();
        let prices: Vec<(f64, f64)> = (1..200)
            .map(|i| th.d_max * i as f64 / 200.0)
            .map(|d| (d, optimal_price(&AmbiguitySet::new(0.0, b, mu, d).unwrap()).unwrap().r_star))
            .collect();
        for w in prices.windows(2) {
            let ((d0, r0), (d1, r1)) = (w[0], w[1]);
            if d1 <= th.d1 {
                assert!(r1 <= r0 + 1e-12, "price rises before d1 at mu={mu} b={b} d={d1}");
            } else if d0 >= th.d1 && d1 <= th.d2 {
                assert!((r1 - mu).abs() < 1e-12, "price is not the mean between d1 and d2");
            } else if d0 >= th.d2 {
                assert!(r1 >= r0 - 1e-12, "price falls after d2 at mu={mu} b={b} d={d1}");
            }
        }
    }
}

#[test]
fn finite_support_tends_to_the_unbounded_intervals() {
    for beta in [None, Some(0.5)] {
        for eta in [0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99] {
            let far = match beta {
                Some(beta) => AmbiguitySet::with_beta(0.0, 1e7, 5.0, 1.5, beta),
                None => AmbiguitySet::new(0.0, 1e7, 5.0, 1.5),
            }
            .unwrap();
            let finite = NewsvendorInput::new(&far, eta).unwrap();
            let open = NewsvendorInput::unbounded(0.0, 5.0, 1.5, beta, eta).unwrap();
            let (f, o) = match beta {
                Some(_) => (order_interval_beta(&finite).unwrap(), order_interval_beta(&open).unwrap()),
                None => (order_interval_mad(&finite).unwrap(), order_interval_mad(&open).unwrap()),
            };
            assert!((f.lo - o.lo).abs() < 1e-4 && (f.hi - o.hi).abs() < 1e-4, "eta={eta} beta={beta:?}: {f:?} vs {o:?}");
        }
    }
}
