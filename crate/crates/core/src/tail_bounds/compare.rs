//! Classical bounds used as points of comparison: Cantelli's inequality,
//! the mean-variance-range bounds of De Schepper and Heijnen, and the
//! relaxed set where the MAD is only bounded above.

use serde::{Deserialize, Serialize};

use super::sup_tail;
use crate::ambiguity::AmbiguitySet;
use crate::error::{check_open, Error, Result};
use crate::interval::Interval;

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma.is_finite() && sigma > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("sigma must be positive, got {sigma}")))
    }
}

/// One-sided Chebyshev bound on `P(X >= t)` from mean and standard deviation.
pub fn cantelli(sigma: f64, mu: f64, t: f64) -> Result<f64> {
    check_sigma(sigma)?;
    if t <= mu {
        return Ok(1.0);
    }
    let s2 = sigma * sigma;
    Ok(s2 / (s2 + (t - mu) * (t - mu)))
}

fn check_schepper(mu: f64, b: f64, sigma: f64, t: f64) -> Result<()> {
    check_sigma(sigma)?;
    check_open("mu", mu, 0.0, b)?;
    crate::error::check_range("t", t, 0.0, b)
}

/// Tight upper bound on `P(X >= t)` over distributions on `[0, b]` with
/// mean `mu` and standard deviation `sigma`.
pub fn de_schepper_sup(mu: f64, b: f64, sigma: f64, t: f64) -> Result<f64> {
    check_schepper(mu, b, sigma, t)?;
    let s2 = sigma * sigma;
    let v = if t <= mu - s2 / (b - mu) {
        1.0
    } else if t <= mu + s2 / mu {
        1.0 - (s2 + (b - mu) * (t - mu)) / (b * t)
    } else {
        s2 / (s2 + (t - mu) * (t - mu))
    };
    Ok(v.clamp(0.0, 1.0))
}

/// Tight lower bound on `P(X >= t)` over distributions on `[0, b]` with
/// mean `mu` and standard deviation `sigma`.
pub fn de_schepper_inf(mu: f64, b: f64, sigma: f64, t: f64) -> Result<f64> {
    check_schepper(mu, b, sigma, t)?;
    let s2 = sigma * sigma;
    let v = if t <= mu - s2 / (b - mu) {
        (mu - t) * (mu - t) / ((mu - t) * (mu - t) + s2)
    } else if t <= mu + s2 / mu {
        (s2 + mu * (mu - t)) / (b * (b - t))
    } else {
        0.0
    };
    Ok(v.clamp(0.0, 1.0))
}

/// Thresholds splitting `t` into regions where the mean-MAD upper bound is
/// below Cantelli's: `[a, tau_hat]` and `[tau_low, tau_high]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CantelliThresholds {
    pub tau_hat: f64,
    pub tau_low: f64,
    pub tau_high: f64,
}

pub fn cantelli_thresholds(mu: f64, a: f64, b: f64, d: f64, sigma: f64) -> Result<CantelliThresholds> {
    check_sigma(sigma)?;
    AmbiguitySet::new(a, b, mu, d)?;
    if d <= 0.0 {
        return Err(Error::InvalidInput("thresholds need d > 0".into()));
    }
    let tau_hat = mu + (d * sigma * sigma / (2.0 * (mu - a) - d)).sqrt();
    let disc = sigma * sigma / (d * d) - 1.0;
    if disc < 0.0 {
        return Err(Error::SqrtDomain("cantelli_thresholds: sigma < d"));
    }
    let center = mu + sigma * sigma / d;
    let half = sigma * disc.sqrt();
    Ok(CantelliThresholds { tau_hat, tau_low: center - half, tau_high: (center + half).min(b) })
}

/// Range of the variance compatible with MAD `d` and `beta = P(X > mu)` on
/// a support of length `width`.
pub fn sigma_range(d: f64, width: f64, beta: f64) -> Result<Interval> {
    check_open("beta", beta, 0.0, 1.0)?;
    if !(d >= 0.0 && width > 0.0) {
        return Err(Error::InvalidInput(format!("need d >= 0 and width > 0, got d={d} width={width}")));
    }
    let lo = d * d / (4.0 * beta * (1.0 - beta));
    let hi = d * width / 2.0;
    if lo > hi {
        return Err(Error::Infeasible(format!("variance range [{lo}, {hi}] is empty")));
    }
    Ok(Interval::new(lo, hi))
}

/// Upper bound on `P(X >= t)` when the MAD is only known to be at most `d`.
pub fn sup_tail_ineq_mad(set: &AmbiguitySet, t: f64) -> Result<f64> {
    let set = set.without_beta();
    set.validate()?;
    set.check_threshold(t)?;
    if t <= set.mu {
        return Ok(1.0);
    }
    let d = set.d.min(super::markov_mad(set.mu, set.a, t));
    Ok(sup_tail(&AmbiguitySet { d, ..set }, t)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cantelli_meets_mad_bound() {
        assert_abs_diff_eq!(cantelli(0.25, 0.0, 0.25).unwrap(), 0.5, epsilon = 1e-15);
        assert_eq!(cantelli(0.25, 0.0, -0.5).unwrap(), 1.0);
        assert!(cantelli(0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn de_schepper_at_mean() {
        let (mu, b, d) = (1.0, 2.0, 0.25);
        let sigma = (d * b / 2.0_f64).sqrt();
        assert_abs_diff_eq!(de_schepper_sup(mu, b, sigma, mu).unwrap(), 1.0 - d / (2.0 * mu), epsilon = 1e-12);
    }

    #[test]
    fn de_schepper_branches_join() {
        let (mu, b, sigma) = (1.0_f64, 2.0, 0.4_f64);
        let s2 = sigma * sigma;
        for &k in &[mu - s2 / (b - mu), mu + s2 / mu] {
            let left = de_schepper_sup(mu, b, sigma, k - 1e-9).unwrap();
            let right = de_schepper_sup(mu, b, sigma, k + 1e-9).unwrap();
            assert_abs_diff_eq!(left, right, epsilon = 1e-7);
            let left = de_schepper_inf(mu, b, sigma, k - 1e-9).unwrap();
            let right = de_schepper_inf(mu, b, sigma, k + 1e-9).unwrap();
            assert_abs_diff_eq!(left, right, epsilon = 1e-7);
        }
    }

    #[test]
    fn sigma_range_example() {
        let r = sigma_range(0.25, 2.0, 0.5).unwrap();
        assert_abs_diff_eq!(r.lo, 0.0625, epsilon = 1e-15);
        assert_abs_diff_eq!(r.hi, 0.25, epsilon = 1e-15);
        assert!(r.lo.sqrt() >= 0.25 - 1e-15);
    }

    #[test]
    fn thresholds_need_sigma_at_least_d() {
        assert!(matches!(
            cantelli_thresholds(0.0, -1.0, 1.0, 0.25, 0.2),
            Err(Error::SqrtDomain(_))
        ));
        let th = cantelli_thresholds(0.0, -1.0, 1.0, 0.25, 0.27).unwrap();
        assert!(th.tau_hat < th.tau_low && th.tau_low < th.tau_high);
    }

    #[test]
    fn relaxed_set_is_one_below_mean() {
        let set = AmbiguitySet::new(0.0, 1.0, 0.5, 0.4).unwrap();
        assert_eq!(sup_tail_ineq_mad(&set, 0.3).unwrap(), 1.0);
        let t = 0.6;
        assert!(sup_tail_ineq_mad(&set, t).unwrap() >= sup_tail(&set, t).unwrap().value);
    }
}
