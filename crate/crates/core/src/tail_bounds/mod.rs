//! Tight upper and lower tail bounds over mean-MAD(-β) ambiguity sets.
//!
//! Every bound is piecewise on four regions of `[a, b]` split by the knots
//! `tau1 <= mu <= tau2`. Evaluation happens in shifted coordinates
//! (`a = 0`) and knots are reported in the original ones.

mod compare;
mod curve;
mod extremal;

pub use compare::{
    cantelli, cantelli_thresholds, de_schepper_inf, de_schepper_sup, sigma_range,
    sup_tail_ineq_mad, CantelliThresholds,
};
pub use curve::{curve, linspace, BoundCurve, BoundKind, CurvePoint};
pub use extremal::{worst_case_distribution, Atom, DiscreteDistribution, FreeRegion, Mode};

use serde::{Deserialize, Serialize};

use crate::ambiguity::AmbiguitySet;
use crate::error::{Error, Result};

/// Region of `[a, b]` a threshold falls into. Regions are left-closed and
/// the first matching region wins at a knot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    BelowTau1,
    Tau1ToMu,
    MuToTau2,
    Tau2ToB,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Knots {
    pub tau1: f64,
    pub tau2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub value: f64,
    pub branch: Branch,
    pub tau1: f64,
    pub tau2: f64,
}

/// Set parameters after moving `a` to zero.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Shifted {
    pub m: f64,
    pub w: f64,
    pub d: f64,
}

impl Shifted {
    pub(crate) fn of(set: &AmbiguitySet) -> Self {
        Shifted { m: set.mu - set.a, w: set.b - set.a, d: set.d }
    }

    pub(crate) fn is_point_mass(&self) -> bool {
        self.d <= 0.0 || self.m <= 0.0 || self.m >= self.w
    }

    /// Knots of the plain mean-MAD bounds.
    pub(crate) fn knots(&self) -> (f64, f64) {
        let Shifted { m, w, d } = *self;
        if self.is_point_mass() {
            return (m, m);
        }
        let tau1 = m - d * (w - m) / (2.0 * (w - m) - d);
        let tau2 = m + d * m / (2.0 * m - d);
        (tau1.max(0.0), tau2.min(w))
    }

    pub(crate) fn beta_knots(&self, beta: f64) -> (f64, f64) {
        let Shifted { m, w, d } = *self;
        if self.is_point_mass() {
            return (m, m);
        }
        let tau1 = m - d / (2.0 * (1.0 - beta));
        let tau2 = m + d / (2.0 * beta);
        (tau1.max(0.0), tau2.min(w))
    }

    /// `sup P(X >= s)` at shifted threshold `s`.
    pub(crate) fn sup_tail(&self, s: f64) -> (f64, Branch) {
        let Shifted { m, w, d } = *self;
        if self.is_point_mass() {
            return if s <= m { (1.0, Branch::BelowTau1) } else { (0.0, Branch::Tau2ToB) };
        }
        let (tau1, tau2) = self.knots();
        let (v, br) = if s <= tau1 || s <= 0.0 {
            (1.0, Branch::BelowTau1)
        } else if s <= m {
            (m / s - d * (w - s) / (2.0 * s * (w - m)), Branch::Tau1ToMu)
        } else if s <= tau2 {
            (1.0 - d / (2.0 * m), Branch::MuToTau2)
        } else {
            (d / (2.0 * (s - m)), Branch::Tau2ToB)
        };
        (v.clamp(0.0, 1.0), br)
    }

    /// `inf P(X > s)` at shifted threshold `s`.
    pub(crate) fn inf_tail(&self, s: f64) -> (f64, Branch) {
        let Shifted { m, w, d } = *self;
        if self.is_point_mass() {
            return if s < m { (1.0, Branch::BelowTau1) } else { (0.0, Branch::Tau2ToB) };
        }
        let (tau1, tau2) = self.knots();
        let (v, br) = if s <= tau1 && s < m {
            (1.0 - d / (2.0 * (m - s)), Branch::BelowTau1)
        } else if s <= m {
            (d / (2.0 * (w - m)), Branch::Tau1ToMu)
        } else if s <= tau2 {
            let v = if s >= w {
                // P(X > b) = 0 even when tau2 reaches b.
                0.0
            } else {
                (m - s) / (w - s) + d * s / (2.0 * m * (w - s))
            };
            (v, Branch::MuToTau2)
        } else {
            (0.0, Branch::Tau2ToB)
        };
        (v.clamp(0.0, 1.0), br)
    }

    pub(crate) fn sup_tail_beta(&self, beta: f64, s: f64) -> (f64, Branch) {
        let Shifted { m, d, .. } = *self;
        if self.is_point_mass() {
            return self.sup_tail(s);
        }
        let (tau1, tau2) = self.beta_knots(beta);
        let (v, br) = if s <= tau1 || s <= 0.0 {
            (1.0, Branch::BelowTau1)
        } else if s < m {
            (((1.0 - beta) * m + beta * s - d / 2.0) / s, Branch::Tau1ToMu)
        } else if s <= tau2 {
            (beta, Branch::MuToTau2)
        } else {
            (d / (2.0 * (s - m)), Branch::Tau2ToB)
        };
        (v.clamp(0.0, 1.0), br)
    }

    pub(crate) fn inf_tail_beta(&self, beta: f64, s: f64) -> (f64, Branch) {
        let Shifted { m, w, d } = *self;
        if self.is_point_mass() {
            return self.inf_tail(s);
        }
        let (tau1, tau2) = self.beta_knots(beta);
        let (v, br) = if s <= tau1 && s < m {
            (1.0 - d / (2.0 * (m - s)), Branch::BelowTau1)
        } else if s < m {
            (beta, Branch::Tau1ToMu)
        } else if s <= tau2 {
            let v = if s >= w { 0.0 } else { (beta * (m - s) + d / 2.0) / (w - s) };
            (v, Branch::MuToTau2)
        } else {
            (0.0, Branch::Tau2ToB)
        };
        (v.clamp(0.0, 1.0), br)
    }
}

fn prepare(set: &AmbiguitySet, t: f64) -> Result<Shifted> {
    set.validate()?;
    set.check_threshold(t)?;
    Ok(Shifted::of(set))
}

fn report(set: &AmbiguitySet, (value, branch): (f64, Branch), (k1, k2): (f64, f64)) -> BoundValue {
    BoundValue { value, branch, tau1: set.a + k1, tau2: set.a + k2 }
}

/// Knots of the mean-MAD bounds in original coordinates.
pub fn mad_knots(set: &AmbiguitySet) -> Result<Knots> {
    set.validate()?;
    let (k1, k2) = Shifted::of(set).knots();
    Ok(Knots { tau1: set.a + k1, tau2: set.a + k2 })
}

/// Knots of the mean-MAD-β bounds in original coordinates.
pub fn beta_knots(set: &AmbiguitySet) -> Result<Knots> {
    set.validate()?;
    let beta = set.require_beta()?;
    let (k1, k2) = Shifted::of(set).beta_knots(beta);
    Ok(Knots { tau1: set.a + k1, tau2: set.a + k2 })
}

/// Tight upper bound on `P(X >= t)` (equally `P(X > t)`). A `beta` on the
/// set is ignored.
pub fn sup_tail(set: &AmbiguitySet, t: f64) -> Result<BoundValue> {
    let sh = prepare(&set.without_beta(), t)?;
    Ok(report(set, sh.sup_tail(t - set.a), sh.knots()))
}

/// Tight lower bound on `P(X > t)`. A `beta` on the set is ignored.
pub fn inf_tail(set: &AmbiguitySet, t: f64) -> Result<BoundValue> {
    let sh = prepare(&set.without_beta(), t)?;
    Ok(report(set, sh.inf_tail(t - set.a), sh.knots()))
}

/// Tight upper bound on `P(X >= t)` given `beta = P(X >= mu)`.
pub fn sup_tail_beta(set: &AmbiguitySet, t: f64) -> Result<BoundValue> {
    let beta = set.require_beta()?;
    let sh = prepare(set, t)?;
    Ok(report(set, sh.sup_tail_beta(beta, t - set.a), sh.beta_knots(beta)))
}

/// Tight lower bound on `P(X > t)` given `beta = P(X >= mu)`.
pub fn inf_tail_beta(set: &AmbiguitySet, t: f64) -> Result<BoundValue> {
    let beta = set.require_beta()?;
    let sh = prepare(set, t)?;
    Ok(report(set, sh.inf_tail_beta(beta, t - set.a), sh.beta_knots(beta)))
}

/// `inf P(X > t)` computed through the mirrored set:
/// `1 - sup P(X' >= 2 mu - t)` with `X' = 2 mu - X`.
pub fn inf_tail_by_reflection(set: &AmbiguitySet, t: f64) -> Result<f64> {
    prepare(&set.without_beta(), t)?;
    let mirrored = set.reflect();
    let s = (2.0 * set.mu - t).clamp(mirrored.a, mirrored.b);
    let (v, _) = Shifted::of(&mirrored).sup_tail(s - mirrored.a);
    Ok(1.0 - v)
}

/// MAD at which the upper bound at `t > mu` is largest; the bound there
/// equals Markov's `(mu - a) / (t - a)`.
pub fn markov_mad(mu: f64, a: f64, t: f64) -> f64 {
    2.0 * (mu - a) * (t - mu) / (t - a)
}

/// Upper bound at the Markov-maximising MAD. Equals `(mu - a) / (t - a)`.
pub fn markov_consistency(mu: f64, a: f64, b: f64, t: f64) -> Result<f64> {
    if !(a < mu && mu < b) {
        return Err(Error::InvalidInput(format!("need a < mu < b, got a={a} mu={mu} b={b}")));
    }
    if !(t > mu && t <= b) {
        return Err(Error::OutOfRange { name: "t", value: t, lo: mu, hi: b });
    }
    let set = AmbiguitySet { a, b, mu, d: markov_mad(mu, a, t), beta: None };
    Ok(sup_tail(&set, t)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn fig3() -> AmbiguitySet {
        AmbiguitySet::with_beta(0.0, 1.0, 0.5, 0.1875, 0.5).unwrap()
    }

    #[test]
    fn sup_examples() {
        let set = fig3();
        assert_abs_diff_eq!(sup_tail(&set, 0.5).unwrap().value, 0.8125, epsilon = 1e-15);
        assert_abs_diff_eq!(sup_tail(&set, 0.8).unwrap().value, 0.3125, epsilon = 1e-15);
        let v = sup_tail(&set, 0.4).unwrap();
        assert_abs_diff_eq!(v.value, 0.96875, epsilon = 1e-15);
        assert_eq!(v.branch, Branch::Tau1ToMu);
        assert_abs_diff_eq!(v.tau1, 0.384615384615384, epsilon = 1e-12);
    }

    #[test]
    fn inf_examples() {
        let set = fig3();
        assert_abs_diff_eq!(inf_tail(&set, 0.3).unwrap().value, 0.53125, epsilon = 1e-15);
        assert_abs_diff_eq!(inf_tail(&set, 0.5).unwrap().value, 0.1875, epsilon = 1e-15);
        assert_eq!(inf_tail(&set, 0.8).unwrap().value, 0.0);
    }

    #[test]
    fn beta_examples() {
        let set = fig3();
        assert_abs_diff_eq!(sup_tail_beta(&set, 0.5).unwrap().value, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(sup_tail_beta(&set, 0.4).unwrap().value, 0.890625, epsilon = 1e-15);
        assert_abs_diff_eq!(sup_tail_beta(&set, 0.8).unwrap().value, 0.3125, epsilon = 1e-15);
        assert_abs_diff_eq!(inf_tail_beta(&set, 0.4).unwrap().value, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(inf_tail_beta(&set, 0.6).unwrap().value, 0.109375, epsilon = 1e-15);
        assert_abs_diff_eq!(inf_tail_beta(&set, 0.2).unwrap().value, 0.6875, epsilon = 1e-15);
    }

    #[test]
    fn point_mass() {
        let set = AmbiguitySet::new(0.0, 2.0, 1.0, 0.0).unwrap();
        assert_eq!(sup_tail(&set, 1.0).unwrap().value, 1.0);
        assert_eq!(sup_tail(&set, 1.0 + 1e-9).unwrap().value, 0.0);
        assert_eq!(inf_tail(&set, 0.5).unwrap().value, 1.0);
        assert_eq!(inf_tail(&set, 1.0).unwrap().value, 0.0);
    }

    #[test]
    fn rejects_bad_threshold_and_missing_beta() {
        let set = fig3();
        assert!(sup_tail(&set, 1.5).is_err());
        assert!(sup_tail_beta(&set.without_beta(), 0.5).is_err());
    }

    #[test]
    fn inf_at_upper_end_is_zero_at_d_max() {
        let set = AmbiguitySet::new(0.0, 1.0, 0.5, 0.5).unwrap();
        assert_eq!(inf_tail(&set, 1.0).unwrap().value, 0.0);
        assert_abs_diff_eq!(inf_tail(&set, 0.999999).unwrap().value, 0.5, epsilon = 1e-5);
    }

    #[test]
    fn shifted_support_matches_translation() {
        let set = AmbiguitySet::new(-1.0, 1.0, 0.0, 0.25).unwrap();
        let (shifted, off) = set.shift_to_zero();
        for &t in &[-1.0, -0.5, -0.1, 0.0, 0.3, 0.9, 1.0] {
            assert_eq!(sup_tail(&set, t).unwrap().value, sup_tail(&shifted, t - off).unwrap().value);
            assert_eq!(inf_tail(&set, t).unwrap().value, inf_tail(&shifted, t - off).unwrap().value);
        }
    }

    #[test]
    fn markov_examples() {
        assert_abs_diff_eq!(markov_consistency(0.5, 0.0, 1.0, 0.8).unwrap(), 0.625, epsilon = 1e-15);
        assert_abs_diff_eq!(markov_consistency(1.0, 0.0, 3.0, 2.0).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(markov_consistency(1.0, 0.0, 3.0, 3.0).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
    }
}
