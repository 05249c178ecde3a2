//! Mean-MAD(-β) ambiguity sets on a bounded support.
//!
//! An [`AmbiguitySet`] stands for every distribution on `[a, b]` with mean
//! `mu`, mean absolute deviation `d` and, optionally, `P(X >= mu) = beta`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{Error, Result};

/// Absolute slack used by every feasibility comparison.
pub const DEFAULT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmbiguitySet {
    pub a: f64,
    pub b: f64,
    pub mu: f64,
    pub d: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
}

/// First invariant an [`AmbiguitySet`] fails.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum Violation {
    #[error("non-finite parameter")]
    NonFinite,
    #[error("empty support: a = {a} is not below b = {b}")]
    EmptySupport { a: f64, b: f64 },
    #[error("mean {mu} outside support [{a}, {b}]")]
    MeanOutsideSupport { mu: f64, a: f64, b: f64 },
    #[error("negative MAD d = {d}")]
    NegativeMad { d: f64 },
    #[error("mean at support boundary requires d = 0, got {d}")]
    BoundaryMean { d: f64 },
    #[error("d = {d} exceeds d_max = {d_max}")]
    MadTooLarge { d: f64, d_max: f64 },
    #[error("beta = {beta} outside [0, 1]")]
    BetaOutOfRange { beta: f64 },
    #[error("d = {d} exceeds 2*beta*(b - mu) = {limit}")]
    BetaUpperSide { d: f64, limit: f64 },
    #[error("d = {d} exceeds 2*(1 - beta)*(mu - a) = {limit}")]
    BetaLowerSide { d: f64, limit: f64 },
    #[error("d = 0 forces beta = 1, got {beta}")]
    BetaPointMass { beta: f64 },
}

impl AmbiguitySet {
    /// Validated constructor without `beta`.
    pub fn new(a: f64, b: f64, mu: f64, d: f64) -> Result<Self> {
        let set = AmbiguitySet { a, b, mu, d, beta: None };
        set.validate()?;
        Ok(set)
    }

    /// Validated constructor with `beta`.
    pub fn with_beta(a: f64, b: f64, mu: f64, d: f64, beta: f64) -> Result<Self> {
        let set = AmbiguitySet { a, b, mu, d, beta: Some(beta) };
        set.validate()?;
        Ok(set)
    }

    /// Same set with the `beta` constraint dropped.
    pub fn without_beta(&self) -> Self {
        AmbiguitySet { beta: None, ..*self }
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    /// Largest MAD attainable with this support and mean.
    pub fn d_max(&self) -> f64 {
        2.0 * (self.mu - self.a) * (self.b - self.mu) / (self.b - self.a)
    }

    pub fn validate(&self) -> std::result::Result<(), Violation> {
        self.validate_with_tol(DEFAULT_TOL)
    }

    pub fn validate_with_tol(&self, tol: f64) -> std::result::Result<(), Violation> {
        let AmbiguitySet { a, b, mu, d, beta } = *self;
        if ![a, b, mu, d].iter().all(|v| v.is_finite()) || beta.is_some_and(|p| !p.is_finite()) {
            return Err(Violation::NonFinite);
        }
        if a >= b {
            return Err(Violation::EmptySupport { a, b });
        }
        if mu < a - tol || mu > b + tol {
            return Err(Violation::MeanOutsideSupport { mu, a, b });
        }
        if d < -tol {
            return Err(Violation::NegativeMad { d });
        }
        if (mu <= a || mu >= b) && d > tol {
            return Err(Violation::BoundaryMean { d });
        }
        let d_max = self.d_max();
        if d > d_max + tol {
            return Err(Violation::MadTooLarge { d, d_max });
        }
        if let Some(beta) = beta {
            if !(-tol..=1.0 + tol).contains(&beta) {
                return Err(Violation::BetaOutOfRange { beta });
            }
            let upper = 2.0 * beta * (b - mu);
            if d > upper + tol {
                return Err(Violation::BetaUpperSide { d, limit: upper });
            }
            let lower = 2.0 * (1.0 - beta) * (mu - a);
            if d > lower + tol {
                return Err(Violation::BetaLowerSide { d, limit: lower });
            }
            if d <= tol && beta < 1.0 - tol {
                return Err(Violation::BetaPointMass { beta });
            }
        }
        Ok(())
    }

    /// Translate the support to start at zero. Returns the shifted set and
    /// the offset `a` that was removed.
    pub fn shift_to_zero(&self) -> (AmbiguitySet, f64) {
        let shifted = AmbiguitySet {
            a: 0.0,
            b: self.b - self.a,
            mu: self.mu - self.a,
            d: self.d,
            beta: self.beta,
        };
        (shifted, self.a)
    }

    /// Mirror image under `x -> 2*mu - x`. `beta` is dropped because the
    /// mirrored event `X <= mu` is not determined by `beta` alone.
    pub fn reflect(&self) -> AmbiguitySet {
        AmbiguitySet {
            a: 2.0 * self.mu - self.b,
            b: 2.0 * self.mu - self.a,
            mu: self.mu,
            d: self.d,
            beta: None,
        }
    }

    pub(crate) fn require_beta(&self) -> Result<f64> {
        self.beta
            .ok_or_else(|| Error::InvalidInput("beta is required for this bound".into()))
    }

    pub(crate) fn check_threshold(&self, t: f64) -> Result<()> {
        crate::error::check_range("t", t, self.a, self.b)
    }
}

/// Summary statistics of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleMoments {
    pub n: usize,
    pub mean: f64,
    pub mad: f64,
    pub beta_hat: f64,
    pub min: f64,
    pub max: f64,
}

/// Fit an ambiguity set to a sample. The support is the sample range unless
/// `support` overrides it; the override must contain every value.
pub fn estimate_from_samples(
    values: &[f64],
    support: Option<(f64, f64)>,
) -> Result<(AmbiguitySet, SampleMoments)> {
    if values.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 values, got {}",
            values.len()
        )));
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("value {} is not finite", i + 1)));
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let n = values.len();

    let mean = if min == max {
        min
    } else {
        (values.iter().sum::<f64>() / n as f64).clamp(min, max)
    };
    let mad = values.iter().map(|v| (v - mean).abs()).sum::<f64>() / n as f64;
    let beta_hat = values.iter().filter(|&&v| v >= mean).count() as f64 / n as f64;

    let (a, b) = match support {
        Some((a, b)) => {
            if !(a < b) {
                return Err(Error::InvalidInput(format!("support override [{a}, {b}] is empty")));
            }
            if let Some(i) = values.iter().position(|&v| v < a || v > b) {
                return Err(Error::InvalidInput(format!(
                    "value {} at position {} lies outside support override [{a}, {b}]",
                    values[i],
                    i + 1
                )));
            }
            (a, b)
        }
        None if min == max => {
            return Err(Error::InvalidInput(
                "constant sample: a support override is required".into(),
            ))
        }
        None => (min, max),
    };

    let set = AmbiguitySet { a, b, mu: mean, d: mad, beta: Some(beta_hat) };
    // Rounding in the mean scales with the magnitude of the data.
    let scale = values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    set.validate_with_tol(DEFAULT_TOL * scale)?;
    let moments = SampleMoments { n, mean, mad, beta_hat, min, max };
    Ok((set, moments))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_examples() {
        assert!(AmbiguitySet::with_beta(0.0, 1.0, 0.5, 0.1875, 0.5).is_ok());
        let err = AmbiguitySet::new(0.0, 1.0, 0.5, 0.6).unwrap_err();
        assert_eq!(
            err,
            Error::InvalidSet(Violation::MadTooLarge { d: 0.6, d_max: 0.5 })
        );
        assert!(AmbiguitySet::new(0.0, 1.0, 1.0, 0.0).is_ok());
    }

    #[test]
    fn boundary_mean_needs_zero_mad() {
        let set = AmbiguitySet { a: 0.0, b: 1.0, mu: 1.0, d: 0.1, beta: None };
        assert_eq!(set.validate(), Err(Violation::BoundaryMean { d: 0.1 }));
    }

    #[test]
    fn beta_sides() {
        let set = AmbiguitySet { a: 0.0, b: 1.0, mu: 0.5, d: 0.3, beta: Some(0.2) };
        assert!(matches!(set.validate(), Err(Violation::BetaUpperSide { .. })));
        let set = AmbiguitySet { beta: Some(0.8), ..set };
        assert!(matches!(set.validate(), Err(Violation::BetaLowerSide { .. })));
        let set = AmbiguitySet { d: 0.0, beta: Some(0.5), ..set };
        assert!(matches!(set.validate(), Err(Violation::BetaPointMass { .. })));
    }

    #[test]
    fn estimate_two_point() {
        let (set, m) = estimate_from_samples(&[0.0, 1.0], None).unwrap();
        assert_eq!((set.a, set.b, set.mu, set.d, set.beta), (0.0, 1.0, 0.5, 0.5, Some(0.5)));
        assert_eq!(m.n, 2);
    }

    #[test]
    fn estimate_skewed() {
        let (set, _) = estimate_from_samples(&[0.0, 0.0, 0.0, 1.0], None).unwrap();
        assert_eq!(set.mu, 0.25);
        assert_eq!(set.d, 0.375);
        assert_eq!(set.beta, Some(0.25));
    }

    #[test]
    fn estimate_constant() {
        assert!(estimate_from_samples(&[2.0; 4], None).is_err());
        let (set, _) = estimate_from_samples(&[2.0; 4], Some((0.0, 5.0))).unwrap();
        assert_eq!((set.mu, set.d, set.beta), (2.0, 0.0, Some(1.0)));
    }

    #[test]
    fn estimate_rejects_bad_input() {
        assert!(estimate_from_samples(&[1.0], None).is_err());
        assert!(estimate_from_samples(&[0.0, 3.0], Some((0.0, 2.0))).is_err());
    }

    #[test]
    fn shift_examples() {
        let set = AmbiguitySet::new(-1.0, 1.0, 0.0, 0.25).unwrap();
        let (s, off) = set.shift_to_zero();
        assert_eq!((s.a, s.b, s.mu, s.d, off), (0.0, 2.0, 1.0, 0.25, -1.0));

        let set = AmbiguitySet::new(3.0, 6.0, 4.0, 0.25).unwrap();
        let (s, off) = set.shift_to_zero();
        assert_eq!((s.a, s.b, s.mu, s.d, off), (0.0, 3.0, 1.0, 0.25, 3.0));

        let set = AmbiguitySet::new(0.0, 1.0, 0.5, 0.1).unwrap();
        assert_eq!(set.shift_to_zero(), (set, 0.0));
    }
}
