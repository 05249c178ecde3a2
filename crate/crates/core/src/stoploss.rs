//! Stop-loss reinsurance: worst-case expected payments of the direct insurer
//! (who pays claims up to the retention `z`) and of the reinsurer (who pays
//! the excess over `z`, capped at `m`).
//!
//! Both payments are unchanged by translating the claim and the retention
//! together, so a support starting at `a != 0` is handled by shifting.

use serde::{Deserialize, Serialize};

use crate::ambiguity::AmbiguitySet;
use crate::error::{check_range, Error, Result};
use crate::tail_bounds::Shifted;

/// Reinsurance layer: retention `z` and an optional cap `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub retention: f64,
    pub cap: Option<f64>,
}

impl Layer {
    pub fn new(retention: f64, cap: Option<f64>) -> Result<Self> {
        if !retention.is_finite() {
            return Err(Error::InvalidInput(format!("retention must be finite, got {retention}")));
        }
        if let Some(m) = cap {
            if !(m > 0.0) || m.is_nan() {
                return Err(Error::InvalidInput(format!("cap must be positive, got {m}")));
            }
        }
        // An infinite cap is the same as none.
        let cap = cap.filter(|m| m.is_finite());
        Ok(Layer { retention, cap })
    }

    pub fn unlimited(retention: f64) -> Self {
        Layer { retention, cap: None }
    }
}

/// Upper bound on `E[min(S, z)]`.
pub fn retention_bound(set: &AmbiguitySet, z: f64) -> Result<f64> {
    let set = set.without_beta();
    set.validate()?;
    check_range("z", z, set.a, set.b)?;
    let sh = Shifted::of(&set);
    let Shifted { m: mu, w: b, d } = sh;
    let z = z - set.a;
    let v = if sh.is_point_mass() {
        z.min(mu)
    } else {
        let (tau1, tau2) = sh.knots();
        if z <= tau1 {
            z
        } else if z <= mu {
            mu - d * (b - z) / (2.0 * (b - mu))
        } else if z <= tau2 {
            z * (1.0 - d / (2.0 * mu))
        } else {
            mu
        }
    };
    Ok(set.a + v)
}

/// Upper bound on `E[min(max(S - z, 0), m)]`.
pub fn reinsurer_benefit_bound(set: &AmbiguitySet, layer: Layer) -> Result<f64> {
    let set = set.without_beta();
    set.validate()?;
    check_range("z", layer.retention, set.a, set.b)?;
    let sh = Shifted::of(&set);
    let Shifted { m: mu, w: b, d } = sh;
    let z = layer.retention - set.a;

    if sh.is_point_mass() {
        let excess = (mu - z).max(0.0);
        return Ok(layer.cap.map_or(excess, |m| excess.min(m)));
    }
    let uncapped = || {
        if z <= mu {
            z * (d / (2.0 * mu) - 1.0) + mu
        } else {
            d * (b - z) / (2.0 * (b - mu))
        }
    };
    let v = match layer.cap {
        Some(m) if z + m <= b => {
            if z + m <= mu {
                let s = z + m;
                m.min(m / s * (mu - d * (b - s) / (2.0 * (b - mu))))
            } else if z <= mu {
                (m * (1.0 - d / (2.0 * mu))).min(z * (d / (2.0 * mu) - 1.0) + mu)
            } else {
                (m * (1.0 - d / (2.0 * mu))).min(d * m / (2.0 * (m + z - mu)))
            }
        }
        _ => uncapped(),
    };
    Ok(v.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn set() -> AmbiguitySet {
        AmbiguitySet::new(0.0, 20.0, 5.0, 1.77).unwrap()
    }

    #[test]
    fn retention_examples() {
        assert_abs_diff_eq!(retention_bound(&set(), 4.0).unwrap(), 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(retention_bound(&set(), 4.5).unwrap(), 4.0855, epsilon = 1e-12);
        assert_abs_diff_eq!(retention_bound(&set(), 20.0).unwrap(), 5.0, epsilon = 1e-15);
    }

    #[test]
    fn layer_examples() {
        let v = reinsurer_benefit_bound(&set(), Layer::new(6.0, Some(3.0)).unwrap()).unwrap();
        assert_abs_diff_eq!(v, 0.66375, epsilon = 1e-12);
        let v = reinsurer_benefit_bound(&set(), Layer::new(3.0, Some(3.0)).unwrap()).unwrap();
        assert_abs_diff_eq!(v, 3.0 * (1.0 - 1.77 / 10.0), epsilon = 1e-12);
        assert_abs_diff_eq!(v, 2.469, epsilon = 1e-12);
    }

    #[test]
    fn uncapped_branches_agree_at_mean() {
        let left = reinsurer_benefit_bound(&set(), Layer::unlimited(5.0 - 1e-12)).unwrap();
        let right = reinsurer_benefit_bound(&set(), Layer::unlimited(5.0)).unwrap();
        assert_abs_diff_eq!(right, 1.77 / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(left, right, epsilon = 1e-11);
        let wide = reinsurer_benefit_bound(&set(), Layer::new(5.0, Some(100.0)).unwrap()).unwrap();
        assert_eq!(wide, right);
    }

    #[test]
    fn shifted_support_is_translation() {
        let base = set();
        let moved = AmbiguitySet { a: 3.0, b: 23.0, mu: 8.0, ..base };
        for &z in &[1.0, 4.5, 6.0, 12.0] {
            assert_abs_diff_eq!(
                retention_bound(&moved, z + 3.0).unwrap(),
                retention_bound(&base, z).unwrap() + 3.0,
                epsilon = 1e-12
            );
            let layer = Layer::new(z, Some(3.0)).unwrap();
            let moved_layer = Layer::new(z + 3.0, Some(3.0)).unwrap();
            assert_abs_diff_eq!(
                reinsurer_benefit_bound(&moved, moved_layer).unwrap(),
                reinsurer_benefit_bound(&base, layer).unwrap(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn rejects_bad_layers() {
        assert!(Layer::new(1.0, Some(0.0)).is_err());
        assert!(reinsurer_benefit_bound(&set(), Layer::unlimited(25.0)).is_err());
    }
}
