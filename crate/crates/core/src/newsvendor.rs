//! Robust newsvendor: intervals guaranteed to contain the optimal order
//! quantity when only the support, mean, MAD (and optionally `beta`) of the
//! demand are known.

use serde::{Deserialize, Serialize};

use crate::ambiguity::{AmbiguitySet, DEFAULT_TOL};
use crate::error::{check_open, Error, Result};
use crate::interval::Interval;

/// Slack used to decide which regime an `eta` sitting on a knot belongs to.
const KNOT_TOL: f64 = 1e-12;

/// Upper end of the demand support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Upper {
    Finite(f64),
    Unbounded,
}

/// Demand description plus the critical ratio `eta = (p - c) / p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewsvendorInput {
    pub a: f64,
    pub upper: Upper,
    pub mu: f64,
    pub d: f64,
    pub beta: Option<f64>,
    pub eta: f64,
}

impl NewsvendorInput {
    pub fn new(set: &AmbiguitySet, eta: f64) -> Result<Self> {
        let input = NewsvendorInput {
            a: set.a,
            upper: Upper::Finite(set.b),
            mu: set.mu,
            d: set.d,
            beta: set.beta,
            eta,
        };
        input.validate()?;
        Ok(input)
    }

    /// Demand with support `[a, infinity)`.
    pub fn unbounded(a: f64, mu: f64, d: f64, beta: Option<f64>, eta: f64) -> Result<Self> {
        let input = NewsvendorInput { a, upper: Upper::Unbounded, mu, d, beta, eta };
        input.validate()?;
        Ok(input)
    }

    /// Critical ratio from selling price `p` and unit cost `c`.
    pub fn critical_ratio(price: f64, cost: f64) -> Result<f64> {
        if !(price > cost && cost >= 0.0) {
            return Err(Error::InvalidInput(format!("need price > cost >= 0, got p={price} c={cost}")));
        }
        Ok((price - cost) / price)
    }

    fn validate(&self) -> Result<()> {
        check_open("eta", self.eta, 0.0, 1.0)?;
        match self.upper {
            Upper::Finite(b) => {
                let set = AmbiguitySet { a: self.a, b, mu: self.mu, d: self.d, beta: self.beta };
                set.validate()?;
            }
            Upper::Unbounded => {
                let tol = DEFAULT_TOL;
                let ok = self.a.is_finite()
                    && self.mu >= self.a
                    && self.d >= 0.0
                    && (self.mu > self.a || self.d <= tol)
                    && self.d <= 2.0 * (self.mu - self.a) + tol;
                if !ok {
                    return Err(Error::InvalidInput(format!(
                        "infeasible unbounded demand: a={} mu={} d={}",
                        self.a, self.mu, self.d
                    )));
                }
                if let Some(beta) = self.beta {
                    let ok = (0.0..=1.0).contains(&beta)
                        && self.d <= 2.0 * (1.0 - beta) * (self.mu - self.a) + tol
                        && (beta > 0.0 || self.d <= tol)
                        && (self.d > tol || beta >= 1.0 - tol);
                    if !ok {
                        return Err(Error::InvalidInput(format!(
                            "beta = {beta} is incompatible with mu={} d={}",
                            self.mu, self.d
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Shifted mean and upper end.
    fn shifted(&self) -> (f64, Option<f64>) {
        let b = match self.upper {
            Upper::Finite(b) => Some(b - self.a),
            Upper::Unbounded => None,
        };
        (self.mu - self.a, b)
    }

    fn unshift(&self, lo: f64, hi: f64) -> Interval {
        Interval::new(self.a + lo, self.a + hi)
    }
}

/// Order-quantity interval from support, mean and MAD. `beta` is ignored.
pub fn order_interval_mad(input: &NewsvendorInput) -> Result<Interval> {
    input.validate()?;
    let (mu, b) = input.shifted();
    let (d, eta) = (input.d, input.eta);
    if d <= 0.0 || mu <= 0.0 {
        return Ok(input.unshift(mu, mu));
    }
    let low_knot = d / (2.0 * mu);
    if eta < low_knot {
        let hi = match b {
            Some(b) => (2.0 * mu * (b - mu) - b * d) / (2.0 * (b - mu) * (1.0 - eta) - d),
            None => (mu - d / 2.0) / (1.0 - eta),
        };
        return Ok(input.unshift(0.0, hi));
    }
    if let Some(b) = b {
        if b > mu && eta >= 1.0 - d / (2.0 * (b - mu)) - KNOT_TOL {
            let lo = (mu - b * (1.0 - eta)) / (eta - low_knot);
            return Ok(input.unshift(lo.min(b), b));
        }
    }
    Ok(input.unshift(mu - d / (2.0 * eta), mu + d / (2.0 * (1.0 - eta))))
}

/// Order-quantity interval when `beta = P(D >= mu)` is also known.
pub fn order_interval_beta(input: &NewsvendorInput) -> Result<Interval> {
    input.validate()?;
    let beta = input
        .beta
        .ok_or_else(|| Error::InvalidInput("beta is required for this interval".into()))?;
    let (mu, b) = input.shifted();
    let (d, eta) = (input.d, input.eta);
    if d <= 0.0 || mu <= 0.0 {
        return Ok(input.unshift(mu, mu));
    }
    if eta < d / (2.0 * mu) {
        let hi = ((1.0 - beta) * mu - d / 2.0) / (1.0 - eta - beta);
        return Ok(input.unshift(0.0, hi));
    }
    if (eta - (1.0 - beta)).abs() <= KNOT_TOL {
        return Ok(input.unshift(mu, mu));
    }
    if eta < 1.0 - beta {
        return Ok(input.unshift(mu - d / (2.0 * eta), mu));
    }
    if let Some(b) = b {
        if b > mu && eta >= 1.0 - d / (2.0 * (b - mu)) - KNOT_TOL {
            let lo = (b * (1.0 - eta) - beta * mu - d / 2.0) / (1.0 - eta - beta);
            return Ok(input.unshift(lo.clamp(mu, b), b));
        }
    }
    Ok(input.unshift(mu, mu + d / (2.0 * (1.0 - eta))))
}

/// Scarf's order quantity under mean-variance ambiguity. Unbounded as
/// `eta -> 1`.
pub fn scarf_quantity(mu: f64, sigma: f64, eta: f64) -> Result<f64> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidInput(format!("sigma must be positive, got {sigma}")));
    }
    check_open("eta", eta, 0.0, 1.0)?;
    if eta < sigma * sigma / (mu * mu + sigma * sigma) {
        return Ok(0.0);
    }
    Ok(mu + sigma / 2.0 * ((1.0 / (eta * (1.0 - eta))).sqrt() - 2.0 * (1.0 / eta - 1.0).sqrt()))
}
