//! Two-fraction radiotherapy planning. Maximise the tumour BED
//! `x1 + x2 + (x1^2 + x2^2) / rho1` while the healthy-tissue BED stays under
//! its tolerance, either for a known sensitivity `rho2` or with probability
//! `1 - eps` for every `rho2` law in a mean-MAD set.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ambiguity::AmbiguitySet;
use crate::error::{check_open, check_range, Error, Result};
use crate::tail_bounds::{inf_tail, sup_tail};

/// Coarse grid step in `x1`.
pub const GRID_STEP: f64 = 0.05;
/// Number of times the step is divided by ten around the incumbent.
pub const REFINEMENTS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiotherapyProblem {
    /// Tumour fractionation sensitivity.
    pub rho1: f64,
    /// Fraction of the tumour dose received by the healthy tissue.
    pub sigma: f64,
    /// Dose shape factor.
    pub phi: f64,
    /// Reference dose (Gy) and its fraction count defining the tolerance.
    pub dose: f64,
    pub fractions: f64,
    pub x_min: f64,
    /// Ambiguity set of the healthy-tissue sensitivity.
    pub rho2: AmbiguitySet,
}

impl Default for RadiotherapyProblem {
    fn default() -> Self {
        RadiotherapyProblem {
            rho1: 10.0,
            sigma: 0.9,
            phi: 2.0,
            dose: 27.0,
            fractions: 5.0,
            x_min: 1.5,
            rho2: AmbiguitySet { a: 3.0, b: 6.0, mu: 4.0, d: 0.25, beta: None },
        }
    }
}

/// Which healthy-tissue constraint is imposed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ConstraintModel {
    /// `rho2` known exactly.
    Nominal { rho2: f64 },
    /// Chance constraint at level `epsilon` over the ambiguity set.
    Ambiguous { epsilon: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiotherapySolution {
    pub x1: f64,
    pub x2: f64,
    pub objective: f64,
    /// Constraint value at the incumbent; nonpositive when feasible.
    pub residual: f64,
    /// Largest violation probability of the healthy-tissue constraint at the
    /// incumbent over the ambiguity set (ambiguous model only).
    pub worst_case_violation: Option<f64>,
    /// True when `d / (2 eps)` exceeds the distance from `mu` to the support
    /// end on the binding side (`b - mu` if the dose term grows with `rho2`,
    /// `mu - a` otherwise). The reformulated constraint is then stricter
    /// than the tight tail bound requires.
    pub beyond_support: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub x1: f64,
    pub x2: f64,
}

impl RadiotherapyProblem {
    pub fn validate(&self, model: ConstraintModel) -> Result<()> {
        for (name, v) in [
            ("rho1", self.rho1),
            ("phi", self.phi),
            ("dose", self.dose),
            ("fractions", self.fractions),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidInput(format!("{name} must be positive, got {v}")));
            }
        }
        check_range("sigma", self.sigma, f64::MIN_POSITIVE, 1.0)?;
        if !(self.x_min >= 0.0) || !self.x_min.is_finite() {
            return Err(Error::InvalidInput(format!("x_min must be nonnegative, got {}", self.x_min)));
        }
        self.rho2.without_beta().validate()?;
        if self.rho2.a < 0.0 {
            return Err(Error::InvalidInput("rho2 support must be nonnegative".into()));
        }
        match model {
            ConstraintModel::Nominal { rho2 } => {
                if !(rho2 > 0.0) || !rho2.is_finite() {
                    return Err(Error::InvalidInput(format!("rho2 must be positive, got {rho2}")));
                }
            }
            ConstraintModel::Ambiguous { epsilon } => {
                let s = &self.rho2;
                check_open("epsilon", epsilon, 0.0, (s.mu - s.a) / (s.b - s.a))?;
            }
        }
        Ok(())
    }

    /// Tolerance `t(rho2)` of the healthy tissue.
    pub fn tolerance(&self, rho2: f64) -> f64 {
        let pd = self.phi * self.dose;
        pd * (1.0 + pd / (self.fractions * rho2))
    }

    pub fn tumour_bed(&self, x1: f64, x2: f64) -> f64 {
        x1 + x2 + (x1 * x1 + x2 * x2) / self.rho1
    }

    /// Constraint value; the plan is feasible when it is nonpositive.
    pub fn constraint(&self, model: ConstraintModel, x1: f64, x2: f64) -> f64 {
        let (s, q, sg) = (x1 + x2, x1 * x1 + x2 * x2, self.sigma);
        let pd = self.phi * self.dose;
        match model {
            ConstraintModel::Nominal { rho2 } => sg * s + sg * sg * q / rho2 - self.tolerance(rho2),
            ConstraintModel::Ambiguous { epsilon } => {
                let (mu, d) = (self.rho2.mu, self.rho2.d);
                mu * sg * s + sg * sg * q + d / (2.0 * epsilon) * (sg * s - pd).abs()
                    - mu * pd
                    - pd * pd / self.fractions
            }
        }
    }

    /// Largest `P(rho2 (sigma s - phi D) > phi^2 D^2 / T - sigma^2 q)` over
    /// the ambiguity set, from the tight tail bounds.
    pub fn worst_case_violation(&self, x1: f64, x2: f64) -> Result<f64> {
        let set = self.rho2.without_beta();
        let pd = self.phi * self.dose;
        let slope = self.sigma * (x1 + x2) - pd;
        let level = pd * pd / self.fractions - self.sigma * self.sigma * (x1 * x1 + x2 * x2);
        if slope == 0.0 {
            return Ok(if level < 0.0 { 1.0 } else { 0.0 });
        }
        let t = level / slope;
        if slope > 0.0 {
            // P(rho2 > t)
            if t >= set.b {
                Ok(0.0)
            } else if t < set.a {
                Ok(1.0)
            } else {
                Ok(sup_tail(&set, t)?.value)
            }
        } else if t <= set.a {
            // P(rho2 < t)
            Ok(0.0)
        } else if t > set.b {
            Ok(1.0)
        } else {
            Ok(1.0 - inf_tail(&set, t)?.value)
        }
    }

    /// Upper end of the search box: the quadratic term alone already
    /// exceeds the tolerance beyond it.
    fn x_max(&self, model: ConstraintModel) -> f64 {
        let rhs = match model {
            ConstraintModel::Nominal { rho2 } => rho2 * self.tolerance(rho2),
            ConstraintModel::Ambiguous { .. } => {
                let pd = self.phi * self.dose;
                self.rho2.mu * pd + pd * pd / self.fractions
            }
        };
        rhs.sqrt() / self.sigma
    }
}

/// Feasible `x2` interval in column `x1`, or `None` if the column is empty.
fn column(p: &RadiotherapyProblem, model: ConstraintModel, x1: f64, hi: f64) -> Option<(f64, f64)> {
    let g = |x2: f64| p.constraint(model, x1, x2);
    let (mut lo_t, mut hi_t) = (p.x_min, hi);
    for _ in 0..200 {
        if hi_t - lo_t <= 1e-12 * hi.max(1.0) {
            break;
        }
        let m1 = lo_t + (hi_t - lo_t) / 3.0;
        let m2 = hi_t - (hi_t - lo_t) / 3.0;
        if g(m1) <= g(m2) {
            hi_t = m2;
        } else {
            lo_t = m1;
        }
    }
    let arg = 0.5 * (lo_t + hi_t);
    if g(arg) > 0.0 {
        return None;
    }
    // Bisect keeping `inside` feasible.
    let root = |mut inside: f64, mut outside: f64| {
        if g(outside) <= 0.0 {
            return outside;
        }
        for _ in 0..200 {
            let mid = 0.5 * (inside + outside);
            if mid == inside || mid == outside {
                break;
            }
            if g(mid) <= 0.0 {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        inside
    };
    Some((root(arg, p.x_min), root(arg, hi)))
}

fn best_on(p: &RadiotherapyProblem, model: ConstraintModel, xs: &[f64], hi: f64) -> Option<(f64, f64, f64)> {
    let scored: Vec<_> = xs
        .par_iter()
        .map(|&x1| column(p, model, x1, hi).map(|(_, x2)| (x1, x2, p.tumour_bed(x1, x2))))
        .collect();
    // Sequential pass: the lowest index wins ties.
    scored.into_iter().flatten().fold(None, |best, c| match best {
        Some(b) if b.2 >= c.2 => Some(b),
        _ => Some(c),
    })
}

fn steps(lo: f64, hi: f64, h: f64) -> Vec<f64> {
    let n = ((hi - lo) / h).floor() as usize;
    let mut xs: Vec<f64> = (0..=n).map(|i| lo + i as f64 * h).collect();
    if xs.last().is_some_and(|&x| x < hi) {
        xs.push(hi);
    }
    xs
}

/// Grid search over `x1` with the exact upper boundary in `x2`, then two
/// tenfold refinements around the incumbent.
pub fn radiotherapy_solve(p: &RadiotherapyProblem, model: ConstraintModel) -> Result<RadiotherapySolution> {
    p.validate(model)?;
    let hi = p.x_max(model);
    if hi < p.x_min {
        return Err(Error::Infeasible(format!("x_min = {} exceeds every feasible dose", p.x_min)));
    }
    let mut h = GRID_STEP;
    let mut best = best_on(p, model, &steps(p.x_min, hi, h), hi)
        .ok_or_else(|| Error::Infeasible("no plan meets the healthy-tissue constraint".into()))?;
    for _ in 0..REFINEMENTS {
        let lo = (best.0 - h).max(p.x_min);
        let top = (best.0 + h).min(hi);
        h /= 10.0;
        if let Some(c) = best_on(p, model, &steps(lo, top, h), hi) {
            if c.2 > best.2 {
                best = c;
            }
        }
    }
    let (x1, x2, objective) = best;
    let residual = p.constraint(model, x1, x2);
    if residual > 1e-9 {
        return Err(Error::Numerical(format!("incumbent violates the constraint by {residual}")));
    }
    let (worst_case_violation, beyond_support) = match model {
        ConstraintModel::Nominal { .. } => (None, false),
        ConstraintModel::Ambiguous { epsilon } => {
            let s = &p.rho2;
            let rising = p.sigma * (x1 + x2) > p.phi * p.dose;
            let room = if rising { s.b - s.mu } else { s.mu - s.a };
            (Some(p.worst_case_violation(x1, x2)?), s.d / (2.0 * epsilon) > room)
        }
    };
    Ok(RadiotherapySolution { x1, x2, objective, residual, worst_case_violation, beyond_support })
}

/// Closed polyline around the feasible region: upper boundary left to
/// right, then lower boundary right to left, over `n` columns.
pub fn feasible_boundary(p: &RadiotherapyProblem, model: ConstraintModel, n: usize) -> Result<Vec<BoundaryPoint>> {
    p.validate(model)?;
    if n < 2 {
        return Err(Error::InvalidInput("boundary needs at least 2 columns".into()));
    }
    let hi = p.x_max(model);
    let xs = crate::tail_bounds::linspace(p.x_min, hi.max(p.x_min), n);
    let cols: Vec<_> = xs
        .par_iter()
        .filter_map(|&x1| column(p, model, x1, hi).map(|c| (x1, c)))
        .collect();
    if cols.is_empty() {
        return Err(Error::Infeasible("empty feasible region".into()));
    }
    let mut pts: Vec<_> = cols.iter().map(|&(x1, (_, up))| BoundaryPoint { x1, x2: up }).collect();
    pts.extend(cols.iter().rev().map(|&(x1, (low, _))| BoundaryPoint { x1, x2: low }));
    pts.push(pts[0]);
    Ok(pts)
}
