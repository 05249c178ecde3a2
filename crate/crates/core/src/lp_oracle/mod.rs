//! Discretised moment problems.
//!
//! The extremal problems behind every closed-form bound are linear programs
//! over probability measures. Restricting the measure to a finite grid that
//! contains the breakpoints of the objective and the knots of the bound gives
//! a small LP whose optimum reproduces the closed form and whose duals give
//! the majorant `F(x) = l0 + l1 x + l2 |x - mu| (+ l3 1{x >= mu})`.

mod simplex;
mod verify;

pub use verify::{random_instance, verify_bound, verify_suite, BoundCheck, VerifyReport, VerifyStatus, PASS_GAP};

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::ambiguity::AmbiguitySet;
use crate::error::{Error, Result};
use crate::tail_bounds::{linspace, DiscreteDistribution, Shifted};
use simplex::{Outcome, Problem};

/// Uniform points added to every default grid.
pub const DEFAULT_GRID: usize = 501;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Max,
    Min,
}

/// Objective `x -> f(x)` with the points where it kinks or jumps.
#[derive(Clone)]
pub struct Objective {
    pub name: String,
    pub breakpoints: Vec<f64>,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl std::fmt::Debug for Objective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Objective")
            .field("name", &self.name)
            .field("breakpoints", &self.breakpoints)
            .finish()
    }
}

impl Objective {
    pub fn new(
        name: impl Into<String>,
        breakpoints: Vec<f64>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Objective { name: name.into(), breakpoints, f: Arc::new(f) }
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    /// `1{x >= t}`
    pub fn indicator_ge(t: f64) -> Self {
        Objective::new(format!("1{{x>={t}}}"), vec![t], move |x| if x >= t { 1.0 } else { 0.0 })
    }

    /// `1{x > t}`
    pub fn indicator_gt(t: f64) -> Self {
        Objective::new(format!("1{{x>{t}}}"), vec![t], move |x| if x > t { 1.0 } else { 0.0 })
    }

    /// `min(x, z)`: what a direct insurer pays with retention `z`.
    pub fn retained(z: f64) -> Self {
        Objective::new(format!("min(x,{z})"), vec![z], move |x| x.min(z))
    }

    /// `min(max(x - z, 0), cap)`: what a reinsurer pays on the layer above `z`.
    /// No cap gives the plain excess `max(x - z, 0)`.
    pub fn layer(z: f64, cap: Option<f64>) -> Self {
        match cap {
            Some(cap) => Objective::new(format!("layer({z},{cap})"), vec![z, z + cap], move |x| {
                (x - z).max(0.0).min(cap)
            }),
            None => Objective::new(format!("excess({z})"), vec![z], move |x| (x - z).max(0.0)),
        }
    }
}

/// A moment LP: choose probabilities on `grid` matching mass, mean, MAD and
/// optionally `P(X >= mu)`, extremising the expectation of `values`.
#[derive(Debug, Clone)]
pub struct MomentLp {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub mu: f64,
    pub d: f64,
    pub beta: Option<f64>,
    pub sense: Sense,
}

/// Offset of the extra point placed just below the mean, relative to the
/// support width.
pub const BELOW_MEAN_OFFSET: f64 = 1e-9;

/// Knots, support ends, the mean and `breakpoints` (clipped to the
/// support), plus `n_uniform` evenly spaced points.
///
/// With `beta` the lower bound is approached, not attained, by moving mass
/// up to just below the mean, so a point at `mu - 1e-9 (b - a)` is added.
pub fn default_grid(set: &AmbiguitySet, breakpoints: &[f64], n_uniform: usize) -> Vec<f64> {
    let sh = Shifted::of(set);
    let (k1, k2) = sh.knots();
    let mut grid = vec![set.a, set.b, set.mu, set.a + k1, set.a + k2];
    if let Some(beta) = set.beta {
        let (k1, k2) = sh.beta_knots(beta);
        grid.extend([set.a + k1, set.a + k2]);
        if set.mu > set.a {
            grid.push((set.mu - BELOW_MEAN_OFFSET * set.width()).max(set.a));
        }
    }
    grid.extend(breakpoints.iter().filter(|x| x.is_finite()).map(|&x| x.clamp(set.a, set.b)));
    grid.extend(linspace(set.a, set.b, n_uniform));
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

impl MomentLp {
    /// LP on the default grid with `n_uniform` evenly spaced points.
    pub fn new(set: &AmbiguitySet, objective: &Objective, sense: Sense, n_uniform: usize) -> Result<Self> {
        let grid = default_grid(set, &objective.breakpoints, n_uniform);
        MomentLp::on_grid(set, objective, sense, grid)
    }

    /// LP on a caller-supplied grid. The grid must be inside the support and
    /// contain `a`, `b`, `mu` and every breakpoint inside the support.
    pub fn on_grid(set: &AmbiguitySet, objective: &Objective, sense: Sense, mut grid: Vec<f64>) -> Result<Self> {
        set.validate()?;
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        if grid.len() < 4 {
            return Err(Error::InvalidInput("moment LP grid needs at least 4 points".into()));
        }
        if grid[0] < set.a || grid[grid.len() - 1] > set.b {
            return Err(Error::InvalidInput("grid leaves the support".into()));
        }
        let required = [set.a, set.b, set.mu]
            .into_iter()
            .chain(objective.breakpoints.iter().copied().filter(|&x| x >= set.a && x <= set.b));
        for x in required {
            if grid.binary_search_by(|g| g.total_cmp(&x)).is_err() {
                return Err(Error::InvalidInput(format!("grid is missing required point {x}")));
            }
        }
        let values = grid.iter().map(|&x| objective.eval(x)).collect();
        Ok(MomentLp { grid, values, mu: set.mu, d: set.d, beta: set.beta, sense })
    }

    fn rows(&self) -> usize {
        if self.beta.is_some() {
            4
        } else {
            3
        }
    }

    /// Constraint column of grid point `x`: mass, centred mean, MAD and the
    /// optional upper-side mass.
    fn column(&self, x: f64) -> [f64; 4] {
        let upper = if x >= self.mu { 1.0 } else { 0.0 };
        [1.0, x - self.mu, (x - self.mu).abs(), upper]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
}

/// Multipliers of the majorant (or minorant for `Min`) evaluated in
/// [`Duals::majorant`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Duals {
    pub lambda0: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: Option<f64>,
}

impl Duals {
    pub fn majorant(&self, x: f64, mu: f64) -> f64 {
        let upper = if x >= mu { self.lambda3.unwrap_or(0.0) } else { 0.0 };
        self.lambda0 + self.lambda1 * x + self.lambda2 * (x - mu).abs() + upper
    }

    pub fn objective(&self, mu: f64, d: f64, beta: Option<f64>) -> f64 {
        self.lambda0 + self.lambda1 * mu + self.lambda2 * d + self.lambda3.unwrap_or(0.0) * beta.unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpCertificate {
    pub status: LpStatus,
    pub optimal_value: f64,
    pub primal: DiscreteDistribution,
    pub dual: Duals,
    pub iterations: usize,
    /// Phase-one residual when infeasible.
    pub infeasibility: f64,
}

impl LpCertificate {
    /// Largest violation of the dual constraints over `lp.grid`.
    pub fn dual_feasibility_residual(&self, lp: &MomentLp) -> f64 {
        lp.grid
            .iter()
            .zip(&lp.values)
            .map(|(&x, &f)| {
                let gap = self.dual.majorant(x, lp.mu) - f;
                match lp.sense {
                    Sense::Max => (-gap).max(0.0),
                    Sense::Min => gap.max(0.0),
                }
            })
            .fold(0.0, f64::max)
    }

    /// Difference between dual and primal objectives.
    pub fn duality_gap(&self, lp: &MomentLp) -> f64 {
        self.dual.objective(lp.mu, lp.d, lp.beta) - self.optimal_value
    }

    /// Largest absolute residual of the primal constraint rows.
    pub fn primal_residual(&self, lp: &MomentLp) -> f64 {
        let p = &self.primal;
        let mut res = vec![
            (p.mass() - 1.0).abs(),
            (p.mean() - lp.mu).abs(),
            (p.mad_about(lp.mu) - lp.d).abs(),
        ];
        if let Some(beta) = lp.beta {
            res.push((p.prob_ge(lp.mu) - beta).abs());
        }
        res.into_iter().fold(0.0, f64::max)
    }
}

pub fn solve(lp: &MomentLp) -> Result<LpCertificate> {
    let m = lp.rows();
    let n = lp.grid.len();
    let mut a = Vec::with_capacity(m * n);
    for &x in &lp.grid {
        a.extend_from_slice(&lp.column(x)[..m]);
    }
    let mut rhs = vec![1.0, 0.0, lp.d];
    if let Some(beta) = lp.beta {
        rhs.push(beta);
    }
    let flip = match lp.sense {
        Sense::Max => -1.0,
        Sense::Min => 1.0,
    };
    let cost = lp.values.iter().map(|v| flip * v).collect();
    let problem = Problem { m, n, a, rhs, cost };

    match simplex::solve(&problem)? {
        Outcome::Infeasible { residual } => Ok(LpCertificate {
            status: LpStatus::Infeasible,
            optimal_value: f64::NAN,
            primal: DiscreteDistribution::default(),
            dual: Duals::default(),
            iterations: 0,
            infeasibility: residual,
        }),
        Outcome::Optimal { x, value, duals, iterations } => {
            let primal = DiscreteDistribution::from_pairs(lp.grid.iter().copied().zip(x));
            let y: Vec<f64> = duals.iter().map(|v| flip * v).collect();
            // The mean row was centred; undo that for the reported l0.
            let dual = Duals {
                lambda0: y[0] - y[1] * lp.mu,
                lambda1: y[1],
                lambda2: y[2],
                lambda3: lp.beta.map(|_| y[3]),
            };
            Ok(LpCertificate {
                status: LpStatus::Optimal,
                optimal_value: flip * value,
                primal,
                dual,
                iterations,
                infeasibility: 0.0,
            })
        }
    }
}
