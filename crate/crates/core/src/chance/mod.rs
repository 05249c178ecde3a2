//! Ambiguous chance constraints `P(g(x) + Z <= 0) >= 1 - eps` where the
//! noise `Z` has mean zero, support `[-1, u]` and known MAD, and their
//! deterministic convex reformulations.

pub mod radiotherapy;

pub use radiotherapy::{
    feasible_boundary, radiotherapy_solve, BoundaryPoint, ConstraintModel, RadiotherapyProblem,
    RadiotherapySolution,
};

use serde::{Deserialize, Serialize};

use crate::ambiguity::AmbiguitySet;
use crate::error::{check_open, Error, Result};
use crate::lp_oracle::{default_grid, solve, LpStatus, MomentLp, Objective, Sense};

/// Mean-zero noise on `[-1, u]` with MAD `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSet {
    pub u: f64,
    pub d: f64,
}

impl NoiseSet {
    pub fn new(u: f64, d: f64) -> Result<Self> {
        if !(u > 0.0) || !u.is_finite() {
            return Err(Error::InvalidInput(format!("noise upper end must be positive, got {u}")));
        }
        let d_max = 2.0 * u / (1.0 + u);
        if !(0.0..=d_max).contains(&d) {
            return Err(Error::OutOfRange { name: "d", value: d, lo: 0.0, hi: d_max });
        }
        Ok(NoiseSet { u, d })
    }

    /// Symmetric support `[-1, 1]`.
    pub fn unit(d: f64) -> Result<Self> {
        NoiseSet::new(1.0, d)
    }

    pub fn as_ambiguity_set(&self) -> AmbiguitySet {
        AmbiguitySet { a: -1.0, b: self.u, mu: 0.0, d: self.d, beta: None }
    }

    /// Largest `eps` for which the reformulation is exact.
    pub fn eps_limit(&self) -> f64 {
        1.0 / (1.0 + self.u)
    }

    fn require_unit(&self) -> Result<()> {
        if self.u != 1.0 {
            return Err(Error::InvalidInput(format!("this reformulation needs support [-1, 1], got u = {}", self.u)));
        }
        Ok(())
    }
}

/// Safety margin `kappa`: the chance constraint holds iff `g(x) + kappa <= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReformCoefficient {
    pub kappa: f64,
    pub epsilon: f64,
    /// True when `kappa` is the support end `u` rather than `d / (2 eps)`.
    pub clipped: bool,
}

impl ReformCoefficient {
    fn of(noise: &NoiseSet, eps: f64) -> Result<Self> {
        check_open("epsilon", eps, 0.0, noise.eps_limit())?;
        let raw = noise.d / (2.0 * eps);
        Ok(ReformCoefficient { kappa: raw.min(noise.u), epsilon: eps, clipped: raw > noise.u })
    }

    /// Whether a point with constraint value `g` satisfies the chance constraint.
    pub fn admits(&self, g: f64) -> bool {
        g + self.kappa <= 0.0
    }
}

/// Right-hand-side noise on `[-1, 1]`.
pub fn reform_rhs(noise: &NoiseSet, eps: f64) -> Result<ReformCoefficient> {
    noise.require_unit()?;
    ReformCoefficient::of(noise, eps)
}

/// Right-hand-side noise on `[-1, u]`.
pub fn reform_rhs_asym(noise: &NoiseSet, eps: f64) -> Result<ReformCoefficient> {
    ReformCoefficient::of(noise, eps)
}

/// `(a_bar + Z a_hat) . x <= h` with `Z` on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BilinearReform {
    pub a_bar: Vec<f64>,
    pub a_hat: Vec<f64>,
    pub h: f64,
    pub coefficient: ReformCoefficient,
}

/// One row `coeffs . x <= rhs` of the linear representation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearRow {
    pub coeffs: Vec<f64>,
    pub rhs: f64,
}

fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

impl BilinearReform {
    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.a_bar.len() {
            return Err(Error::InvalidInput(format!("x has {} entries, expected {}", x.len(), self.a_bar.len())));
        }
        Ok(())
    }

    /// Left side `a_bar . x + kappa |a_hat . x|` minus `h`.
    pub fn slack(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(dot(&self.a_bar, x) + self.coefficient.kappa * dot(&self.a_hat, x).abs() - self.h)
    }

    pub fn feasible(&self, x: &[f64]) -> Result<bool> {
        Ok(self.slack(x)? <= 0.0)
    }

    /// The absolute value split into `a_bar +- kappa a_hat`.
    pub fn linear_form(&self) -> [LinearRow; 2] {
        let k = self.coefficient.kappa;
        let row = |sign: f64| LinearRow {
            coeffs: self.a_bar.iter().zip(&self.a_hat).map(|(a, h)| a + sign * k * h).collect(),
            rhs: self.h,
        };
        [row(1.0), row(-1.0)]
    }
}

pub fn reform_bilinear(a_bar: Vec<f64>, a_hat: Vec<f64>, h: f64, noise: &NoiseSet, eps: f64) -> Result<BilinearReform> {
    if a_bar.len() != a_hat.len() {
        return Err(Error::InvalidInput(format!(
            "a_bar and a_hat differ in length: {} vs {}",
            a_bar.len(),
            a_hat.len()
        )));
    }
    let coefficient = reform_rhs(noise, eps)?;
    Ok(BilinearReform { a_bar, a_hat, h, coefficient })
}

/// Outcome of the sufficient test for rows with independent noises.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointCheck {
    pub feasible: bool,
    /// `sum log(1 - d_i / (-2 g_i))` over rows whose MAD is small enough,
    /// or `None` when a row already fails.
    pub log_sum: Option<f64>,
    pub log_target: f64,
}

/// Rows `g_i(x) + Z_i <= 0` holding jointly with probability `1 - eps`, with
/// pairwise independent noises on `[-1, 1]` with MADs `d_i`. A pass
/// guarantees feasibility; a fail does not prove infeasibility.
pub fn reform_joint_indep(g: &[f64], d: &[f64], eps: f64) -> Result<JointCheck> {
    if g.len() != d.len() || g.is_empty() {
        return Err(Error::InvalidInput("g and d must be nonempty and of equal length".into()));
    }
    check_open("epsilon", eps, 0.0, 0.5)?;
    for &di in d {
        NoiseSet::unit(di)?;
    }
    let log_target = (1.0 - eps).ln();
    let fail = JointCheck { feasible: false, log_sum: None, log_target };
    let mut log_sum = 0.0;
    for (&gi, &di) in g.iter().zip(d) {
        if di / (2.0 * eps) > 1.0 {
            if gi + 1.0 > 0.0 {
                return Ok(fail);
            }
        } else if di > 0.0 {
            if gi >= 0.0 {
                return Ok(fail);
            }
            let keep = 1.0 - di / (-2.0 * gi);
            if keep <= 0.0 {
                return Ok(fail);
            }
            log_sum += keep.ln();
        } else if gi > 0.0 {
            return Ok(fail);
        }
    }
    Ok(JointCheck { feasible: log_sum >= log_target, log_sum: Some(log_sum), log_target })
}

/// Rows sharing one noise on `[-1, 1]`: exact, and equal to the single-row
/// test on the largest row.
pub fn reform_joint_shared(g: &[f64], noise: &NoiseSet, eps: f64) -> Result<bool> {
    let worst = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if g.is_empty() || worst.is_nan() {
        return Err(Error::InvalidInput("g must be nonempty and free of NaN".into()));
    }
    Ok(reform_rhs(noise, eps)?.admits(worst))
}

/// Largest `P(c Z > r)` over the noise set, from the moment LP on the
/// default grid plus points at and just past the threshold `r / c`.
pub fn worst_case_violation_lp(noise: &NoiseSet, c: f64, r: f64, grid_size: usize) -> Result<f64> {
    if c == 0.0 {
        return Ok(if r < 0.0 { 1.0 } else { 0.0 });
    }
    let set = noise.as_ambiguity_set();
    let s = r / c;
    let objective = Objective::new("violation", vec![s], move |z| if c * z > r { 1.0 } else { 0.0 });
    let mut grid = default_grid(&set, &objective.breakpoints, grid_size);
    let step = 1e-10 * (1.0 + noise.u);
    let past = if c > 0.0 { s + step } else { s - step };
    if past > set.a && past < set.b {
        grid.push(past);
    }
    let cert = solve(&MomentLp::on_grid(&set, &objective, Sense::Max, grid)?)?;
    match cert.status {
        LpStatus::Optimal => Ok(cert.optimal_value),
        LpStatus::Infeasible => Err(Error::Infeasible("noise moment LP".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rhs_examples() {
        let n = NoiseSet::unit(0.25).unwrap();
        let k = reform_rhs(&n, 0.1).unwrap();
        assert_eq!(k.kappa, 1.0);
        assert!(k.clipped);
        assert_eq!(reform_rhs(&n, 0.2).unwrap().kappa, 0.625);
        assert_eq!(reform_rhs(&NoiseSet::unit(0.0).unwrap(), 0.2).unwrap().kappa, 0.0);
        assert!(reform_rhs(&n, 0.5).is_err());
        assert!(reform_rhs(&n, 0.0).is_err());
    }

    #[test]
    fn asym_examples() {
        let n = NoiseSet::new(3.0, 0.5).unwrap();
        assert_eq!(reform_rhs_asym(&n, 0.05).unwrap().kappa, 3.0);
        assert!(reform_rhs_asym(&n, 0.3).is_err());
        assert!(reform_rhs(&n, 0.05).is_err());
        assert_eq!(reform_rhs_asym(&NoiseSet::new(3.0, 0.0).unwrap(), 0.05).unwrap().kappa, 0.0);
        assert!(NoiseSet::new(3.0, 1.6).is_err());
    }

    #[test]
    fn bilinear_example() {
        let n = NoiseSet::unit(0.2).unwrap();
        let r = reform_bilinear(vec![1.0, 1.0], vec![1.0, -1.0], 0.0, &n, 0.1).unwrap();
        assert_eq!(r.coefficient.kappa, 1.0);
        assert!(r.feasible(&[-1.0, -1.0]).unwrap());
        assert!(!r.feasible(&[1.0, -1.5]).unwrap());
        let [p, m] = r.linear_form();
        assert_eq!(p.coeffs, vec![2.0, 0.0]);
        assert_eq!(m.coeffs, vec![0.0, 2.0]);
        assert!(r.feasible(&[1.0]).is_err());
    }

    #[test]
    fn joint_examples() {
        let j = reform_joint_indep(&[-1.0, -1.0], &[0.1, 0.1], 0.1).unwrap();
        assert!(j.feasible);
        assert!((j.log_sum.unwrap() - 2.0 * 0.95_f64.ln()).abs() < 1e-15);
        // All rows out of the small-MAD set: only the support test remains.
        assert!(reform_joint_indep(&[-1.0, -1.2], &[0.5, 0.5], 0.1).unwrap().feasible);
        assert!(!reform_joint_indep(&[-0.9, -1.2], &[0.5, 0.5], 0.1).unwrap().feasible);
        let n = NoiseSet::unit(0.2).unwrap();
        assert_eq!(
            reform_joint_shared(&[-0.7, -0.2], &n, 0.2).unwrap(),
            reform_rhs(&n, 0.2).unwrap().admits(-0.2)
        );
    }

    #[test]
    fn oracle_matches_threshold() {
        let n = NoiseSet::unit(0.25).unwrap();
        let k = reform_rhs(&n, 0.2).unwrap().kappa;
        assert!(worst_case_violation_lp(&n, 1.0, k + 1e-3, 201).unwrap() <= 0.2);
        assert!(worst_case_violation_lp(&n, 1.0, k - 1e-3, 201).unwrap() > 0.2);
    }
}
