use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{default_grid, solve, LpStatus, MomentLp, Objective, Sense};
use crate::ambiguity::AmbiguitySet;
use crate::error::{Error, Result};
use crate::stoploss::{reinsurer_benefit_bound, retention_bound, Layer};
use crate::tail_bounds::{inf_tail, inf_tail_beta, sup_tail, sup_tail_beta};

/// Largest closed-form versus LP gap counted as agreement.
pub const PASS_GAP: f64 = 1e-6;

/// Closed form to check against the LP. The threshold passed to
/// [`verify_bound`] is the tail threshold, or the retention for the
/// stop-loss checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum BoundCheck {
    SupTail,
    InfTail,
    SupTailBeta,
    InfTailBeta,
    Retention,
    Layer { cap: Option<f64> },
}

impl BoundCheck {
    pub fn id(&self) -> &'static str {
        match self {
            BoundCheck::SupTail => "sup_tail",
            BoundCheck::InfTail => "inf_tail",
            BoundCheck::SupTailBeta => "sup_tail_beta",
            BoundCheck::InfTailBeta => "inf_tail_beta",
            BoundCheck::Retention => "retention",
            BoundCheck::Layer { .. } => "layer",
        }
    }

    pub fn uses_beta(&self) -> bool {
        matches!(self, BoundCheck::SupTailBeta | BoundCheck::InfTailBeta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyStatus {
    Pass,
    Fail,
    Infeasible,
}

/// One row of the verification table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub id: String,
    pub set: AmbiguitySet,
    pub t: f64,
    pub cap: Option<f64>,
    pub closed_form: f64,
    pub lp_value: f64,
    pub gap: f64,
    pub status: VerifyStatus,
}

impl VerifyReport {
    pub const CSV_HEADER: &'static str = "id,a,b,mu,d,beta,t,cap,closed_form,lp_value,gap,status";

    pub fn csv_row(&self) -> String {
        use crate::format::{sig, FULL_DIGITS};
        let opt = |v: Option<f64>| v.map(|x| sig(x, FULL_DIGITS)).unwrap_or_default();
        let status = match self.status {
            VerifyStatus::Pass => "pass",
            VerifyStatus::Fail => "fail",
            VerifyStatus::Infeasible => "infeasible",
        };
        let s = &self.set;
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.id,
            sig(s.a, FULL_DIGITS),
            sig(s.b, FULL_DIGITS),
            sig(s.mu, FULL_DIGITS),
            sig(s.d, FULL_DIGITS),
            opt(s.beta),
            sig(self.t, FULL_DIGITS),
            opt(self.cap),
            sig(self.closed_form, FULL_DIGITS),
            sig(self.lp_value, FULL_DIGITS),
            sig(self.gap, FULL_DIGITS),
            status
        )
    }
}

/// Compare a closed form with the moment LP on the default grid with
/// `grid_size` uniform points.
pub fn verify_bound(set: &AmbiguitySet, t: f64, check: BoundCheck, grid_size: usize) -> Result<VerifyReport> {
    if grid_size < 6 {
        return Err(Error::InvalidInput(format!("grid size must be at least 6, got {grid_size}")));
    }
    let set = if check.uses_beta() { *set } else { set.without_beta() };
    let (closed_form, objective, sense, cap) = match check {
        BoundCheck::SupTail => (sup_tail(&set, t)?.value, Objective::indicator_ge(t), Sense::Max, None),
        BoundCheck::InfTail => (inf_tail(&set, t)?.value, Objective::indicator_gt(t), Sense::Min, None),
        BoundCheck::SupTailBeta => (sup_tail_beta(&set, t)?.value, Objective::indicator_ge(t), Sense::Max, None),
        BoundCheck::InfTailBeta => (inf_tail_beta(&set, t)?.value, Objective::indicator_gt(t), Sense::Min, None),
        BoundCheck::Retention => (retention_bound(&set, t)?, Objective::retained(t), Sense::Max, None),
        BoundCheck::Layer { cap } => {
            let layer = Layer::new(t, cap)?;
            (reinsurer_benefit_bound(&set, layer)?, Objective::layer(t, cap), Sense::Max, cap)
        }
    };
    let grid = default_grid(&set, &objective.breakpoints, grid_size);
    let lp = MomentLp::on_grid(&set, &objective, sense, grid)?;
    let cert = solve(&lp)?;
    let (lp_value, gap, status) = match cert.status {
        LpStatus::Infeasible => (f64::NAN, f64::INFINITY, VerifyStatus::Infeasible),
        LpStatus::Optimal => {
            let gap = (closed_form - cert.optimal_value).abs();
            let status = if gap <= PASS_GAP { VerifyStatus::Pass } else { VerifyStatus::Fail };
            (cert.optimal_value, gap, status)
        }
    };
    Ok(VerifyReport { id: check.id().into(), set, t, cap, closed_form, lp_value, gap, status })
}

/// Random feasible set with `beta` drawn from its feasible range, and a
/// threshold uniform on the support.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R) -> (AmbiguitySet, f64) {
    let a: f64 = rng.gen_range(-5.0..5.0);
    let width: f64 = rng.gen_range(0.5..20.0);
    let b = a + width;
    let mu = a + width * rng.gen_range(0.05..0.95);
    let d = 2.0 * (mu - a) * (b - mu) / width * rng.gen_range(0.02..0.98);
    let lo = d / (2.0 * (b - mu));
    let hi = 1.0 - d / (2.0 * (mu - a));
    let beta = rng.gen_range(lo..=hi);
    let t = rng.gen_range(a..=b);
    (AmbiguitySet { a, b, mu, d, beta: Some(beta) }, t)
}

/// Every check on `draws` random instances; layers get a random cap.
pub fn verify_suite<R: Rng + ?Sized>(
    rng: &mut R,
    checks: &[BoundCheck],
    draws: usize,
    grid_size: usize,
) -> Result<Vec<VerifyReport>> {
    let mut cases = Vec::with_capacity(draws * checks.len());
    for _ in 0..draws {
        for &check in checks {
            let (set, t) = random_instance(rng);
            let check = match check {
                BoundCheck::Layer { .. } => BoundCheck::Layer { cap: Some(set.width() * rng.gen_range(0.05..1.0)) },
                other => other,
            };
            cases.push((set, t, check));
        }
    }
    use rayon::prelude::*;
    cases.par_iter().map(|&(set, t, check)| verify_bound(&set, t, check, grid_size)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples_pass() {
        let set = AmbiguitySet::with_beta(0.0, 1.0, 0.5, 0.1875, 0.5).unwrap();
        for check in [BoundCheck::SupTail, BoundCheck::SupTailBeta] {
            let r = verify_bound(&set, 0.4, check, 501).unwrap();
            assert_eq!(r.status, VerifyStatus::Pass, "{r:?}");
        }
        let set = AmbiguitySet::new(0.0, 20.0, 5.0, 1.77).unwrap();
        let r = verify_bound(&set, 6.0, BoundCheck::Layer { cap: Some(3.0) }, 501).unwrap();
        assert_eq!(r.status, VerifyStatus::Pass, "{r:?}");
    }

    #[test]
    fn small_grid_rejected() {
        let set = AmbiguitySet::new(0.0, 1.0, 0.5, 0.1875).unwrap();
        assert!(verify_bound(&set, 0.4, BoundCheck::SupTail, 5).is_err());
    }
}
