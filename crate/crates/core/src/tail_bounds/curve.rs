//! Sampled bound curves as two-column plot data.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    cantelli, de_schepper_inf, de_schepper_sup, inf_tail, inf_tail_beta, sup_tail, sup_tail_beta,
    sup_tail_ineq_mad,
};
use crate::ambiguity::AmbiguitySet;
use crate::error::{Error, Result};
use crate::format::{write_csv_rows, write_dat_rows};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundKind {
    Sup,
    Inf,
    SupBeta,
    InfBeta,
    SupIneqMad,
    Cantelli { sigma: f64 },
    DeSchepperSup { sigma: f64 },
    DeSchepperInf { sigma: f64 },
}

impl BoundKind {
    pub fn eval(&self, set: &AmbiguitySet, t: f64) -> Result<f64> {
        let shifted = |f: fn(f64, f64, f64, f64) -> Result<f64>, sigma: f64| {
            set.validate()?;
            set.check_threshold(t)?;
            f(set.mu - set.a, set.b - set.a, sigma, t - set.a)
        };
        match *self {
            BoundKind::Sup => Ok(sup_tail(set, t)?.value),
            BoundKind::Inf => Ok(inf_tail(set, t)?.value),
            BoundKind::SupBeta => Ok(sup_tail_beta(set, t)?.value),
            BoundKind::InfBeta => Ok(inf_tail_beta(set, t)?.value),
            BoundKind::SupIneqMad => sup_tail_ineq_mad(set, t),
            BoundKind::Cantelli { sigma } => cantelli(sigma, set.mu, t),
            BoundKind::DeSchepperSup { sigma } => shifted(de_schepper_sup, sigma),
            BoundKind::DeSchepperInf { sigma } => shifted(de_schepper_inf, sigma),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub t: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCurve {
    pub kind: BoundKind,
    pub set: AmbiguitySet,
    pub points: Vec<CurvePoint>,
}

impl BoundCurve {
    /// Two space-separated columns, six significant digits, no header.
    pub fn to_dat(&self) -> String {
        write_dat_rows(self.points.iter().map(|p| [p.t, p.value]))
    }

    /// Header `t,value` then full-precision rows.
    pub fn to_csv(&self) -> String {
        write_csv_rows(&["t", "value"], self.points.iter().map(|p| [p.t, p.value]))
    }
}

/// Evaluate `kind` at every grid point. The grid must be strictly
/// increasing and inside the support.
pub fn curve(kind: BoundKind, set: &AmbiguitySet, grid: &[f64]) -> Result<BoundCurve> {
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidInput("curve grid must be strictly increasing".into()));
    }
    let points = grid
        .par_iter()
        .map(|&t| kind.eval(set, t).map(|value| CurvePoint { t, value }))
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundCurve { kind, set: *set, points })
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_point_curves_delegate() {
        let set = AmbiguitySet::with_beta(0.0, 1.0, 0.5, 0.1875, 0.5).unwrap();
        let c = curve(BoundKind::Sup, &set, &[0.8]).unwrap();
        assert!((c.points[0].value - 0.3125).abs() < 1e-15);
        let c = curve(BoundKind::Inf, &set, &[0.3]).unwrap();
        assert_eq!(c.points[0].value, 0.53125);
        let c = curve(BoundKind::SupBeta, &set, &[0.5]).unwrap();
        assert_eq!(c.points[0].value, 0.5);
    }

    #[test]
    fn dat_and_csv_shapes() {
        let set = AmbiguitySet::new(0.0, 1.0, 0.5, 0.1875).unwrap();
        let c = curve(BoundKind::Sup, &set, &[0.25, 0.8]).unwrap();
        assert_eq!(c.to_dat(), "0.25 1\n0.8 0.3125\n");
        assert!(c.to_csv().starts_with("t,value\n0.25,1\n0.80000000000000004,0.3124999999999"));
    }

    #[test]
    fn rejects_unsorted_grid() {
        let set = AmbiguitySet::new(0.0, 1.0, 0.5, 0.1875).unwrap();
        assert!(curve(BoundKind::Sup, &set, &[0.5, 0.5]).is_err());
    }
}
