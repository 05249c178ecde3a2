//! Dense revised simplex for `min c'x  s.t.  A x = r, x >= 0` with a handful
//! of rows. The basis inverse is rebuilt from scratch every iteration, which
//! costs nothing at this size and keeps round-off from accumulating.

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-13;
const RATIO_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-11;
const PHASE_ONE_TOL: f64 = 1e-9;
const MAX_ITER: usize = 100_000;
/// Consecutive degenerate pivots before switching to Bland's rule.
const DEGENERATE_STREAK: usize = 50;

/// Column-major constraint matrix with `m` rows.
pub(crate) struct Problem {
    pub m: usize,
    pub n: usize,
    pub a: Vec<f64>,
    pub rhs: Vec<f64>,
    pub cost: Vec<f64>,
}

#[derive(Debug, Clone)]
pub(crate) enum Outcome {
    Optimal { x: Vec<f64>, value: f64, duals: Vec<f64>, iterations: usize },
    Infeasible { residual: f64 },
}

struct Work<'a> {
    p: &'a Problem,
    /// Row signs applied so every right-hand side is nonnegative.
    sign: Vec<f64>,
    basis: Vec<usize>,
    iterations: usize,
}

impl<'a> Work<'a> {
    /// Entry `i` of column `j`; columns `n..n+m` are the artificial units.
    fn entry(&self, i: usize, j: usize) -> f64 {
        let p = self.p;
        if j < p.n {
            self.sign[i] * p.a[j * p.m + i]
        } else if j - p.n == i {
            1.0
        } else {
            0.0
        }
    }

    fn rhs(&self, i: usize) -> f64 {
        self.sign[i] * self.p.rhs[i]
    }

    /// Gauss-Jordan inverse of the basis matrix, row-major.
    fn basis_inverse(&self) -> Result<Vec<f64>> {
        let m = self.p.m;
        let mut aug = vec![0.0; m * 2 * m];
        for (k, &j) in self.basis.iter().enumerate() {
            for i in 0..m {
                aug[i * 2 * m + k] = self.entry(i, j);
            }
        }
        for i in 0..m {
            aug[i * 2 * m + m + i] = 1.0;
        }
        for col in 0..m {
            let piv = (col..m)
                .max_by(|&r, &s| aug[r * 2 * m + col].abs().total_cmp(&aug[s * 2 * m + col].abs()))
                .unwrap();
            let pv = aug[piv * 2 * m + col];
            if pv.abs() < PIVOT_TOL {
                return Err(Error::Numerical(format!("singular basis (pivot {pv:e})")));
            }
            if piv != col {
                for k in 0..2 * m {
                    aug.swap(piv * 2 * m + k, col * 2 * m + k);
                }
            }
            for k in 0..2 * m {
                aug[col * 2 * m + k] /= pv;
            }
            for r in 0..m {
                if r != col {
                    let f = aug[r * 2 * m + col];
                    if f != 0.0 {
                        for k in 0..2 * m {
                            aug[r * 2 * m + k] -= f * aug[col * 2 * m + k];
                        }
                    }
                }
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m..(i + 1) * m].copy_from_slice(&aug[i * 2 * m + m..(i + 1) * 2 * m]);
        }
        Ok(inv)
    }

    /// Optimise `cost` over columns `0..limit` starting from the current basis.
    /// Returns the basic values and the duals in the signed rows.
    fn optimise(&mut self, cost: &dyn Fn(usize) -> f64, limit: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let m = self.p.m;
        let mut degenerate = 0usize;
        loop {
            if self.iterations > MAX_ITER {
                return Err(Error::Numerical("simplex iteration limit reached".into()));
            }
            let inv = self.basis_inverse()?;
            let xb: Vec<f64> = (0..m)
                .map(|i| (0..m).map(|k| inv[i * m + k] * self.rhs(k)).sum())
                .collect();
            let y: Vec<f64> = (0..m)
                .map(|k| (0..m).map(|i| cost(self.basis[i]) * inv[i * m + k]).sum())
                .collect();

            let bland = degenerate >= DEGENERATE_STREAK;
            let mut entering: Option<(usize, f64)> = None;
            for j in 0..limit {
                if self.basis.contains(&j) {
                    continue;
                }
                let r = cost(j) - (0..m).map(|i| y[i] * self.entry(i, j)).sum::<f64>();
                if r < -COST_TOL {
                    match entering {
                        None => entering = Some((j, r)),
                        Some((_, best)) if !bland && r < best => entering = Some((j, r)),
                        _ => {}
                    }
                    if bland {
                        break;
                    }
                }
            }
            let Some((q, _)) = entering else {
                return Ok((xb, y));
            };

            let u: Vec<f64> = (0..m)
                .map(|i| (0..m).map(|k| inv[i * m + k] * self.entry(k, q)).sum())
                .collect();
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                if u[i] > RATIO_TOL {
                    let ratio = xb[i].max(0.0) / u[i];
                    let better = match leave {
                        None => true,
                        Some((l, best)) => {
                            ratio < best - 1e-15
                                || (ratio <= best + 1e-15 && self.basis[i] < self.basis[l])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, step)) = leave else {
                return Err(Error::Numerical("unbounded direction in a bounded program".into()));
            };
            degenerate = if step <= 1e-15 { degenerate + 1 } else { 0 };
            self.basis[r] = q;
            self.iterations += 1;
        }
    }
}

pub(crate) fn solve(p: &Problem) -> Result<Outcome> {
    let (m, n) = (p.m, p.n);
    let sign = p.rhs.iter().map(|&r| if r < 0.0 { -1.0 } else { 1.0 }).collect();
    let mut work = Work { p, sign, basis: (n..n + m).collect(), iterations: 0 };

    let phase_one = |j: usize| if j >= n { 1.0 } else { 0.0 };
    let (xb, _) = work.optimise(&phase_one, n + m)?;
    let residual: f64 = work
        .basis
        .iter()
        .zip(&xb)
        .filter(|(&j, _)| j >= n)
        .map(|(_, &v)| v.max(0.0))
        .sum();
    if residual > PHASE_ONE_TOL {
        return Ok(Outcome::Infeasible { residual });
    }

    // Pivot zero-level artificials out where a real column can replace them.
    for k in 0..m {
        if work.basis[k] < n {
            continue;
        }
        let inv = work.basis_inverse()?;
        let candidate = (0..n).filter(|j| !work.basis.contains(j)).find(|&j| {
            let u: f64 = (0..m).map(|i| inv[k * m + i] * work.entry(i, j)).sum();
            u.abs() > 1e-9
        });
        if let Some(j) = candidate {
            work.basis[k] = j;
        }
    }

    let phase_two = |j: usize| if j < n { p.cost[j] } else { 0.0 };
    let (xb, y) = work.optimise(&phase_two, n)?;
    let mut x = vec![0.0; n];
    for (&j, &v) in work.basis.iter().zip(&xb) {
        if j < n {
            x[j] = v.max(0.0);
        }
    }
    let value = x.iter().zip(&p.cost).map(|(a, c)| a * c).sum();
    let duals = y.iter().zip(&work.sign).map(|(v, s)| v * s).collect();
    Ok(Outcome::Optimal { x, value, duals, iterations: work.iterations })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_program() {
        // min -x0 - 2 x1  s.t. x0 + x1 + x2 = 4, x0 + 3 x1 + x3 = 6
        let p = Problem {
            m: 2,
            n: 4,
            a: vec![1.0, 1.0, 1.0, 3.0, 1.0, 0.0, 0.0, 1.0],
            rhs: vec![4.0, 6.0],
            cost: vec![-1.0, -2.0, 0.0, 0.0],
        };
        match solve(&p).unwrap() {
            Outcome::Optimal { x, value, duals, .. } => {
                assert!((value + 5.0).abs() < 1e-12);
                assert!((x[0] - 3.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
                assert!((duals[0] + 0.5).abs() < 1e-12 && (duals[1] + 0.5).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn detects_infeasibility() {
        // x0 + x1 = 1, x0 + x1 = 2
        let p = Problem { m: 2, n: 2, a: vec![1.0, 1.0, 1.0, 1.0], rhs: vec![1.0, 2.0], cost: vec![0.0, 0.0] };
        assert!(matches!(solve(&p).unwrap(), Outcome::Infeasible { .. }));
    }

    #[test]
    fn negative_rhs_rows() {
        // x0 - x1 = -1, x0 + x1 = 3, min x1
        let p = Problem { m: 2, n: 2, a: vec![1.0, 1.0, -1.0, 1.0], rhs: vec![-1.0, 3.0], cost: vec![0.0, 1.0] };
        match solve(&p).unwrap() {
            Outcome::Optimal { x, value, .. } => {
                assert!((x[0] - 1.0).abs() < 1e-12 && (value - 2.0).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }
}
