//! Sums of nonnegative bounded risks with known marginal mean and MAD but
//! unknown dependence: tail and stop-loss bounds valid for every coupling,
//! a VaR upper bound, and a Monte Carlo harness for concrete copulas.

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::ambiguity::AmbiguitySet;
use crate::error::{check_open, check_range, Error, Result};
use crate::stoploss::Layer;

/// Fewest Monte Carlo draws accepted.
pub const MIN_DRAWS: usize = 1000;
/// Draws per deterministic substream.
pub const CHUNK: usize = 1 << 16;
/// Default truncation quantile for marginals with unbounded support.
pub const DEFAULT_TRUNCATION: f64 = 0.9999;

/// Marginal mean-MAD sets on `[0, b_i]` and the MAD `d_hat` used for the sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalSet {
    marginals: Vec<AmbiguitySet>,
    d_hat: f64,
}

impl MarginalSet {
    /// `d_hat` defaults to the sum of the marginal MADs.
    pub fn new(marginals: Vec<AmbiguitySet>) -> Result<Self> {
        if marginals.is_empty() {
            return Err(Error::InvalidInput("at least one marginal is required".into()));
        }
        for (i, m) in marginals.iter().enumerate() {
            if m.a != 0.0 {
                return Err(Error::InvalidInput(format!("marginal {i} must have a = 0, got {}", m.a)));
            }
            m.without_beta().validate()?;
        }
        let marginals: Vec<_> = marginals.iter().map(|m| m.without_beta()).collect();
        let d_hat = marginals.iter().map(|m| m.d).sum();
        Ok(MarginalSet { marginals, d_hat })
    }

    pub fn with_d_hat(mut self, d_hat: f64) -> Result<Self> {
        if !(d_hat >= 0.0) || !d_hat.is_finite() {
            return Err(Error::InvalidInput(format!("d_hat must be a nonnegative number, got {d_hat}")));
        }
        self.d_hat = d_hat;
        Ok(self)
    }

    pub fn marginals(&self) -> &[AmbiguitySet] {
        &self.marginals
    }

    pub fn b_bar(&self) -> f64 {
        self.marginals.iter().map(|m| m.b).sum()
    }

    pub fn mu_bar(&self) -> f64 {
        self.marginals.iter().map(|m| m.mu).sum()
    }

    pub fn d_bar(&self) -> f64 {
        self.marginals.iter().map(|m| m.d).sum()
    }

    pub fn d_hat(&self) -> f64 {
        self.d_hat
    }
}

/// Upper bound on `P(S >= t)` for `S` the sum of the marginals.
pub fn sum_tail_bound(set: &MarginalSet, t: f64) -> Result<f64> {
    check_range("t", t, 0.0, set.b_bar())?;
    let mu = set.mu_bar();
    if t <= mu {
        return Ok(1.0);
    }
    Ok((set.d_hat / (2.0 * (t - mu))).min(mu / t))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarBound {
    pub value: f64,
    /// False when the tail bound stays above `1 - alpha` on all of
    /// `[0, b_bar]`; `value` is then `b_bar`, where every VaR lies anyway.
    pub reached: bool,
}

/// Upper bound on the `alpha` quantile of the sum under any dependence.
pub fn var_bound(set: &MarginalSet, alpha: f64) -> Result<VarBound> {
    check_open("alpha", alpha, 0.0, 1.0)?;
    let target = 1.0 - alpha;
    let b_bar = set.b_bar();
    let (mut lo, mut hi) = (set.mu_bar(), b_bar);
    if sum_tail_bound(set, hi)? > target {
        return Ok(VarBound { value: b_bar, reached: false });
    }
    // Bound is 1 up to mu_bar and nonincreasing after, so bisect on [mu_bar, b_bar].
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if sum_tail_bound(set, mid)? <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(VarBound { value: hi, reached: true })
}

/// Upper bound on the expected reinsurer payment `E[min((S - z)+, m)]`
/// under any dependence. A layer reaching past `b_bar` is cut at `b_bar`,
/// which changes no payment.
pub fn sum_stoploss_bound(set: &MarginalSet, layer: Layer) -> Result<f64> {
    let (mu, b_bar, d) = (set.mu_bar(), set.b_bar(), set.d_hat);
    let z = layer.retention;
    check_range("z", z, 0.0, b_bar)?;
    let m = layer.cap.map_or(b_bar - z, |m| m.min(b_bar - z));
    if m <= 0.0 {
        return Ok(0.0);
    }
    let v = if z + m <= mu {
        m
    } else if z <= mu {
        (m * mu / (m + z)).min(z * (d / (2.0 * mu) - 1.0) + mu)
    } else {
        (m * mu / (m + z)).min(d * m / (2.0 * (m + z - mu)))
    };
    Ok(v.max(0.0))
}

/// Marginal sampled by inverse transform.
pub trait QuantileMarginal: Sync {
    fn quantile(&self, u: f64) -> f64;
}

/// `exp(m_bar + v N)` with `N` standard normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lognormal {
    pub m_bar: f64,
    pub v: f64,
}

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("standard normal")
}

impl Lognormal {
    pub fn new(m_bar: f64, v: f64) -> Result<Self> {
        if !m_bar.is_finite() || !(v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidInput(format!("lognormal needs finite m_bar and v > 0, got {m_bar}, {v}")));
        }
        Ok(Lognormal { m_bar, v })
    }

    pub fn mean(&self) -> f64 {
        (self.m_bar + self.v * self.v / 2.0).exp()
    }

    pub fn mad(&self) -> f64 {
        2.0 * self.mean() * (2.0 * std_normal().cdf(self.v / 2.0) - 1.0)
    }

    /// Mean-MAD set on `[0, q]` with `q` the `level` quantile.
    pub fn truncated_set(&self, level: f64) -> Result<AmbiguitySet> {
        check_open("truncation level", level, 0.0, 1.0)?;
        AmbiguitySet::new(0.0, self.quantile(level), self.mean(), self.mad())
    }
}

impl QuantileMarginal for Lognormal {
    fn quantile(&self, u: f64) -> f64 {
        (self.m_bar + self.v * std_normal().inverse_cdf(u)).exp()
    }
}

/// The three lognormal risks used in the aggregate examples.
pub fn lognormal_triple() -> [Lognormal; 3] {
    [
        Lognormal { m_bar: -0.3, v: 0.8 },
        Lognormal { m_bar: 0.4, v: 0.5 },
        Lognormal { m_bar: 0.8, v: 0.5 },
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Copula {
    Independent,
    Comonotonic,
}

impl std::str::FromStr for Copula {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "independent" | "indep" => Ok(Copula::Independent),
            "comonotonic" | "comon" => Ok(Copula::Comonotonic),
            _ => Err(Error::InvalidInput(format!("unknown copula {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

/// Simulated sums. Chunk `k` of the draws uses stream `k` of a ChaCha
/// generator seeded with `seed`, so results do not depend on thread count.
#[derive(Debug, Clone)]
pub struct SumSample {
    pub copula: Copula,
    sums: Vec<f64>,
}

pub fn simulate_sum<M: QuantileMarginal>(marginals: &[M], copula: Copula, n_draws: usize, seed: u64) -> Result<SumSample> {
    if n_draws < MIN_DRAWS {
        return Err(Error::InvalidInput(format!("need at least {MIN_DRAWS} draws, got {n_draws}")));
    }
    if marginals.is_empty() {
        return Err(Error::InvalidInput("at least one marginal is required".into()));
    }
    let n_chunks = n_draws.div_ceil(CHUNK);
    let sums = (0..n_chunks)
        .into_par_iter()
        .flat_map_iter(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let len = CHUNK.min(n_draws - k * CHUNK);
            (0..len)
                .map(|_| match copula {
                    Copula::Comonotonic => {
                        let u: f64 = rng.sample(Open01);
                        marginals.iter().map(|m| m.quantile(u)).sum::<f64>()
                    }
                    Copula::Independent => marginals.iter().map(|m| m.quantile(rng.sample(Open01))).sum(),
                })
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(SumSample { copula, sums })
}

impl SumSample {
    pub fn len(&self) -> usize {
        self.sums.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sums.is_empty()
    }

    pub fn sums(&self) -> &[f64] {
        &self.sums
    }

    fn mean_estimate(&self, f: impl Fn(f64) -> f64 + Sync) -> Estimate {
        let n = self.sums.len() as f64;
        let (s1, s2) = self
            .sums
            .par_iter()
            .map(|&x| {
                let y = f(x);
                (y, y * y)
            })
            .reduce(|| (0.0, 0.0), |p, q| (p.0 + q.0, p.1 + q.1));
        let mean = s1 / n;
        let var = ((s2 / n - mean * mean) * n / (n - 1.0)).max(0.0);
        Estimate { value: mean, std_error: (var / n).sqrt() }
    }

    /// Empirical `P(S >= t)`.
    pub fn tail(&self, t: f64) -> Estimate {
        self.mean_estimate(|x| if x >= t { 1.0 } else { 0.0 })
    }

    /// Empirical `E[min((S - z)+, m)]`.
    pub fn stoploss(&self, layer: Layer) -> Estimate {
        let z = layer.retention;
        let cap = layer.cap.unwrap_or(f64::INFINITY);
        self.mean_estimate(|x| (x - z).max(0.0).min(cap))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three() -> MarginalSet {
        let m = AmbiguitySet::new(0.0, 2.0, 1.0, 0.25).unwrap();
        MarginalSet::new(vec![m; 3]).unwrap()
    }

    #[test]
    fn tail_examples() {
        let s = three();
        assert_eq!(sum_tail_bound(&s, 4.0).unwrap(), 0.375);
        assert_eq!(sum_tail_bound(&s, 3.0).unwrap(), 1.0);
        assert!(sum_tail_bound(&s, 6.5).is_err());
        // Large d_hat leaves only the Markov term.
        let wide = three().with_d_hat(2.0 * 3.0 * 1.0 / 4.0).unwrap();
        assert_eq!(sum_tail_bound(&wide, 4.0).unwrap(), 0.75);
    }

    #[test]
    fn var_examples() {
        let s = three();
        let v = var_bound(&s, 0.8).unwrap();
        assert!(v.reached);
        assert!((v.value - 4.875).abs() < 1e-8);
        assert!(sum_tail_bound(&s, v.value).unwrap() <= 0.2);
        assert!(sum_tail_bound(&s, v.value - 1e-6).unwrap() > 0.2);
        let v = var_bound(&s, 0.99).unwrap();
        assert!(!v.reached);
        assert_eq!(v.value, 6.0);
    }

    #[test]
    fn stoploss_examples() {
        let s = three();
        let v = sum_stoploss_bound(&s, Layer::new(4.0, Some(1.0)).unwrap()).unwrap();
        assert!((v - 0.1875).abs() < 1e-15);
        assert_eq!(sum_stoploss_bound(&s, Layer::new(1.0, Some(1.5)).unwrap()).unwrap(), 1.5);
        let left = sum_stoploss_bound(&s, Layer::new(3.0 - 1e-12, Some(1.0)).unwrap()).unwrap();
        let right = sum_stoploss_bound(&s, Layer::new(3.0, Some(1.0)).unwrap()).unwrap();
        assert!((left - right).abs() < 1e-11);
        assert_eq!(sum_stoploss_bound(&s, Layer::unlimited(6.0)).unwrap(), 0.0);
    }

    #[test]
    fn comonotonic_identical_marginals_scale() {
        let m = Lognormal::new(0.1, 0.4).unwrap();
        let one = simulate_sum(&[m], Copula::Comonotonic, 2000, 5).unwrap();
        let three = simulate_sum(&[m, m, m], Copula::Comonotonic, 2000, 5).unwrap();
        for (x, y) in one.sums().iter().zip(three.sums()) {
            assert!((3.0 * x - y).abs() <= 1e-12 * y);
        }
    }

    #[test]
    fn simulation_is_seeded_and_checked() {
        let t = lognormal_triple();
        let a = simulate_sum(&t, Copula::Independent, 5000, 9).unwrap();
        let b = simulate_sum(&t, Copula::Independent, 5000, 9).unwrap();
        assert_eq!(a.sums(), b.sums());
        assert!(simulate_sum(&t, Copula::Independent, 999, 9).is_err());
    }

    #[test]
    fn lognormal_moments() {
        let m = Lognormal::new(-0.3, 0.8).unwrap();
        let s = simulate_sum(&[m], Copula::Independent, 400_000, 1).unwrap();
        let mean = s.sums().iter().sum::<f64>() / s.len() as f64;
        let mad = s.sums().iter().map(|x| (x - m.mean()).abs()).sum::<f64>() / s.len() as f64;
        assert!((mean - m.mean()).abs() < 0.01);
        assert!((mad - m.mad()).abs() < 0.01);
        assert!(m.truncated_set(DEFAULT_TRUNCATION).is_ok());
    }
}
