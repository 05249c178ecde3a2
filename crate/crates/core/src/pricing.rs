//! Robust monopoly pricing: a seller posts price `r`, a buyer with valuation
//! `B` buys when `B > r`. Over the ambiguity set of `B` the worst-case
//! revenue is `F(r) = r * inf P(B > r)`, and the maxmin price maximises it.

use serde::{Deserialize, Serialize};

use crate::ambiguity::AmbiguitySet;
use crate::error::{check_range, Error, Result};
use crate::tail_bounds::Shifted;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PriceRegime {
    /// Price below the mean on the first concave piece of `F`.
    R1,
    /// Price equal to the mean.
    Mu,
    /// Price above the mean on the second concave piece of `F`.
    R2,
    /// Large support: the better of the two local maxima, found numerically.
    NumericTie,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MadThresholds {
    pub d1: f64,
    pub d2: f64,
    pub d_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PricingSolution {
    pub r_star: f64,
    pub profit: f64,
    pub regime: PriceRegime,
    pub d1: f64,
    pub d2: f64,
    pub d_max: f64,
}

/// Worst-case expected revenue at price `r`.
pub fn worst_case_profit(set: &AmbiguitySet, r: f64) -> Result<f64> {
    let set = set.without_beta();
    set.validate()?;
    check_range("r", r, set.a, set.b)?;
    Ok(r * Shifted::of(&set).inf_tail(r - set.a).0)
}

fn require_zero_floor(set: &AmbiguitySet) -> Result<()> {
    if set.a != 0.0 {
        return Err(Error::InvalidInput(format!(
            "pricing needs valuations supported on [0, b], got a = {}",
            set.a
        )));
    }
    Ok(())
}

fn check_mu_b(mu: f64, b: f64) -> Result<()> {
    if !(mu > 0.0 && b > mu && b.is_finite()) {
        return Err(Error::InvalidInput(format!("need 0 < mu < b, got mu={mu} b={b}")));
    }
    Ok(())
}

/// Price below the mean that maximises the first revenue piece.
pub fn r1(mu: f64, d: f64) -> f64 {
    mu - (d * mu / 2.0).sqrt()
}

/// Price above the mean that maximises the second revenue piece.
pub fn r2(mu: f64, b: f64, d: f64) -> f64 {
    let inner = b * (2.0 * mu - d) * (2.0 * mu * (b - mu) - b * d);
    b - inner.max(0.0).sqrt() / (2.0 * mu - d)
}

/// MAD thresholds at which the maxmin price switches regime. `d1` comes
/// from a bracketed root of `F(r1) = F(mu)`; the direct closed form for it
/// is `0/0` at `b = 2 mu`.
pub fn mad_thresholds(mu: f64, b: f64) -> Result<MadThresholds> {
    check_mu_b(mu, b)?;
    // With u = sqrt(d): F(r1) - F(mu) = c u^2 - sqrt(2 mu) u + mu.
    let c = (b - 2.0 * mu) / (2.0 * (b - mu));
    let k = (2.0 * mu).sqrt();
    let g = |u: f64| c * u * u - k * u + mu;
    let dg = |u: f64| 2.0 * c * u - k;
    let (mut lo, mut hi) = (0.0, k);
    // Rationalised smaller root, used only as the starting point.
    let mut u = (k / (1.0 + (mu / (b - mu)).sqrt())).clamp(lo, hi);
    for _ in 0..200 {
        let gu = g(u);
        if gu == 0.0 {
            break;
        }
        if gu > 0.0 {
            lo = u;
        } else {
            hi = u;
        }
        let newton = u - gu / dg(u);
        u = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if hi - lo <= 1e-15 * k || (gu.abs() <= 1e-15 * mu && (newton - u).abs() <= 1e-15) {
            break;
        }
    }
    Ok(MadThresholds {
        d1: u * u,
        d2: 2.0 * (b * mu - mu * mu) / (2.0 * b - mu),
        d_max: 2.0 * (b - mu) * mu / b,
    })
}

fn profit_at(sh: &Shifted, r: f64) -> f64 {
    r * sh.inf_tail(r).0
}

/// Maxmin price over valuations supported on `[0, b]`.
pub fn optimal_price(set: &AmbiguitySet) -> Result<PricingSolution> {
    let set = set.without_beta();
    set.validate()?;
    require_zero_floor(&set)?;
    let (mu, b, d) = (set.mu, set.b, set.d);
    check_mu_b(mu, b)?;
    let MadThresholds { d1, d2, d_max } = mad_thresholds(mu, b)?;
    let solution = |r_star: f64, profit: f64, regime| PricingSolution { r_star, profit, regime, d1, d2, d_max };
    if d <= 0.0 {
        // Revenue tends to mu as the price approaches mu from below.
        return Ok(solution(mu, mu, PriceRegime::R1));
    }
    let sh = Shifted::of(&set);
    let (tau1, tau2) = sh.knots();
    let cand1 = r1(mu, d).clamp(0.0, tau1);
    let cand2 = r2(mu, b, d).clamp(mu, tau2);

    let (r_star, regime) = if b <= 5.0 * mu {
        if d <= d1 {
            (cand1, PriceRegime::R1)
        } else if d <= d2 {
            (mu, PriceRegime::Mu)
        } else {
            (cand2, PriceRegime::R2)
        }
    } else if d <= d2 {
        (cand1, PriceRegime::R1)
    } else {
        let (f1, f2) = (profit_at(&sh, cand1), profit_at(&sh, cand2));
        (if f2 > f1 { cand2 } else { cand1 }, PriceRegime::NumericTie)
    };
    Ok(solution(r_star, profit_at(&sh, r_star), regime))
}

/// For `b > 5 mu`, the MAD in `(d2, d_max]` where both local maxima give the
/// same revenue, found by bisection. `None` when one side wins throughout.
pub fn tie_mad(mu: f64, b: f64) -> Result<Option<f64>> {
    check_mu_b(mu, b)?;
    let th = mad_thresholds(mu, b)?;
    let gap = |d: f64| {
        let sh = Shifted { m: mu, w: b, d };
        let (tau1, tau2) = sh.knots();
        profit_at(&sh, r1(mu, d).clamp(0.0, tau1)) - profit_at(&sh, r2(mu, b, d).clamp(mu, tau2))
    };
    let (mut lo, mut hi) = (th.d2, th.d_max);
    let (g_lo, g_hi) = (gap(lo), gap(hi));
    if g_lo == 0.0 {
        return Ok(Some(lo));
    }
    if g_lo.signum() == g_hi.signum() {
        return Ok(None);
    }
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if gap(mid).signum() == g_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}
