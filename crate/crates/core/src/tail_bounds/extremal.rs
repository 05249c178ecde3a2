//! Members of the ambiguity set that attain the tail bounds.

use serde::{Deserialize, Serialize};

use super::Shifted;
use crate::ambiguity::AmbiguitySet;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub x: f64,
    pub p: f64,
}

/// Interval on which other extremal distributions may spread `mass`
/// differently from the returned canonical member.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeRegion {
    pub lo: f64,
    pub hi: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DiscreteDistribution {
    pub atoms: Vec<Atom>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub free: Option<FreeRegion>,
}

impl DiscreteDistribution {
    /// Build from `(x, p)` pairs, dropping negligible atoms and merging
    /// equal support points. Atoms come out sorted by `x`.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let mut atoms: Vec<Atom> = pairs
            .into_iter()
            .filter(|&(_, p)| p > 1e-15)
            .map(|(x, p)| Atom { x, p })
            .collect();
        atoms.sort_by(|l, r| l.x.total_cmp(&r.x));
        let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
        for atom in atoms {
            match merged.last_mut() {
                Some(last) if last.x == atom.x => last.p += atom.p,
                _ => merged.push(atom),
            }
        }
        DiscreteDistribution { atoms: merged, free: None }
    }

    pub fn point(x: f64) -> Self {
        DiscreteDistribution { atoms: vec![Atom { x, p: 1.0 }], free: None }
    }

    pub fn mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.p).sum()
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|a| a.p * a.x).sum()
    }

    /// Mean absolute deviation around `center`.
    pub fn mad_about(&self, center: f64) -> f64 {
        self.atoms.iter().map(|a| a.p * (a.x - center).abs()).sum()
    }

    pub fn prob_ge(&self, t: f64) -> f64 {
        self.atoms.iter().filter(|a| a.x >= t).map(|a| a.p).sum()
    }

    pub fn prob_gt(&self, t: f64) -> f64 {
        self.atoms.iter().filter(|a| a.x > t).map(|a| a.p).sum()
    }

    pub fn expect(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.atoms.iter().map(|a| a.p * f(a.x)).sum()
    }
}

/// Which bound the distribution should attain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    /// Maximises `P(X >= t)`.
    Sup,
    /// Minimises `P(X > t)`.
    Inf,
}

/// Support points with a symbolic anchor so known coordinates are placed
/// exactly instead of being recomputed through the shift.
#[derive(Clone, Copy)]
enum Pt {
    Lo,
    Hi,
    Mean,
    Thr,
    At(f64),
}

/// One distribution attaining `sup_tail` or `inf_tail` at `t`. `beta` on the
/// set is ignored.
pub fn worst_case_distribution(set: &AmbiguitySet, t: f64, mode: Mode) -> Result<DiscreteDistribution> {
    let set = set.without_beta();
    set.validate()?;
    set.check_threshold(t)?;
    let sh = Shifted::of(&set);
    if sh.is_point_mass() {
        return Ok(DiscreteDistribution::point(set.mu));
    }
    let Shifted { m, w, d } = sh;
    let s = t - set.a;
    let (tau1, tau2) = sh.knots();

    let (parts, free): (Vec<(Pt, f64)>, Option<(Pt, Pt, f64)>) = match mode {
        Mode::Sup => {
            if s <= tau1 || s <= 0.0 {
                let p = d / (2.0 * (m - s));
                let upper = m + d / (2.0 * (1.0 - p));
                (vec![(Pt::Thr, p), (Pt::At(upper), 1.0 - p)], Some((Pt::Thr, Pt::Hi, 1.0)))
            } else if s <= m {
                let p_hi = d / (2.0 * (w - m));
                let p_t = m / s - w * d / (2.0 * s * (w - m));
                let at_t = if s == m { Pt::Mean } else { Pt::Thr };
                (vec![(Pt::Lo, 1.0 - p_hi - p_t), (at_t, p_t), (Pt::Hi, p_hi)], None)
            } else if s < tau2 {
                let p_lo = d / (2.0 * m);
                let upper = m / (1.0 - p_lo);
                (vec![(Pt::Lo, p_lo), (Pt::At(upper), 1.0 - p_lo)], Some((Pt::Thr, Pt::Hi, 1.0 - p_lo)))
            } else {
                let p = d / (2.0 * (s - m));
                let lower = ((m - p * s) / (1.0 - p)).max(0.0);
                (vec![(Pt::At(lower), 1.0 - p), (Pt::Thr, p)], Some((Pt::Lo, Pt::Mean, 1.0 - p)))
            }
        }
        Mode::Inf => {
            if s <= tau1 && s < m {
                let p = d / (2.0 * (m - s));
                let upper = (m - p * s) / (1.0 - p);
                (vec![(Pt::Thr, p), (Pt::At(upper), 1.0 - p)], Some((Pt::Thr, Pt::Hi, 1.0 - p)))
            } else if s <= m {
                let p_hi = d / (2.0 * (w - m));
                let lower = ((m - p_hi * w) / (1.0 - p_hi)).clamp(0.0, s);
                (vec![(Pt::At(lower), 1.0 - p_hi), (Pt::Hi, p_hi)], None)
            } else if s < tau2 && s < w {
                let p_lo = d / (2.0 * m);
                let p_hi = (m - s + d * s / (2.0 * m)) / (w - s);
                (vec![(Pt::Lo, p_lo), (Pt::Thr, 1.0 - p_lo - p_hi), (Pt::Hi, p_hi)], None)
            } else {
                let p = d / (2.0 * (s - m));
                let lower = (m - d / (2.0 * (1.0 - p))).max(0.0);
                (vec![(Pt::At(lower), 1.0 - p), (Pt::Thr, p)], Some((Pt::Lo, Pt::Thr, 1.0)))
            }
        }
    };

    let place = |pt: Pt| match pt {
        Pt::Lo => set.a,
        Pt::Hi => set.b,
        Pt::Mean => set.mu,
        Pt::Thr => t,
        Pt::At(x) => (set.a + x).clamp(set.a, set.b),
    };
    let mut dist = DiscreteDistribution::from_pairs(parts.into_iter().map(|(pt, p)| (place(pt), p)));
    dist.free = free.map(|(lo, hi, mass)| FreeRegion { lo: place(lo), hi: place(hi), mass });
    Ok(dist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tail_bounds::{inf_tail, sup_tail};
    use approx::assert_abs_diff_eq;

    fn check(set: &AmbiguitySet, t: f64, mode: Mode) -> DiscreteDistribution {
        let dist = worst_case_distribution(set, t, mode).unwrap();
        assert_abs_diff_eq!(dist.mass(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(dist.mean(), set.mu, epsilon = 1e-12);
        assert_abs_diff_eq!(dist.mad_about(set.mu), set.d, epsilon = 1e-12);
        match mode {
            Mode::Sup => assert_abs_diff_eq!(dist.prob_ge(t), sup_tail(set, t).unwrap().value, epsilon = 1e-12),
            Mode::Inf => assert_abs_diff_eq!(dist.prob_gt(t), inf_tail(set, t).unwrap().value, epsilon = 1e-12),
        }
        dist
    }

    #[test]
    fn three_point_member() {
        let set = AmbiguitySet::new(0.0, 3.0, 1.0, 1.0).unwrap();
        let dist = check(&set, 0.5, Mode::Sup);
        let xs: Vec<f64> = dist.atoms.iter().map(|a| a.x).collect();
        assert_eq!(xs, vec![0.0, 0.5, 3.0]);
        assert_abs_diff_eq!(dist.atoms[2].p, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(dist.atoms[1].p, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn atom_at_threshold_above_tau2() {
        let set = AmbiguitySet::new(0.0, 3.0, 1.0, 0.25).unwrap();
        let dist = check(&set, 1.5, Mode::Sup);
        let at_t = dist.atoms.iter().find(|a| a.x == 1.5).unwrap();
        assert_abs_diff_eq!(at_t.p, 0.25, epsilon = 1e-15);
        let free = dist.free.unwrap();
        assert_eq!((free.lo, free.hi), (0.0, 1.0));
    }

    #[test]
    fn point_mass_member() {
        let set = AmbiguitySet::new(0.0, 3.0, 1.0, 0.0).unwrap();
        let dist = worst_case_distribution(&set, 0.5, Mode::Sup).unwrap();
        assert_eq!(dist.atoms, vec![Atom { x: 1.0, p: 1.0 }]);
    }

    #[test]
    fn every_region_both_modes() {
        let set = AmbiguitySet::new(-1.0, 2.0, 0.2, 0.6).unwrap();
        for i in 0..=60 {
            let t = -1.0 + 3.0 * i as f64 / 60.0;
            check(&set, t, Mode::Sup);
            check(&set, t, Mode::Inf);
        }
    }
}
