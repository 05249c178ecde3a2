#![allow(dead_code)]

use madbound::AmbiguitySet;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random feasible set with `beta` drawn from its feasible range.
pub fn random_set(rng: &mut ChaCha8Rng) -> AmbiguitySet {
    let a: f64 = rng.gen_range(-5.0..5.0);
    let width: f64 = rng.gen_range(0.5..20.0);
    let b = a + width;
    let mu = a + width * rng.gen_range(0.05..0.95);
    let d_max = 2.0 * (mu - a) * (b - mu) / width;
    let d = d_max * rng.gen_range(0.02..0.98);
    let lo = d / (2.0 * (b - mu));
    let hi = 1.0 - d / (2.0 * (mu - a));
    let beta = rng.gen_range(lo..=hi);
    let set = AmbiguitySet { a, b, mu, d, beta: Some(beta) };
    set.validate().expect("generator produces feasible sets");
    set
}

pub fn uniform_in(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.gen::<f64>()
}
