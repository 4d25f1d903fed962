//! Deterministic rational sample points: uniform grid-like draws plus structured
//! combinations of cone generators that land on walls.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{qq, Q};
use crate::linalg;

pub const DENOMINATORS: [i64; 5] = [1, 2, 3, 5, 8];

#[derive(Clone, Debug)]
pub struct SamplerConfig {
    pub samples: usize,
    pub max_coord: i64,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig { samples: 1000, max_coord: 20, seed: 1 }
    }
}

pub struct Sampler {
    rng: ChaCha8Rng,
    max_coord: i64,
}

impl Sampler {
    pub fn new(seed: u64, max_coord: i64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed), max_coord: max_coord.max(1) }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Numerator in `[−D, D]`, denominator in `{1, 2, 3, 5, 8}`.
    pub fn rational(&mut self) -> Q {
        let n = self.rng.gen_range(-self.max_coord..=self.max_coord);
        let d = *DENOMINATORS.choose(&mut self.rng).unwrap();
        qq(n, d)
    }

    pub fn small(&mut self) -> Q {
        let n = self.rng.gen_range(-3..=3);
        let d = *DENOMINATORS[..3].choose(&mut self.rng).unwrap();
        qq(n, d)
    }

    pub fn positive_small(&mut self) -> Q {
        let n = self.rng.gen_range(1..=4);
        let d = *DENOMINATORS[..3].choose(&mut self.rng).unwrap();
        qq(n, d)
    }

    pub fn vector(&mut self, n: usize) -> Vec<Q> {
        (0..n).map(|_| self.rational()).collect()
    }

    /// `α·anchor + Σ β_k v_k` with up to three pool vectors.
    pub fn structured(&mut self, n: usize, pool: &[Vec<Q>], anchors: &[Vec<Q>]) -> Vec<Q> {
        let mut h = vec![qq(0, 1); n];
        if !anchors.is_empty() {
            let a = anchors.choose(&mut self.rng).unwrap().clone();
            let alpha = match self.rng.gen_range(0..4) {
                0 => qq(0, 1),
                1 | 2 => qq(1, 1),
                _ => self.small(),
            };
            h = linalg::scale(&a, &alpha);
        }
        if !pool.is_empty() {
            let k = self.rng.gen_range(0..=3);
            for _ in 0..k {
                let v = pool.choose(&mut self.rng).unwrap();
                let b = if self.rng.gen_bool(0.5) { self.positive_small() } else { self.small() };
                h = linalg::add(&h, &linalg::scale(v, &b));
            }
        }
        h
    }
}

/// `fixed` points (deduplicated) first, then alternating uniform and structured
/// draws until `count` points are produced.
pub fn sample_points(
    n: usize,
    fixed: &[Vec<Q>],
    pool: &[Vec<Q>],
    anchors: &[Vec<Q>],
    cfg: &SamplerConfig,
) -> Vec<Vec<Q>> {
    let mut s = Sampler::new(cfg.seed, cfg.max_coord);
    let mut seen: BTreeSet<Vec<Q>> = BTreeSet::new();
    let mut out = Vec::with_capacity(cfg.samples);
    for p in fixed {
        if out.len() >= cfg.samples {
            break;
        }
        if seen.insert(p.clone()) {
            out.push(p.clone());
        }
    }
    let mut i = 0usize;
    let mut stalls = 0usize;
    while out.len() < cfg.samples {
        let mut p = if i % 2 == 0 { s.vector(n) } else { s.structured(n, pool, anchors) };
        if stalls > 8 {
            // the plain grid is exhausted in low dimension: rescale structured points
            let k = s.rational();
            p = linalg::scale(&s.structured(n, pool, anchors), &k);
            p = linalg::add(&p, &s.vector(n));
        }
        i += 1;
        if seen.insert(p.clone()) {
            out.push(p);
            stalls = 0;
        } else {
            stalls += 1;
            if stalls > 5000 {
                break;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q;

    #[test]
    fn deterministic_and_in_range() {
        let cfg = SamplerConfig { samples: 200, max_coord: 5, seed: 7 };
        let pool = vec![vec![q(1), q(0)], vec![q(1), q(1)]];
        let a = sample_points(2, &[vec![q(0), q(0)]], &pool, &[vec![q(2), q(1)]], &cfg);
        let b = sample_points(2, &[vec![q(0), q(0)]], &pool, &[vec![q(2), q(1)]], &cfg);
        assert_eq!(a, b);
        assert_eq!(a.len(), 200);
        assert_eq!(a[0], vec![q(0), q(0)]);
    }
}
