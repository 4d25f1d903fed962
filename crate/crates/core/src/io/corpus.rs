//! Deterministic random cone corpus covering the degenerate cases.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{q, Q};
use crate::cones::{Cone, Space};
use crate::linalg::{self, Matrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConeKind {
    Pointed,
    Subspace,
    HalfSpace,
    Unpointed,
    LowerDimensional,
    Zero,
    Full,
    Inequalities,
    Gram,
}

impl ConeKind {
    pub const CYCLE: [ConeKind; 9] = [
        ConeKind::Pointed,
        ConeKind::Inequalities,
        ConeKind::Unpointed,
        ConeKind::HalfSpace,
        ConeKind::LowerDimensional,
        ConeKind::Subspace,
        ConeKind::Gram,
        ConeKind::Zero,
        ConeKind::Full,
    ];
}

#[derive(Clone, Debug)]
pub struct CorpusConfig {
    pub count: usize,
    pub min_dim: usize,
    pub max_dim: usize,
    pub max_entry: i64,
    pub seed: u64,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig { count: 54, min_dim: 1, max_dim: 4, max_entry: 3, seed: 2024 }
    }
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: String,
    pub kind: ConeKind,
    pub cone: Arc<Cone>,
}

fn rand_vec(rng: &mut ChaCha8Rng, n: usize, m: i64) -> Vec<Q> {
    loop {
        let v: Vec<Q> = (0..n).map(|_| q(rng.gen_range(-m..=m))).collect();
        if !linalg::is_zero_vec(&v) {
            return v;
        }
    }
}

fn rand_gram(rng: &mut ChaCha8Rng, n: usize) -> Space {
    loop {
        let mut g = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..i {
                let x = q(rng.gen_range(-1..=1));
                g.set(i, j, x.clone());
                g.set(j, i, x);
            }
            g.set(i, i, q(rng.gen_range(2..=3)));
        }
        if let Ok(s) = Space::with_gram(g) {
            if !s.is_standard() || n == 1 {
                return s;
            }
        }
    }
}

fn one(rng: &mut ChaCha8Rng, kind: ConeKind, n: usize, m: i64) -> Cone {
    let e = Space::euclidean(n);
    match kind {
        ConeKind::Pointed => {
            let k = rng.gen_range(n..=n + 2);
            let rays: Vec<Vec<Q>> = (0..k).map(|_| rand_vec(rng, n, m)).collect();
            let c = Cone::from_generators(&e, &rays, &[]).unwrap();
            if c.is_pointed() {
                c
            } else {
                // fall back on a simplicial cone
                Cone::from_generators(&e, &Matrix::identity(n).row_vecs(), &[]).unwrap()
            }
        }
        ConeKind::Inequalities => {
            let k = rng.gen_range(1..=n + 2);
            let ineqs: Vec<Vec<Q>> = (0..k).map(|_| rand_vec(rng, n, m)).collect();
            Cone::from_halfspaces(&e, &ineqs, &[]).unwrap()
        }
        ConeKind::Unpointed => {
            let k = rng.gen_range(1..=n.max(2));
            let rays: Vec<Vec<Q>> = (0..k).map(|_| rand_vec(rng, n, m)).collect();
            let lin = vec![rand_vec(rng, n, m)];
            Cone::from_generators(&e, &rays, &lin).unwrap()
        }
        ConeKind::HalfSpace => Cone::from_halfspaces(&e, &[rand_vec(rng, n, m)], &[]).unwrap(),
        ConeKind::LowerDimensional => {
            let basis: Vec<Vec<Q>> = (0..n.saturating_sub(1).max(1)).map(|_| rand_vec(rng, n, m)).collect();
            let k = rng.gen_range(1..=basis.len() + 1);
            let rays: Vec<Vec<Q>> = (0..k)
                .map(|_| {
                    let mut v = vec![q(0); n];
                    for b in &basis {
                        let c = q(rng.gen_range(0..=2));
                        v = linalg::add(&v, &linalg::scale(b, &c));
                    }
                    if linalg::is_zero_vec(&v) {
                        basis[0].clone()
                    } else {
                        v
                    }
                })
                .collect();
            Cone::from_generators(&e, &rays, &[]).unwrap()
        }
        ConeKind::Subspace => {
            let k = rng.gen_range(1..=n);
            let b: Vec<Vec<Q>> = (0..k).map(|_| rand_vec(rng, n, m)).collect();
            Cone::subspace(&e, &b).unwrap()
        }
        ConeKind::Zero => Cone::zero(&e),
        ConeKind::Full => Cone::full(&e),
        ConeKind::Gram => {
            let s = rand_gram(rng, n);
            let k = rng.gen_range(1..=n + 1);
            let ineqs: Vec<Vec<Q>> = (0..k).map(|_| rand_vec(rng, n, m)).collect();
            Cone::from_halfspaces(&s, &ineqs, &[]).unwrap()
        }
    }
}

/// `count` cones cycling through every kind, dimensions cycling through the range.
pub fn random_corpus(cfg: &CorpusConfig) -> Vec<CorpusEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let dims: Vec<usize> = (cfg.min_dim..=cfg.max_dim).collect();
    (0..cfg.count)
        .map(|i| {
            let kind = ConeKind::CYCLE[i % ConeKind::CYCLE.len()];
            let n = dims[(i / ConeKind::CYCLE.len() + i) % dims.len()];
            let cone = Arc::new(one(&mut rng, kind, n, cfg.max_entry));
            CorpusEntry { name: format!("random-{i:02}-{kind:?}-d{n}").to_lowercase(), kind, cone }
        })
        .collect()
}

/// Random hyperplane-arrangement fan: `c` cut by up to `m` hyperplanes, keeping the
/// cells of full dimension.
pub fn arrangement_fan(c: &Cone, m: usize, seed: u64) -> Vec<Arc<Cone>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = c.ambient_dim();
    let hs: Vec<Vec<Q>> = (0..m).map(|_| rand_vec(&mut rng, n, 3)).collect();
    let mut cells: Vec<Arc<Cone>> = Vec::new();
    for signs in 0..(1u32 << m) {
        let mut ineqs = c.facets().to_vec();
        for (k, h) in hs.iter().enumerate() {
            let cov = c.space().lower(h);
            ineqs.push(if signs >> k & 1 == 1 { linalg::neg(&cov) } else { cov });
        }
        let cell = Cone::from_covectors(c.space(), &ineqs, c.equalities()).unwrap();
        if cell.dim() == c.dim() && !cells.iter().any(|x| **x == cell) {
            cells.push(Arc::new(cell));
        }
    }
    cells
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_covers_kinds() {
        let c = random_corpus(&CorpusConfig::default());
        assert!(c.len() >= 50);
        assert!(c.iter().any(|e| e.cone.is_subspace() && e.cone.dim() > 0));
        assert!(c.iter().any(|e| e.cone.is_zero()));
        assert!(c.iter().any(|e| !e.cone.is_pointed() && !e.cone.is_subspace()));
        assert!(c.iter().any(|e| !e.cone.is_full_dimensional() && !e.cone.is_zero()));
        assert!(c.iter().any(|e| !e.cone.space().is_standard()));
        for d in 1..=4 {
            assert!(c.iter().any(|e| e.cone.ambient_dim() == d));
        }
        for e in &c {
            assert!(e.cone.validate(), "{}", e.name);
        }
    }

    #[test]
    fn arrangement_cells_form_a_fan() {
        let s = Space::euclidean(3);
        let c = Cone::from_generators(&s, &Matrix::identity(3).row_vecs(), &[]).unwrap();
        let cells = arrangement_fan(&c, 2, 5);
        assert!(!cells.is_empty());
        crate::indicator::validate_fan(&c, &cells).unwrap();
    }
}
