//! Floating-point importance sampling of `∫ [C](H) e^{⟨λ,H⟩} q(H) dH`, used as an
//! independent check of the exact transforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use super::poly::Poly;
use crate::arith::{complex_to_f64, to_f64, CQ, Q};
use crate::cones::Cone;
use crate::error::{Error, Result};

const CHUNK: usize = 1 << 14;

#[derive(Clone, Debug, Serialize)]
pub struct McEstimate {
    pub re: f64,
    pub im: f64,
    pub stderr_re: f64,
    pub stderr_im: f64,
    pub samples: usize,
    pub seed: u64,
}

impl McEstimate {
    /// `|estimate − exact| ≤ k·stderr` in both components (with a tiny absolute slack).
    pub fn agrees_with(&self, exact: (f64, f64), k: f64) -> bool {
        let tol = |s: f64, v: f64| k * s + 1e-12 * (1.0 + v.abs());
        (self.re - exact.0).abs() <= tol(self.stderr_re, exact.0)
            && (self.im - exact.1).abs() <= tol(self.stderr_im, exact.1)
    }

    pub fn relative_error(&self, exact: (f64, f64)) -> f64 {
        let d = ((self.re - exact.0).powi(2) + (self.im - exact.1).powi(2)).sqrt();
        d / (exact.0.powi(2) + exact.1.powi(2)).sqrt().max(f64::MIN_POSITIVE)
    }
}

/// Surface area of the unit sphere in `R^d`.
fn sphere_area(d: usize) -> f64 {
    use std::f64::consts::PI;
    match d {
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 2.0 * PI / (d as f64 - 2.0) * sphere_area(d - 2),
    }
}

fn gram_schmidt(basis: &[Vec<f64>], g: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let ip = |a: &[f64], b: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..a.len() {
            for j in 0..b.len() {
                s += a[i] * g[i][j] * b[j];
            }
        }
        s
    };
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in basis {
        let mut w = v.clone();
        for e in &out {
            let c = ip(&w, e);
            for (x, y) in w.iter_mut().zip(e) {
                *x -= c * y;
            }
        }
        let nrm = ip(&w, &w).sqrt();
        out.push(w.iter().map(|x| x / nrm).collect());
    }
    out
}

fn poly_f64(q: &Poly<Q>) -> Vec<(Vec<u32>, f64)> {
    q.terms().map(|(e, c)| (e.clone(), to_f64(c))).collect()
}

fn eval_f64(p: &[(Vec<u32>, f64)], h: &[f64]) -> f64 {
    p.iter().map(|(e, c)| c * e.iter().zip(h).map(|(&k, x)| x.powi(k as i32)).product::<f64>()).sum()
}

/// Importance-sampled estimate with a radial density `∝ e^{−κ|y|}` on `V_C ∩ V^{F_0}`.
pub fn monte_carlo_cross_check(c: &Cone, q: &Poly<Q>, lambda: &[CQ], samples: usize, seed: u64) -> Result<McEstimate> {
    let n = c.ambient_dim();
    if lambda.len() != n || q.nvars() != n {
        return Err(Error::Dimension { expected: n, got: lambda.len().min(q.nvars()) });
    }
    let space = c.space();
    let g = space.gram_matrix();
    let mu: Vec<(f64, f64)> = (0..n).map(|i| complex_to_f64(&crate::arith::cdot(lambda, &g.row(i)))).collect();
    let w = c.pointed_span();
    let d = w.dim();
    let qf = poly_f64(q);
    if d == 0 {
        let v = eval_f64(&qf, &vec![0.0; n]);
        return Ok(McEstimate { re: v, im: 0.0, stderr_re: 0.0, stderr_im: 0.0, samples, seed });
    }
    // decay rate along each generator
    let mut kappa = f64::INFINITY;
    for r in c.rays() {
        let rf: Vec<f64> = r.iter().map(to_f64).collect();
        let decay: f64 = -mu.iter().zip(&rf).map(|(m, x)| m.0 * x).sum::<f64>();
        let exact = -crate::arith::cdot(lambda, &g.mul_vec(r)).re;
        if exact <= Q::from_integer(0.into()) {
            return Err(Error::Divergent);
        }
        kappa = kappa.min(decay / to_f64(&space.norm2(r)).sqrt());
    }
    let gf: Vec<Vec<f64>> = (0..n).map(|i| g.row(i).iter().map(to_f64).collect()).collect();
    let basis: Vec<Vec<f64>> = w.basis().iter().map(|b| b.iter().map(to_f64).collect()).collect();
    let onb = gram_schmidt(&basis, &gf);
    let facets: Vec<Vec<f64>> = c.facets().iter().map(|a| a.iter().map(to_f64).collect()).collect();
    let radial = Gamma::new(d as f64, 1.0 / kappa).map_err(|e| Error::Input(e.to_string()))?;
    let log_norm = (d as f64) * kappa.ln() - ln_factorial(d - 1) - sphere_area(d).ln();

    let chunks = samples.div_ceil(CHUNK);
    let sums: Vec<[f64; 4]> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let m = CHUNK.min(samples - k * CHUNK);
            let mut acc = [0.0; 4];
            let mut y = vec![0.0; d];
            let mut h = vec![0.0; n];
            for _ in 0..m {
                let mut nrm = 0.0f64;
                for yi in y.iter_mut() {
                    *yi = rng.sample(StandardNormal);
                    nrm += *yi * *yi;
                }
                let nrm = nrm.sqrt();
                let rad: f64 = radial.sample(&mut rng);
                for x in h.iter_mut() {
                    *x = 0.0;
                }
                for (yi, e) in y.iter().zip(&onb) {
                    let s = yi / nrm * rad;
                    for (x, b) in h.iter_mut().zip(e) {
                        *x += s * b;
                    }
                }
                let inside = facets.iter().all(|a| a.iter().zip(&h).map(|(p, x)| p * x).sum::<f64>() >= 0.0);
                if !inside {
                    continue;
                }
                let (er, ei) = mu.iter().zip(&h).fold((0.0, 0.0), |(a, b), (m, x)| (a + m.0 * x, b + m.1 * x));
                let logp = log_norm - kappa * rad;
                let mag = (er - logp).exp() * eval_f64(&qf, &h);
                let (vr, vi) = (mag * ei.cos(), mag * ei.sin());
                acc[0] += vr;
                acc[1] += vr * vr;
                acc[2] += vi;
                acc[3] += vi * vi;
            }
            acc
        })
        .collect();
    let mut t = [0.0; 4];
    for s in sums {
        for i in 0..4 {
            t[i] += s[i];
        }
    }
    let nf = samples as f64;
    let (mr, mi) = (t[0] / nf, t[2] / nf);
    let var = |s2: f64, m: f64| ((s2 / nf - m * m).max(0.0) / (nf - 1.0).max(1.0)).sqrt();
    Ok(McEstimate { re: mr, im: mi, stderr_re: var(t[1], mr), stderr_im: var(t[3], mi), samples, seed })
}

fn ln_factorial(k: usize) -> f64 {
    (1..=k).map(|i| (i as f64).ln()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{creal, q};
    use crate::cones::Space;
    use crate::linalg::Matrix;

    fn lam(v: &[i64]) -> Vec<CQ> {
        v.iter().map(|&x| creal(q(x))).collect()
    }

    #[test]
    fn closed_forms() {
        let s2 = Space::euclidean(2);
        let quad = Cone::from_generators(&s2, &Matrix::identity(2).row_vecs(), &[]).unwrap();
        let e = monte_carlo_cross_check(&quad, &Poly::one(2), &lam(&[-1, -2]), 200_000, 7).unwrap();
        assert!(e.agrees_with((0.5, 0.0), 4.0), "{e:?}");
        let hl = Cone::from_generators(&Space::euclidean(1), &[vec![q(1)]], &[]).unwrap();
        let e = monte_carlo_cross_check(&hl, &Poly::one(1), &lam(&[-3]), 100_000, 7).unwrap();
        assert!(e.agrees_with((1.0 / 3.0, 0.0), 4.0), "{e:?}");
        let ray = Cone::from_generators(&s2, &[vec![q(1), q(1)]], &[]).unwrap();
        let e = monte_carlo_cross_check(&ray, &Poly::one(2), &lam(&[-1, -1]), 100_000, 7).unwrap();
        assert!(e.agrees_with((2f64.sqrt() / 2.0, 0.0), 4.0), "{e:?}");
        assert!(matches!(
            monte_carlo_cross_check(&quad, &Poly::one(2), &lam(&[1, -2]), 10, 7),
            Err(Error::Divergent)
        ));
    }
}
