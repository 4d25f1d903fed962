//! The Γ, σ, τ and τ̂ functions as signed cell sums.

use std::sync::Arc;

use num_traits::Signed;
use serde::Serialize;

use super::cell::{Cell, SignedCellSum, Term};
use crate::arith::{fmt_rational, qq, Q};
use crate::cones::{eps, Cone};
use crate::error::{Error, Result};
use crate::linalg;

/// `τ = [rint C]`.
pub fn tau(c: &Arc<Cone>) -> SignedCellSum {
    SignedCellSum::cell(c.ambient_dim(), Cell::rint(c.clone()))
}

/// `τ̂ = [rint C^∨]`.
pub fn tau_hat(c: &Cone) -> SignedCellSum {
    SignedCellSum::cell(c.ambient_dim(), Cell::rint(c.dual_arc()))
}

/// `Γ(C, H, T) = Σ_F ε_F^{F_0} [rint A(F,C)](H) [rint F^∨](H − T)` as a sum in `H`.
pub fn gamma(c: &Cone, t: &[Q]) -> Result<SignedCellSum> {
    c.space().check(t)?;
    let f0 = c.lineality_dim();
    let terms = c
        .face_data()?
        .iter()
        .map(|fd| Term {
            weight: eps(fd.dim(), f0),
            factors: vec![Cell::rint(fd.angle.clone()), Cell::shifted(fd.dual.clone(), t)],
        })
        .collect();
    Ok(SignedCellSum::from_terms(c.ambient_dim(), terms))
}

/// `σ(F, C) = Σ_{E ⊆ F} ε_F^E [rint A(E,C)] [rint E^∨]` for the face with index `f`.
pub fn sigma(c: &Cone, f: usize) -> Result<SignedCellSum> {
    let data = c.face_data()?;
    let face = &data.get(f).ok_or(Error::NotAFace)?.face;
    let terms = data
        .iter()
        .filter(|e| e.face.is_subface_of(face))
        .map(|e| Term {
            weight: eps(face.dim(), e.dim()),
            factors: vec![Cell::rint(e.angle.clone()), Cell::rint(e.dual.clone())],
        })
        .collect();
    Ok(SignedCellSum::from_terms(c.ambient_dim(), terms))
}

/// `σ(F, C)` for a face given as a cone.
pub fn sigma_of(c: &Cone, f: &Cone) -> Result<SignedCellSum> {
    let idx = c.face_index(f)?.ok_or(Error::NotAFace)?;
    sigma(c, idx)
}

/// The closed ball `{H : ⟨H, H − T⟩ ≤ 0}`.
#[derive(Clone, Debug, Serialize)]
pub struct Ball {
    #[serde(serialize_with = "ser_vec")]
    pub center: Vec<Q>,
    #[serde(serialize_with = "ser_q")]
    pub radius2: Q,
    #[serde(skip)]
    t: Vec<Q>,
    #[serde(skip)]
    inner: crate::cones::Space,
}

fn ser_vec<S: serde::Serializer>(v: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::Serialize;
    v.iter().map(fmt_rational).collect::<Vec<_>>().serialize(s)
}

fn ser_q<S: serde::Serializer>(v: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rational(v))
}

impl Ball {
    pub fn contains(&self, h: &[Q]) -> bool {
        let d = linalg::sub(h, &self.t);
        !self.inner.inner(h, &d).is_positive()
    }
}

/// Ball guaranteed to contain the support of `Γ(C, ·, T)`.
pub fn gamma_support_certificate(c: &Cone, t: &[Q]) -> Result<Ball> {
    c.space().check(t)?;
    let center = linalg::scale(t, &qq(1, 2));
    let radius2 = c.space().norm2(t) * qq(1, 4);
    Ok(Ball { center, radius2, t: t.to_vec(), inner: c.space().clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q;
    use crate::cones::Space;

    fn v(x: &[i64]) -> Vec<Q> {
        x.iter().map(|&a| q(a)).collect()
    }

    #[test]
    fn half_line_gamma_closed_form() {
        let s = Space::euclidean(1);
        let c = Cone::from_halfspaces(&s, &[v(&[1])], &[]).unwrap();
        let g = gamma(&c, &[q(1)]).unwrap();
        for k in -16..=16 {
            let h = qq(k, 8);
            let expected = i64::from(h > q(0) && h <= q(1));
            assert_eq!(g.eval(&[h]), expected);
        }
        let ball = gamma_support_certificate(&c, &[q(1)]).unwrap();
        assert!(ball.contains(&[q(0)]) && ball.contains(&[q(1)]) && !ball.contains(&[qq(9, 8)]));
    }

    #[test]
    fn half_plane_gamma_is_interval() {
        let s = Space::euclidean(2);
        let c = Cone::from_halfspaces(&s, &[v(&[1, 0])], &[]).unwrap();
        let t = [q(1), qq(4, 5)];
        let g = gamma(&c, &t).unwrap();
        for i in -10..=15 {
            for y in [qq(4, 5), q(0), q(1)] {
                let h = [qq(i, 10), y.clone()];
                let expected = i64::from(y == qq(4, 5) && h[0] > q(0) && h[0] <= q(1));
                assert_eq!(g.eval(&h), expected, "at {:?}", h);
            }
        }
    }

    #[test]
    fn subspace_gamma_at_zero() {
        let s = Space::euclidean(2);
        let c = Cone::full(&s);
        let g = gamma(&c, &v(&[0, 0])).unwrap();
        assert_eq!(g.eval(&v(&[0, 0])), 1);
        assert_eq!(g.eval(&v(&[1, 0])), 0);
    }

    #[test]
    fn sigma_of_line() {
        let s = Space::euclidean(1);
        let c = Cone::full(&s);
        let sg = sigma(&c, 0).unwrap();
        assert_eq!(sg.eval(&[q(0)]), 1);
        assert_eq!(sg.eval(&[q(1)]), 0);
    }

    #[test]
    fn sigma_quadrant_ray_brute_force() {
        let s = Space::euclidean(2);
        let c = Cone::from_halfspaces(&s, &[v(&[1, 0]), v(&[0, 1])], &[]).unwrap();
        let ray = Cone::from_generators(&s, &[v(&[1, 0])], &[]).unwrap();
        let sg = sigma_of(&c, &ray).unwrap();
        // σ(ray, C) = [rint A(ray,C)][rint ray^∨] − [rint C][rint C^∨]
        let upper = Cone::from_halfspaces(&s, &[v(&[0, 1])], &[]).unwrap();
        let right = Cone::from_halfspaces(&s, &[v(&[1, 0])], &[]).unwrap();
        for (x, y) in [(1, -1), (1, 1), (2, 3), (-1, 1), (0, 1), (1, 0), (3, -2), (-2, -2), (0, 0), (5, 1)] {
            let h = v(&[x, y]);
            let expected = i64::from(upper.rint_contains(&h) && right.rint_contains(&h))
                - i64::from(c.rint_contains(&h));
            assert_eq!(sg.eval(&h), expected);
        }
    }
}
