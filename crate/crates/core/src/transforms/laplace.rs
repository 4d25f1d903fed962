//! Laplace transforms of cones and of `Γ`-regions.

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use super::meromorphic::{MeromorphicTransform, DEGREE_CAP};
use super::poly::Poly;
use super::scalar::ExactScalar;
use crate::arith::{cdot, CQ, Q};
use crate::cones::{eps, Cone, Space, Subspace};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

/// Placing triangulation of `cone(rays)` (rays pointed, extreme, in the given
/// order). Returns the maximal simplices as index lists.
pub fn placing_triangulation(space: &Space, rays: &[Vec<Q>]) -> Result<Vec<Vec<usize>>> {
    let mut simplices: Vec<Vec<usize>> = Vec::new();
    let mut span = space.subspace(&[]);
    for (i, r) in rays.iter().enumerate() {
        if i == 0 {
            simplices.push(vec![0]);
        } else if !span.contains(r) {
            for s in &mut simplices {
                s.push(i);
            }
        } else {
            let current = Cone::from_generators(space, &rays[..i], &[])?;
            let visible: Vec<&Vec<Q>> = current.facets().iter().filter(|a| crate::arith::dot(a, r).is_negative()).collect();
            let mut added = Vec::new();
            for s in &simplices {
                for skip in 0..s.len() {
                    let tau: Vec<usize> = s.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, &x)| x).collect();
                    let on_visible = visible
                        .iter()
                        .any(|a| tau.iter().all(|&k| crate::arith::dot(a, &rays[k]).is_zero()));
                    if on_visible {
                        let mut t = tau;
                        t.push(i);
                        added.push(t);
                    }
                }
            }
            simplices.extend(added);
        }
        span = space.subspace(&rays[..=i]);
    }
    Ok(simplices)
}

/// `√det(BᵀGB)` for the RREF basis `B` of `w`, as an exact scalar.
fn volume_factor(w: &Subspace) -> ExactScalar {
    let b = w.basis();
    if b.is_empty() {
        return ExactScalar::from_q(Q::from_integer(1.into()));
    }
    let s = w.space();
    let gram = Matrix::from_rows(&b.iter().map(|x| b.iter().map(|y| s.inner(x, y)).collect()).collect::<Vec<_>>(), b.len());
    ExactScalar::sqrt(&gram.det())
}

/// Transform of the pointed part of `c` with `q = 1`, triangulating the rays in
/// the given order. `tvars` sets the arity of the symbolic `T`.
pub fn cone_transform_ordered(c: &Cone, order: &[usize], tvars: usize) -> Result<MeromorphicTransform> {
    let space = c.space();
    let rays: Vec<Vec<Q>> = order.iter().map(|&i| c.rays()[i].clone()).collect();
    let w = c.pointed_span();
    let d = w.dim();
    if d == 0 {
        return Ok(MeromorphicTransform::constant(space, tvars, ExactScalar::from_q(Q::from_integer(1.into()))));
    }
    let simplices = placing_triangulation(space, &rays)?;
    let vol = volume_factor(&w);
    let sign = if d % 2 == 0 { Q::from_integer(1.into()) } else { Q::from_integer((-1).into()) };
    let parts: Vec<MeromorphicTransform> = simplices
        .par_iter()
        .map(|s| {
            let gens: Vec<Vec<Q>> = s.iter().map(|&k| rays[k].clone()).collect();
            let coords: Vec<Vec<Q>> =
                gens.iter().map(|g| linalg::coordinates(w.basis(), g).expect("ray in span")).collect();
            let det = Matrix::from_rows(&coords, d).det().abs();
            let coef = vol.scale(&crate::arith::creal(&sign * det));
            MeromorphicTransform::simple(space, tvars, coef, &gens)
        })
        .collect();
    Ok(parts.into_iter().fold(MeromorphicTransform::zero(space, tvars), |acc, p| acc.add(&p)))
}

fn check_weight(c: &Cone, q: &Poly<Q>) -> Result<()> {
    if q.nvars() != c.ambient_dim() {
        return Err(Error::Dimension { expected: c.ambient_dim(), got: q.nvars() });
    }
    if c.lineality().iter().any(|l| !q.directional(l).is_zero()) {
        return Err(Error::PolynomialOnLineality);
    }
    Ok(())
}

/// `∫_{V_C ∩ V^{F_0}} [C](H) e^{⟨λ,H⟩} q(H) dH`, continued meromorphically.
pub fn laplace_cone(c: &Cone, q: &Poly<Q>) -> Result<MeromorphicTransform> {
    let order: Vec<usize> = (0..c.rays().len()).collect();
    laplace_cone_ordered(c, q, &order)
}

/// As [`laplace_cone`] with an explicit ray order for the triangulation.
pub fn laplace_cone_ordered(c: &Cone, q: &Poly<Q>, order: &[usize]) -> Result<MeromorphicTransform> {
    check_weight(c, q)?;
    cone_transform_ordered(c, order, 0)?.apply_poly(q, DEGREE_CAP)
}

/// Transform of the translate `t + C`: `q(∂)` applied to `e^{⟨λ,t⟩}·𝓕(C, 1, λ)`.
pub fn laplace_translated(c: &Cone, t: &[Q], q: &Poly<Q>) -> Result<MeromorphicTransform> {
    check_weight(c, q)?;
    let order: Vec<usize> = (0..c.rays().len()).collect();
    cone_transform_ordered(c, &order, 0)?.exp_shift(t, &[]).apply_poly(q, DEGREE_CAP)
}

enum TArg<'a> {
    Numeric(&'a [Q]),
    Symbolic,
}

fn gamma_transform(c: &Cone, t: TArg<'_>, q: &Poly<Q>) -> Result<MeromorphicTransform> {
    check_weight(c, q)?;
    let n = c.ambient_dim();
    let space = c.space();
    let tvars = match t {
        TArg::Numeric(v) => {
            space.check(v)?;
            0
        }
        TArg::Symbolic => n,
    };
    let pw = c.pointed_span().projection_matrix().clone();
    let l0 = c.lineality_dim();
    let fds = c.face_data()?;
    let parts: Vec<Result<MeromorphicTransform>> = fds
        .par_iter()
        .map(|fd| {
            let angle = laplace_pointed(&fd.angle, tvars)?;
            let dual = laplace_pointed(&fd.dual, tvars)?;
            let e = ExactScalar::from_q(Q::from_integer(eps(fd.dim(), l0).into()));
            let m = fd.face.cone.span().projection_matrix().mul(&pw);
            let term = angle.mul(&dual).scale(&e);
            Ok(match t {
                TArg::Numeric(v) => term.exp_shift(&m.mul_vec(v), &[]),
                TArg::Symbolic => term.exp_shift(&vec![Q::zero(); n], &m.row_vecs()),
            })
        })
        .collect();
    let mut total = MeromorphicTransform::zero(space, tvars);
    for p in parts {
        total = total.add(&p?);
    }
    total.apply_poly(q, DEGREE_CAP)
}

fn laplace_pointed(c: &Cone, tvars: usize) -> Result<MeromorphicTransform> {
    let order: Vec<usize> = (0..c.rays().len()).collect();
    cone_transform_ordered(c, &order, tvars)
}

/// `𝓕(Γ(C), T, q, λ)` at a fixed `T`. The integral runs over `V_C ∩ V^{F_0}`, so
/// only the projection of `T` onto that space matters.
pub fn laplace_gamma(c: &Cone, t: &[Q], q: &Poly<Q>) -> Result<MeromorphicTransform> {
    gamma_transform(c, TArg::Numeric(t), q)
}

/// `𝓕(Γ(C), T, q, λ)` with `T` symbolic: a transform in `λ` whose terms carry
/// exponentials `e^{⟨λ, M T⟩}`.
pub fn laplace_gamma_symbolic(c: &Cone, q: &Poly<Q>) -> Result<MeromorphicTransform> {
    gamma_transform(c, TArg::Symbolic, q)
}

/// The lines `V_F^{F_0}` for the faces `F` of dimension `dim F_0 + 1`.
#[derive(Clone, Debug)]
pub struct RegularityRegion {
    space: Space,
    pub lines: Vec<Vec<Q>>,
}

impl RegularityRegion {
    pub fn of(c: &Cone) -> Result<Self> {
        let l0 = c.lineality_dim();
        let lines = c
            .faces()?
            .iter()
            .filter(|f| f.dim() == l0 + 1)
            .map(|f| f.cone.rays()[0].clone())
            .collect();
        Ok(RegularityRegion { space: c.space().clone(), lines })
    }

    /// `⟨λ, ℓ⟩ ≠ 0` for every line.
    pub fn contains(&self, lambda: &[CQ]) -> bool {
        let g = self.space.gram_matrix();
        self.lines.iter().all(|l| {
            let gl = g.mul_vec(l);
            let x = cdot(lambda, &gl);
            !(x.re.is_zero() && x.im.is_zero())
        })
    }
}

pub fn is_regular(lambda: &[CQ], c: &Cone) -> Result<bool> {
    if lambda.len() != c.ambient_dim() {
        return Err(Error::Dimension { expected: c.ambient_dim(), got: lambda.len() });
    }
    Ok(RegularityRegion::of(c)?.contains(lambda))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{cq, creal, q, qq};
    use num_traits::One;

    fn lam(v: &[Q]) -> Vec<CQ> {
        v.iter().map(|x| creal(x.clone())).collect()
    }

    fn rational(x: &ExactScalar) -> Q {
        let c = x.as_cq().expect("rational value");
        assert!(c.im.is_zero());
        c.re
    }

    fn half_line() -> Cone {
        Cone::from_generators(&Space::euclidean(1), &[vec![q(1)]], &[]).unwrap()
    }

    #[test]
    fn half_line_is_minus_reciprocal() {
        let f = laplace_cone(&half_line(), &Poly::one(1)).unwrap();
        for l in [q(-3), qq(-1, 2), q(5)] {
            assert_eq!(rational(&f.eval(&lam(&[l.clone()]), None).unwrap()), -l.recip());
        }
        assert!(matches!(f.eval(&lam(&[q(0)]), None), Err(Error::Pole(_))));
    }

    #[test]
    fn quadrant_and_weight() {
        let s = Space::euclidean(2);
        let quad = Cone::from_generators(&s, &Matrix::identity(2).row_vecs(), &[]).unwrap();
        let f = laplace_cone(&quad, &Poly::one(2)).unwrap();
        let v = f.eval(&lam(&[q(-1), q(-2)]), None).unwrap();
        assert_eq!(rational(&v), qq(1, 2));
        let g = laplace_cone(&half_line(), &Poly::parse("x", 1).unwrap()).unwrap();
        // ∫_0^∞ h e^{λh} dh = 1/λ²
        assert_eq!(rational(&g.eval(&lam(&[q(-3)]), None).unwrap()), qq(1, 9));
        assert!(matches!(laplace_cone(&half_line(), &Poly::parse("x^7", 1).unwrap()), Err(Error::DegreeCap(7, 6))));
    }

    #[test]
    fn ray_uses_induced_measure() {
        let s = Space::euclidean(2);
        let ray = Cone::from_generators(&s, &[vec![q(1), q(1)]], &[]).unwrap();
        let f = laplace_cone(&ray, &Poly::one(2)).unwrap();
        let v = f.eval(&lam(&[q(-1), q(-1)]), None).unwrap();
        // |u| / ⟨−λ, u⟩ = √2 / 2
        assert_eq!(v, ExactScalar::sqrt(&q(2)).scale(&creal(qq(1, 2))));
    }

    #[test]
    fn lineality_weight_is_rejected() {
        let s = Space::euclidean(2);
        let hp = Cone::from_halfspaces(&s, &[vec![q(1), q(0)]], &[]).unwrap();
        assert!(laplace_cone(&hp, &Poly::parse("x", 2).unwrap()).is_ok());
        assert!(matches!(laplace_cone(&hp, &Poly::parse("y", 2).unwrap()), Err(Error::PolynomialOnLineality)));
    }

    #[test]
    fn gamma_half_line() {
        let c = half_line();
        let one = Poly::one(1);
        for (t, l) in [(q(2), q(-3)), (qq(1, 2), q(1))] {
            let f = laplace_gamma(&c, &[t.clone()], &one).unwrap();
            let v = f.eval(&lam(&[l.clone()]), None).unwrap();
            // (e^{λt} − 1)/λ
            let expect = (ExactScalar::exp(&creal(&l * &t)) - ExactScalar::one()).div_cq(&creal(l.clone()));
            assert_eq!(v, expect);
        }
        let sym = laplace_gamma_symbolic(&c, &one).unwrap();
        let pe = sym.to_polyexp(&lam(&[q(-3)])).unwrap();
        assert_eq!(pe.purely_polynomial_part(), Poly::constant(1, ExactScalar::from_q(qq(1, 3))));
        let exp_part: Vec<_> = pe.parts().filter(|(k, _)| !k[0].re.is_zero()).collect();
        assert_eq!(exp_part.len(), 1);
        assert_eq!(exp_part[0].0, vec![cq(q(-3), q(0))]);
        assert_eq!(*exp_part[0].1, Poly::constant(1, ExactScalar::from_q(qq(-1, 3))));
        assert!(sym.t_free_part().without_t().equals(&laplace_cone(&c, &one).unwrap()));
    }

    #[test]
    fn gamma_at_zero_vanishes() {
        let s = Space::euclidean(2);
        let c = Cone::from_generators(&s, &[vec![q(1), q(0)], vec![q(1), q(2)]], &[]).unwrap();
        let f = laplace_gamma(&c, &[q(0), q(0)], &Poly::one(2)).unwrap();
        assert!(f.is_identically_zero());
        let v = f.eval(&lam(&[qq(-1, 3), q(-2)]), None).unwrap();
        assert!(v.is_zero());
    }

    #[test]
    fn regularity_examples() {
        let s = Space::euclidean(2);
        let quad = Cone::from_generators(&s, &Matrix::identity(2).row_vecs(), &[]).unwrap();
        assert!(is_regular(&lam(&[q(-1), q(-2)]), &quad).unwrap());
        assert!(!is_regular(&lam(&[q(0), q(-2)]), &quad).unwrap());
        let hp = Cone::from_halfspaces(&s, &[vec![q(1), q(0)]], &[]).unwrap();
        let r = RegularityRegion::of(&hp).unwrap();
        assert_eq!(r.lines, vec![vec![q(1), q(0)]]);
        assert!(is_regular(&lam(&[q(1), q(99)]), &hp).unwrap());
        assert!(!is_regular(&lam(&[q(0), q(99)]), &hp).unwrap());
    }

    #[test]
    fn triangulation_of_square_pyramid() {
        let s = Space::euclidean(3);
        let rays = vec![
            vec![q(1), q(0), q(1)],
            vec![q(0), q(1), q(1)],
            vec![q(-1), q(0), q(1)],
            vec![q(0), q(-1), q(1)],
        ];
        let c = Cone::from_generators(&s, &rays, &[]).unwrap();
        let t = placing_triangulation(&s, c.rays()).unwrap();
        assert_eq!(t.len(), 2);
        let fwd = laplace_cone(&c, &Poly::one(3)).unwrap();
        let rev: Vec<usize> = (0..4).rev().collect();
        let bwd = laplace_cone_ordered(&c, &Poly::one(3), &rev).unwrap();
        assert!(fwd.equals(&bwd));
    }
}
