use conecalc::arith::{creal, fmt_rational, parse_rational, q, Q};
use conecalc::indicator::gamma;
use conecalc::io::json::{cone_from_json, cone_to_json};
use conecalc::transforms::{laplace_cone, ExactScalar, Poly};
use conecalc::{Cone, Space};
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Q> {
    (-40i64..=40, 1i64..=8).prop_map(|(n, d)| Q::new(n.into(), d.into()))
}

fn vector(n: usize) -> impl Strategy<Value = Vec<Q>> {
    proptest::collection::vec(rational(), n)
}

/// A 2-D cone spanned by two to three random integer rays.
fn cone2() -> impl Strategy<Value = Cone> {
    proptest::collection::vec((-4i64..=4, -4i64..=4), 2..=3).prop_filter_map("degenerate", |rays| {
        let rays: Vec<Vec<Q>> = rays.into_iter().filter(|&(a, b)| a != 0 || b != 0).map(|(a, b)| vec![q(a), q(b)]).collect();
        if rays.is_empty() {
            return None;
        }
        Cone::from_generators(&Space::euclidean(2), &rays, &[]).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_strings_round_trip(x in rational()) {
        prop_assert_eq!(parse_rational(&fmt_rational(&x)).unwrap(), x);
    }

    #[test]
    fn double_dual_and_representations(c in cone2()) {
        prop_assert_eq!(c.dual().dual(), c.clone());
        let h = Cone::from_halfspaces(c.space(), c.facet_normals(), &[]).unwrap();
        let h = if c.equalities().is_empty() { h } else { c.clone() };
        prop_assert_eq!(&h, &c);
        prop_assert!(c.rint_contains(&c.rint_point()));
        for r in c.rays() {
            prop_assert!(c.contains(r));
        }
        prop_assert_eq!(cone_from_json(&cone_to_json(&c)).unwrap(), c);
    }

    #[test]
    fn gamma_vanishes_outside_the_ball(c in cone2(), t in vector(2), h in vector(2)) {
        let g = gamma(&c, &t).unwrap();
        let d: Vec<Q> = h.iter().zip(&t).map(|(a, b)| a - b).collect();
        let pairing = c.space().inner(&h, &d);
        if pairing.is_positive() {
            prop_assert_eq!(g.eval(&h), 0);
        }
    }

    #[test]
    fn half_line_transform(mu in rational().prop_filter("pole", |m| !m.is_zero())) {
        let c = Cone::from_generators(&Space::euclidean(1), &[vec![q(1)]], &[]).unwrap();
        let v = laplace_cone(&c, &Poly::one(1)).unwrap().eval(&[creal(mu.clone())], None).unwrap();
        prop_assert_eq!(v, ExactScalar::from_q(-mu.recip()));
    }

    #[test]
    fn polynomial_products_evaluate_pointwise(a in vector(3), b in vector(3), x in vector(2)) {
        let p = Poly::linear(&a[..2]).add(&Poly::constant(2, a[2].clone()));
        let r = Poly::linear(&b[..2]).add(&Poly::constant(2, b[2].clone()));
        prop_assert_eq!(p.mul(&r).eval_q(&x), p.eval_q(&x) * r.eval_q(&x));
    }
}
