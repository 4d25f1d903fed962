use conecalc::arith::{cq, creal, q, qq, CQ, Q};
use conecalc::io::corpus::{random_corpus, CorpusConfig};
use conecalc::transforms::*;
use conecalc::{Cone, Space};
use num_traits::One;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

fn quadrant() -> Cone {
    Cone::from_generators(&Space::euclidean(2), &[vec![q(1), q(0)], vec![q(0), q(1)]], &[]).unwrap()
}

#[test]
fn constant_term_law_over_the_corpus() {
    let corpus = random_corpus(&CorpusConfig::default());
    corpus.par_iter().enumerate().for_each(|(i, e)| {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3 + i as u64);
        let c = &e.cone;
        let n = c.ambient_dim();
        let one = Poly::one(n);
        let lc = laplace_cone(c, &one).unwrap();
        let g = laplace_gamma_symbolic(c, &one).unwrap();
        assert!(g.t_free_part().without_t().equals(&lc), "{}", e.name);
        let mut ok = 0;
        while ok < 5 {
            let lam: Vec<CQ> = (0..n).map(|_| creal(qq(rng.gen_range(-9..=9), rng.gen_range(1..=4)))).collect();
            if !is_regular(&lam, c).unwrap() {
                continue;
            }
            let Ok(pe) = g.to_polyexp(&lam) else { continue };
            assert_eq!(pe.purely_polynomial_part(), Poly::constant(n, lc.eval(&lam, None).unwrap()), "{}", e.name);
            ok += 1;
        }
    });
}

#[test]
fn quadrant_with_weights() {
    let c = quadrant();
    let lam = vec![creal(qq(-1, 2)), cq(q(-3), q(1))];
    let prod = &lam[0] * &lam[1];
    // ∫ t e^{λt} dt = 1/λ² on each axis
    let v = laplace_cone(&c, &Poly::parse("x1*x2", 2).unwrap()).unwrap().eval(&lam, None).unwrap();
    assert_eq!(v, ExactScalar::from_cq(CQ::one() / (&prod * &prod)));
    let v = laplace_cone(&c, &Poly::one(2)).unwrap().eval(&lam, None).unwrap();
    assert_eq!(v, ExactScalar::from_cq(CQ::one() / prod));
}

#[test]
fn half_line_gamma_is_the_unit_interval() {
    let s = Space::euclidean(1);
    let c = Cone::from_generators(&s, &[vec![q(1)]], &[]).unwrap();
    for mu in [qq(-3, 2), qq(2, 1), qq(1, 7)] {
        let l = creal(mu.clone());
        // ∫_0^1 e^{μt} dt = (e^μ − 1)/μ
        let want = (ExactScalar::exp(&l) - ExactScalar::one()).div_cq(&l);
        let got = laplace_gamma(&c, &[q(1)], &Poly::one(1)).unwrap().eval(&[l], None).unwrap();
        assert_eq!(got, want, "μ = {mu}");
    }
}

#[test]
fn monte_carlo_agrees_in_the_convergent_region() {
    let c = quadrant();
    let t = std::time::Instant::now();
    let est = monte_carlo_cross_check(&c, &Poly::one(2), &[creal(q(-1)), creal(q(-2))], 1_000_000, 7).unwrap();
    assert!(est.relative_error((0.5, 0.0)) < 0.02, "{est:?}");
    assert!(t.elapsed().as_secs() < 30);
    let s = Space::euclidean(3);
    let c3 = Cone::from_generators(&s, &[vec![q(1), q(0), q(0)], vec![q(1), q(1), q(0)], vec![q(0), q(1), q(2)]], &[]).unwrap();
    let w = Poly::parse("1 + x1^2", 3).unwrap();
    let lam = [creal(q(-2)), creal(q(-1)), cq(qq(-1, 2), q(1))];
    let exact = laplace_cone(&c3, &w).unwrap().eval(&lam, None).unwrap().to_c64();
    let est = monte_carlo_cross_check(&c3, &w, &lam, 1_000_000, 8).unwrap();
    assert!(est.relative_error(exact) < 0.02, "{exact:?} vs {est:?}");
}

#[test]
fn poles_are_reported() {
    let c = quadrant();
    let lc = laplace_cone(&c, &Poly::one(2)).unwrap();
    let on_wall = [creal(Q::from_integer(0.into())), creal(q(-1))];
    assert!(lc.eval(&on_wall, None).is_err());
    assert!(!is_regular(&on_wall, &c).unwrap());
}
