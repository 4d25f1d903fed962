use std::collections::BTreeMap;

use conecalc::arith::{creal, q, qq, Q};
use conecalc::fan::{build_relative_fan, EmbeddingConfig, RelativeFan, BUILTIN_CONFIGS};
use conecalc::period::*;
use conecalc::Error;
use num_traits::Zero;
use rand::Rng;

fn fan(name: &str) -> RelativeFan {
    build_relative_fan(&EmbeddingConfig::builtin(name).unwrap()).unwrap()
}

fn random_t(rng: &mut impl Rng, n: usize) -> Vec<Q> {
    (0..n).map(|_| qq(rng.gen_range(-5..=5), rng.gen_range(1..=3))).collect()
}

/// Draws forms until `want` regular ones have been checked; returns (regular, drawn).
fn constant_term_law(name: &str, want: usize, seed: u64) -> (usize, usize) {
    let f = fan(name);
    let n = f.dim();
    let mut rng = form_rng(seed);
    let cfg = FormSampler { max_data_per_cell: 1, max_degree: 2, complex: true, integrable: false };
    let (mut ok, mut drawn) = (0, 0);
    while ok < want {
        drawn += 1;
        assert!(drawn < 20 * want, "{name}: too few usable forms");
        let xi = random_character(&f, &mut rng);
        let form = random_form(&f, &xi, &cfg, &mut rng).unwrap();
        let reg = is_xi_regular(&f, &form, &xi).unwrap();
        if integrability(&f, &form, &xi).unwrap() {
            assert!(reg.regular, "{name}: integrable but not regular");
        }
        if !reg.regular {
            continue;
        }
        let tp = random_t(&mut rng, n);
        let e = match truncated_period_expansion(&f, &form, &xi, &tp) {
            Ok(e) => e,
            // a single triangulation term sits on its own pole
            Err(Error::Pole(_)) => continue,
            Err(e) => panic!("{name}: {e}"),
        };
        let v = match regularized_period(&f, &form, &xi, &tp) {
            Ok(v) => v,
            Err(Error::Pole(_)) => continue,
            Err(e) => panic!("{name}: {e}"),
        };
        assert!(constant_part_equals(&e, &v), "{name}: constant part differs\n{}", form.to_json(&f).unwrap());
        let p0 = e.purely_polynomial_part();
        for _ in 0..10 {
            let s = random_t(&mut rng, n);
            assert_eq!(e.translate(&s).purely_polynomial_part(), p0, "{name}: not translation invariant");
        }
        ok += 1;
    }
    (ok, drawn)
}

#[test]
fn constant_term_equals_regularized_period_on_builtin_fans() {
    for (k, name) in BUILTIN_CONFIGS.iter().enumerate() {
        let (ok, drawn) = constant_term_law(name, 100, 100 + k as u64);
        assert_eq!(ok, 100);
        assert!(drawn >= ok);
    }
}

#[test]
fn integrable_forms_match_monte_carlo() {
    for (k, name) in ["gl1_in_gl2_corner", "gl2_in_gl3_corner", "gl2_in_gl3_plane", "gl2_diag_in_gl2xgl2"]
        .iter()
        .enumerate()
    {
        let f = fan(name);
        let mut rng = form_rng(500 + k as u64);
        let cfg = FormSampler { max_data_per_cell: 1, max_degree: 0, complex: false, integrable: true };
        for round in 0..3 {
            let xi = random_character(&f, &mut rng);
            let form = random_form(&f, &xi, &cfg, &mut rng).unwrap();
            assert!(integrability(&f, &form, &xi).unwrap());
            let tp = vec![Q::zero(); f.dim()];
            let exact = regularized_period(&f, &form, &xi, &tp).unwrap().to_c64();
            let est = period_monte_carlo(&f, &form, &xi, &tp, 1_000_000, 7 + round).unwrap();
            let err = est.relative_error(exact);
            assert!(err < 0.02, "{name}: exact {exact:?} vs {est:?} ({err})");
        }
    }
}

#[test]
fn half_line_against_monte_carlo() {
    let f = fan("gl1_in_gl2_corner");
    let b = f.maximal_cells().into_iter().find(|c| c.cone.rint_point()[0] > Q::zero()).unwrap().parabolic.clone();
    let mut form = ToyFormData::new();
    form.push(&b, ExponentDatum::simple(vec![creal(qq(-5, 2))]));
    let xi = Character::zero(1);
    // μ = −2
    let v = regularized_period(&f, &form, &xi, &[q(0)]).unwrap();
    assert_eq!(v.to_c64(), (0.5, 0.0));
    let est = period_monte_carlo(&f, &form, &xi, &[q(0)], 1_000_000, 11).unwrap();
    assert!(est.relative_error((0.5, 0.0)) < 0.02, "{est:?}");
}

#[test]
fn eisenstein_poles_on_builtin_fans() {
    let none = BTreeMap::new();
    for name in BUILTIN_CONFIGS {
        let f = fan(name);
        let cqs = computed_c_values(&f).unwrap();
        let class: Vec<_> = cqs.keys().cloned().collect();
        for c in [q(1), qq(1, 2), qq(-3, 2)] {
            let t = vec![qq(1, 3); f.dim()];
            let r = eisenstein_correction_terms(&f, &class, &c, &cqs, &t, &none).unwrap();
            assert_eq!(r.terms.len(), 2 * class.len());
            for term in &r.terms {
                let s = creal(term.pole.clone());
                assert!(term.denominator(&s).re.is_zero());
                assert!(matches!(term.eval(&s), Err(Error::Pole(_))));
                let a = &c * (q(1) - q(2) * &cqs[&f.cell_by_id(&term.cell).unwrap().parabolic]);
                assert_eq!(term.pole, -a * q(i64::from(term.sign)));
                assert!(term.eval(&creal(&term.pole + q(1))).is_ok());
            }
            // mirrored pair per cell
            for p in &class {
                let id = f.cell(p).unwrap().id();
                let signs: Vec<i8> = r.terms.iter().filter(|t| t.cell == id).map(|t| t.sign).collect();
                assert_eq!(signs, vec![1, -1]);
            }
        }
    }
}

#[test]
fn diagonal_c_value() {
    let f = fan("gl2_diag_in_gl2xgl2");
    let cqs = computed_c_values(&f).unwrap();
    assert_eq!(cqs.len(), 1);
    for (p, v) in &cqs {
        assert_eq!(*v, qq(1, 2));
        let cc = f.c_coefficient(p).unwrap();
        assert_eq!(cc.dimension_ratio, Some(qq(1, 2)));
        assert!(cc.consistent());
    }
}
