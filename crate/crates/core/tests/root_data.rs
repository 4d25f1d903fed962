use conecalc::roots::{
    check_basic_root_props, check_face_poset, check_root_positivity_extension, check_coweight_lower_bound, tilde_gamma,
    tilde_gamma_conditions, regular_point, RootDatum,
};
use conecalc::indicator::Sampler;

#[test]
fn basic_props_exhaustive_up_to_gl4() {
    for n in 1..=4 {
        let rep = check_basic_root_props(&RootDatum::gl(n)).unwrap();
        assert!(rep.passed(), "{rep:?}");
    }
    let rep = check_basic_root_props(&RootDatum::product(&[2, 2]).unwrap()).unwrap();
    assert!(rep.passed(), "{rep:?}");
}

#[test]
fn sampled_implications() {
    for n in [3, 4] {
        let d = RootDatum::gl(n);
        for rep in [check_coweight_lower_bound(&d, 1000, 11).unwrap(), check_root_positivity_extension(&d, 1000, 11).unwrap()] {
            assert!(rep.passed(), "{rep:?}");
            assert!(rep.tested >= 1000, "{} tested only {}", rep.name, rep.tested);
        }
    }
}

#[test]
fn chamber_faces_are_parabolics() {
    let d = RootDatum::gl(4);
    for p in d.parabolics() {
        assert!(check_face_poset(&d, &p).unwrap(), "{p}");
    }
}

#[test]
fn tilde_gamma_characteristic_function_gl3() {
    let d = RootDatum::gl(3);
    let mut s = Sampler::new(5, 6);
    let b = d.standard_borel();
    let t = regular_point(&b, &mut s);
    let mut hits = 0;
    for r in d.parabolics_containing(&b) {
        for p in d.parabolics_containing(&r) {
            for _ in 0..40 {
                // points of a_R near T_P so the support is actually hit
                let mut h = r.a().project(&s.vector(3));
                h = conecalc::linalg::add(&p.a().reject(&h), &p.a().project(&t));
                for h in [h, s.vector(3)] {
                    let v = tilde_gamma(&r, &p, &h, &t).unwrap();
                    assert_eq!(v == 1, tilde_gamma_conditions(&r, &p, &h, &t).unwrap(), "{r} {p} {h:?}");
                    assert!(v == 0 || v == 1);
                    hits += v;
                }
            }
        }
    }
    assert!(hits > 20, "support rarely hit: {hits}");
}
