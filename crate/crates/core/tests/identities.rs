use std::sync::Arc;

use conecalc::arith::q;
use conecalc::indicator::{verify_identity, IdentityContext, IdentityId, SamplerConfig};
use conecalc::io::corpus::{random_corpus, CorpusConfig};
use conecalc::{Cone, Error, Space};
use rayon::prelude::*;

#[test]
fn cone_identities_over_the_corpus() {
    let corpus = random_corpus(&CorpusConfig::default());
    assert!(corpus.len() >= 50);
    let failures: Vec<String> = corpus
        .par_iter()
        .enumerate()
        .flat_map(|(i, e)| {
            let ctx = IdentityContext::cone(e.cone.clone());
            let cfg = SamplerConfig { samples: 1000, max_coord: 20, seed: 11 + i as u64 };
            IdentityId::CONE_IDS
                .iter()
                .filter_map(|&id| {
                    let r = verify_identity(id, &ctx, &cfg).unwrap();
                    (!r.passed).then(|| format!("{} {id}: {:?}", e.name, r.failures.first()))
                })
                .collect::<Vec<_>>()
        })
        .collect();
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn sample_counts_reach_the_request() {
    let s = Space::euclidean(3);
    let c = Arc::new(Cone::from_generators(&s, &[vec![q(1), q(0), q(0)], vec![q(1), q(1), q(0)], vec![q(1), q(1), q(2)]], &[]).unwrap());
    let cfg = SamplerConfig { samples: 1500, max_coord: 10, seed: 3 };
    let r = verify_identity(IdentityId::BgsDual, &IdentityContext::cone(c), &cfg).unwrap();
    assert!(r.passed);
    assert!(r.samples >= 1500);
}

#[test]
fn overlapping_cells_are_not_a_fan() {
    let s = Space::euclidean(2);
    let quadrant = Arc::new(Cone::from_generators(&s, &[vec![q(1), q(0)], vec![q(0), q(1)]], &[]).unwrap());
    let a = Arc::new(Cone::from_generators(&s, &[vec![q(1), q(0)], vec![q(1), q(1)]], &[]).unwrap());
    let b = Arc::new(Cone::from_generators(&s, &[vec![q(2), q(1)], vec![q(0), q(1)]], &[]).unwrap());
    let ctx = IdentityContext { cone: Some(quadrant), fan: Some(vec![a, b]), ..Default::default() };
    let r = verify_identity(IdentityId::GammaFanRefinement, &ctx, &SamplerConfig::default());
    assert!(matches!(r, Err(Error::NotAFan(_))), "{:?}", r.map(|r| r.passed));
}

#[test]
fn missing_context_is_an_input_error() {
    let r = verify_identity(IdentityId::Euler, &IdentityContext::default(), &SamplerConfig::default());
    assert!(matches!(r, Err(Error::Input(_))));
    assert!("no_such_identity".parse::<IdentityId>().is_err());
}
