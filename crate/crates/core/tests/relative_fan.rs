use std::sync::Arc;

use conecalc::fan::{build_relative_fan, EmbeddingConfig, RelativeFan, BUILTIN_CONFIGS, RELATIVE_IDS};
use conecalc::indicator::{verify_identity, IdentityContext, IdentityId, SamplerConfig};

fn fan(name: &str) -> RelativeFan {
    build_relative_fan(&EmbeddingConfig::builtin(name).unwrap()).unwrap()
}

#[test]
fn relative_identities_on_builtin_fans() {
    let cfg = SamplerConfig { samples: 1000, max_coord: 12, seed: 5 };
    for name in BUILTIN_CONFIGS {
        let f = Arc::new(fan(name));
        let ctx = IdentityContext { relative: Some(f.clone()), ..Default::default() };
        for id in RELATIVE_IDS {
            let t = std::time::Instant::now();
            let r = verify_identity(id, &ctx, &cfg).unwrap();
            eprintln!("{name} {id} {} checks {:?}", r.checks, t.elapsed());
            assert!(r.passed, "{name} {id}: {:?} {:?}", r.failures, r.details);
        }
    }
}

#[test]
fn partition_checks_on_builtin_fans() {
    for name in BUILTIN_CONFIGS {
        let f = fan(name);
        assert!(f.discrepancies.is_empty(), "{name}: {:?}", f.discrepancies);
        let r = f.check_partition(10_000, 9).unwrap();
        assert!(r.passed(), "{name}: {r:?}");
    }
}

#[test]
fn fan_refinement_on_the_corner_fan() {
    let f = fan("gl2_in_gl3_corner");
    let c = Arc::new(f.base_chamber());
    let ctx = IdentityContext { cone: Some(c), fan: Some(f.top_cells()), ..Default::default() };
    let cfg = SamplerConfig { samples: 1000, max_coord: 12, seed: 2 };
    let r = verify_identity(IdentityId::GammaFanRefinement, &ctx, &cfg).unwrap();
    assert!(r.passed, "{:?}", r.failures);
}
