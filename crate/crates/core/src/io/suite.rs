//! Bundled verification suites. Each acceptance criterion is one function returning a
//! [`Criterion`]; a suite is a named list of criteria, optionally writing figures.
//! Reports carry no wall-clock data unless timing is requested, so they are
//! byte-stable for a fixed seed.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{creal, cq, dot, q, qq, to_f64, CQ, Q};
use crate::cones::{Cone, Space};
use crate::error::{Error, Result};
use crate::fan::{build_relative_fan, EmbeddingConfig, RelativeFan, BUILTIN_CONFIGS, RELATIVE_IDS};
use crate::indicator::{gamma, verify_identity, IdentityContext, IdentityId, SamplerConfig};
use crate::io::corpus::{arrangement_fan, random_corpus, CorpusConfig};
use crate::io::json::to_pretty;
use crate::io::svg::{emit_figure, FigureParams, FIGURES};
use crate::linalg;
use crate::period::*;
use crate::roots::{check_basic_root_props, RootDatum};
use crate::transforms::{
    is_regular, laplace_cone, laplace_gamma_symbolic, monte_carlo_cross_check, ExactScalar, Poly,
};

const MAX_FAILURES: usize = 20;

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub suite: String,
    pub corpus: CorpusConfig,
    /// Cones appended to the random corpus (e.g. read from a file).
    pub extra_cones: Vec<Arc<Cone>>,
    /// Exact sample points per cone and identity.
    pub samples: usize,
    pub max_coord: i64,
    pub seed: u64,
    pub mc_samples: usize,
    /// Relative error allowed against Monte Carlo estimates.
    pub mc_tolerance: f64,
    pub forms_per_fan: usize,
    /// Where figure suites write their SVGs; the current directory when unset.
    pub out_dir: Option<PathBuf>,
    pub timing: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            suite: "acceptance".into(),
            corpus: CorpusConfig::default(),
            extra_cones: Vec::new(),
            samples: 1000,
            max_coord: 20,
            seed: 1,
            mc_samples: 1_000_000,
            mc_tolerance: 0.02,
            forms_per_fan: 100,
            out_dir: None,
            timing: false,
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Criterion {
    pub id: usize,
    pub name: String,
    pub passed: bool,
    pub checks: usize,
    pub failure_count: usize,
    pub failures: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub corpus_seed: u64,
    pub passed: bool,
    pub criteria: Vec<Criterion>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub files: Vec<String>,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        to_pretty(self)
    }
}

pub const CRITERIA: [&str; 12] = [
    "identity suite",
    "gamma closed form",
    "gamma support bound",
    "gamma fan refinement",
    "cone transforms",
    "constant-term law",
    "relative fans",
    "relative cone identities",
    "root data",
    "period engine",
    "eisenstein terms",
    "determinism",
];

/// Suite names with their criteria and the figures they write.
pub const SUITES: [(&str, &[usize], &[&str]); 12] = [
    ("bgs", &[1], &[]),
    ("gamma", &[2, 3, 4], &[]),
    ("transforms", &[5, 6], &[]),
    ("fans", &[7, 8], &[]),
    ("roots", &[9], &[]),
    ("period", &[10], &[]),
    ("eisenstein", &[11], &[]),
    ("determinism", &[12], &[]),
    ("fan-figures", &[7], &["fig6", "fig7"]),
    ("figures", &[], &FIGURES),
    ("acceptance", &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12], &[]),
    ("all", &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12], &FIGURES),
];

pub fn suite_plan(name: &str) -> Result<(&'static [usize], &'static [&'static str])> {
    SUITES
        .iter()
        .find(|(n, _, _)| *n == name)
        .map(|(_, c, f)| (*c, *f))
        .ok_or_else(|| Error::Unknown { kind: "suite", name: name.to_string() })
}

/// Runs the named suite. Exit code 0 when every criterion passed, 1 otherwise; input
/// problems (unknown suite, unwritable output) are errors.
pub fn run_suite(cfg: &SuiteConfig) -> Result<(i32, SuiteReport)> {
    let (ids, figures) = suite_plan(&cfg.suite)?;
    let mut files = Vec::new();
    if !figures.is_empty() {
        let dir = cfg.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
        std::fs::create_dir_all(&dir)?;
        for name in figures {
            let svg = emit_figure(name, &FigureParams::default())?;
            let path = dir.join(format!("{name}.svg"));
            std::fs::write(&path, svg)?;
            files.push(path.display().to_string());
        }
    }
    let criteria: Vec<Criterion> = ids.iter().map(|&k| run_criterion(k, cfg)).collect::<Result<_>>()?;
    let passed = criteria.iter().all(|c| c.passed);
    let report = SuiteReport {
        suite: cfg.suite.clone(),
        seed: cfg.seed,
        corpus_seed: cfg.corpus.seed,
        passed,
        criteria,
        files,
    };
    Ok((if passed { 0 } else { 1 }, report))
}

/// One criterion. Library errors raised while checking count as failures; only an
/// out-of-range id is an error.
pub fn run_criterion(k: usize, cfg: &SuiteConfig) -> Result<Criterion> {
    let name = *CRITERIA.get(k.wrapping_sub(1)).ok_or_else(|| Error::Unknown { kind: "criterion", name: k.to_string() })?;
    let start = Instant::now();
    let mut t = Tally::default();
    let res = match k {
        1 => identity_suite(cfg, &mut t),
        2 => gamma_closed_form(&mut t),
        3 => gamma_support(cfg, &mut t),
        4 => fan_refinement(cfg, &mut t),
        5 => transforms(cfg, &mut t),
        6 => constant_term_law(cfg, &mut t),
        7 => relative_fans(cfg, &mut t),
        8 => relative_identities(cfg, &mut t),
        9 => root_data(&mut t),
        10 => period_engine(cfg, &mut t),
        11 => eisenstein(cfg, &mut t),
        _ => determinism(cfg, &mut t),
    };
    if let Err(e) = res {
        t.fail(format!("error: {e}"));
    }
    Ok(Criterion {
        id: k,
        name: name.to_string(),
        passed: t.failure_count == 0 && t.checks > 0,
        checks: t.checks,
        failure_count: t.failure_count,
        failures: t.failures,
        notes: t.notes,
        elapsed_ms: cfg.timing.then(|| start.elapsed().as_millis() as u64),
    })
}

#[derive(Default)]
struct Tally {
    checks: usize,
    failure_count: usize,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.fail(what());
        }
    }

    fn fail(&mut self, s: String) {
        self.failure_count += 1;
        if self.failures.len() < MAX_FAILURES {
            self.failures.push(s);
        }
    }

    fn note(&mut self, s: String) {
        self.notes.push(s);
    }
}

fn builtin_fan(name: &str) -> Result<RelativeFan> {
    build_relative_fan(&EmbeddingConfig::builtin(name)?)
}

fn rng(cfg: &SuiteConfig, k: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_mul(1000).wrapping_add(k))
}

/// The random corpus followed by any extra cones.
pub fn corpus_cones(cfg: &SuiteConfig) -> Vec<(String, Arc<Cone>)> {
    let mut out: Vec<(String, Arc<Cone>)> =
        random_corpus(&cfg.corpus).into_iter().map(|e| (e.name, e.cone)).collect();
    out.extend(cfg.extra_cones.iter().enumerate().map(|(i, c)| (format!("extra-{i:02}"), c.clone())));
    out
}

/// Closed cells and base chambers of the built-in fans, without repeats.
fn fan_cones() -> Result<Vec<(String, Arc<Cone>)>> {
    let mut out: Vec<(String, Arc<Cone>)> = Vec::new();
    for name in BUILTIN_CONFIGS {
        let f = builtin_fan(name)?;
        let mut cones = vec![(format!("{name}/chamber"), Arc::new(f.base_chamber()))];
        cones.extend(f.cells().iter().map(|c| (format!("{name}/{}", c.id()), c.cone.clone())));
        for (n, c) in cones {
            if !out.iter().any(|(_, d)| *d == c) {
                out.push((n, c));
            }
        }
    }
    Ok(out)
}

const CRITERION_ONE_IDS: [IdentityId; 10] = [
    IdentityId::Euler,
    IdentityId::BgsAngle,
    IdentityId::BgsDual,
    IdentityId::Langlands1,
    IdentityId::Langlands2,
    IdentityId::GammaDuality,
    IdentityId::GammaDecomposition,
    IdentityId::GammaDualDecomposition,
    IdentityId::HtauTauSigma,
    IdentityId::SigmaSupport,
];

fn identity_suite(cfg: &SuiteConfig, t: &mut Tally) -> Result<()> {
    let corpus = corpus_cones(cfg);
    let fans = fan_cones()?;
    t.note(format!("{} corpus cones, {} fan cones", corpus.len(), fans.len()));
    let cones: Vec<(String, Arc<Cone>)> = corpus.into_iter().chain(fans).collect();
    let results: Vec<Result<Vec<(String, bool, usize, String)>>> = cones
        .par_iter()
        .enumerate()
        .map(|(i, (name, c))| {
            let ctx = IdentityContext::cone(c.clone());
            let sc = SamplerConfig { samples: cfg.samples, max_coord: cfg.max_coord, seed: cfg.seed + i as u64 };
            CRITERION_ONE_IDS
                .iter()
                .map(|&id| {
                    let r = verify_identity(id, &ctx, &sc)?;
                    let detail = format!("{} failures, first {:?}", r.failure_count, r.failures.first());
                    Ok((format!("{name} {id}"), r.passed, r.samples, detail))
                })
                .collect()
        })
        .collect();
    for r in results {
        for (label, passed, samples, detail) in r? {
            t.check(passed, || format!("{label}: {detail}"));
            // the Euler relation is a single number per cone
            if !label.ends_with(" euler") {
                t.check(samples >= cfg.samples, || format!("{label}: only {samples} points"));
            }
        }
    }
    Ok(())
}

fn gamma_closed_form(t: &mut Tally) -> Result<()> {
    let s = Space::euclidean(1);
    let half_line = Cone::from_generators(&s, &[vec![q(1)]], &[])?;
    let g = gamma(&half_line, &[q(1)])?;
    for k in -16..=16 {
        let h = qq(k, 8);
        let want = i64::from(h.is_positive() && h <= q(1));
        let got = g.eval(&[h.clone()]);
        t.check(got == want, || format!("H = {h}: {got} != {want}"));
    }
    Ok(())
}

fn grid_rational(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Q {
    const DEN: i64 = 64;
    let (a, b) = ((lo * DEN as f64).floor() as i64, (hi * DEN as f64).ceil() as i64);
    qq(rng.gen_range(a..=b), DEN)
}

fn gamma_support(cfg: &SuiteConfig, t: &mut Tally) -> Result<()> {
    const PAIRS: usize = 20;
    const PER_PAIR: usize = 10_000;
    let mut rng = rng(cfg, 3);
    let cones: Vec<Arc<Cone>> =
        corpus_cones(cfg).into_iter().map(|(_, c)| c).filter(|c| !c.is_zero() && c.ambient_dim() <= 3).collect();
    let mut hits = 0usize;
    for k in 0..PAIRS {
        let c = &cones[k % cones.len()];
        let n = c.ambient_dim();
        let tt: Vec<Q> = (0..n).map(|_| qq(rng.gen_range(-12..=12), 4)).collect();
        let g = gamma(c, &tt)?;
        let space = c.space();
        // box around the ball ⟨H, H − T⟩ ≤ 0, widened so the boundary is crossed
        let r2 = to_f64(&space.norm2(&tt)) / 4.0;
        let ginv = space.gram_matrix().inverse().ok_or(Error::NotPositiveDefinite)?;
        let half: Vec<f64> = (0..n).map(|i| 1.5 * (r2 * to_f64(ginv.get(i, i))).sqrt() + 0.25).collect();
        let points: Vec<Vec<Q>> = (0..PER_PAIR)
            .map(|_| (0..n).map(|i| {
                let m = to_f64(&tt[i]) / 2.0;
                grid_rational(&mut rng, m - half[i], m + half[i])
            }).collect())
            .collect();
        let outcome: Vec<(bool, bool)> = points
            .par_iter()
            .map(|h| {
                let v = g.eval(h);
                let inside = !space.inner(h, &linalg::sub(h, &tt)).is_positive();
                (v != 0, v == 0 || inside)
            })
            .collect();
        for (h, (support, ok)) in points.iter().zip(outcome) {
            hits += usize::from(support);
            t.check(ok, || format!("{c} T={tt:?}: Γ ≠ 0 at {h:?} outside the ball"));
        }
    }
    t.note(format!("{hits} of {} points in the support", PAIRS * PER_PAIR));
    t.check(hits > 0, || "no point landed in any support".into());
    Ok(())
}

fn fan_refinement(cfg: &SuiteConfig, t: &mut Tally) -> Result<()> {
    let sc = |seed| SamplerConfig { samples: cfg.samples, max_coord: 12, seed };
    let f = builtin_fan("gl2_in_gl3_corner")?;
    let mut cases: Vec<(String, Arc<Cone>, Vec<Arc<Cone>>)> =
        vec![("gl2_in_gl3_corner".into(), Arc::new(f.base_chamber()), f.top_cells())];
    let pool = random_corpus(&CorpusConfig { count: 60, min_dim: 2, max_dim: 3, max_entry: 3, seed: cfg.corpus.seed + 4 });
    let mut k = 0;
    for e in pool.iter().filter(|e| e.cone.is_full_dimensional()) {
        if k == 10 {
            break;
        }
        let cells = arrangement_fan(&e.cone, 2 + k % 2, cfg.seed + k as u64);
        if cells.len() < 2 {
            continue;
        }
        cases.push((format!("{} cut into {}", e.name, cells.len()), e.cone.clone(), cells));
        k += 1;
    }
    t.check(k == 10, || format!("only {k} random arrangement fans"));
    for (i, (name, c, cells)) in cases.into_iter().enumerate() {
        let ctx = IdentityContext { cone: Some(c), fan: Some(cells), ..Default::default() };
        let r = verify_identity(IdentityId::GammaFanRefinement, &ctx, &sc(cfg.seed + i as u64))?;
        t.check(r.passed, || format!("{name}: {} failures, first {:?}", r.failure_count, r.failures.first()));
        t.check(r.samples >= cfg.samples, || format!("{name}: only {} points", r.samples));
    }
    Ok(())
}

fn transforms(cfg: &SuiteConfig, t: &mut Tally) -> Result<()> {
    let s = Space::euclidean(2);
    let quadrant = Cone::from_generators(&s, &linalg::Matrix::identity(2).row_vecs(), &[])?;
    let one = Poly::one(2);
    let lc = laplace_cone(&quadrant, &one)?;
    let mut rng = rng(cfg, 5);
    for _ in 0..20 {
        let mut c = || {
            let mut x = 0;
            while x == 0 {
                x = rng.gen_range(-9..=9);
            }
            cq(qq(x, rng.gen_range(1..=5)), qq(rng.gen_range(-3..=3), 2))
        };
        let lam = vec![c(), c()];
        let want = ExactScalar::from_cq(CQ::one() / (&lam[0] * &lam[1]));
        let got = lc.eval(&lam, None)?;
        t.check(got == want, || format!("λ = {lam:?}: {got} != {want}"));
    }
    let start = Instant::now();
    let lam = [creal(q(-1)), creal(q(-2))];
    let est = monte_carlo_cross_check(&quadrant, &one, &lam, cfg.mc_samples, cfg.seed)?;
    let err = est.relative_error((0.5, 0.0));
    t.check(err < cfg.mc_tolerance, || format!("Monte Carlo {} vs 1/2 (relative error {err:.4})", est.re));
    let secs = start.elapsed().as_secs_f64();
    t.check(secs < 30.0, || format!("Monte Carlo took {secs:.1} s"));
    t.note(format!("{} samples at λ = (−1, −2)", cfg.mc_samples));
    Ok(())
}

fn constant_term_law(cfg: &SuiteConfig, t: &mut Tally) -> Result<()> {
    const PER_CONE: usize = 5;
    let corpus = corpus_cones(cfg);
    let results: Vec<Result<(String, bool, usize, usize, Vec<String>)>> = corpus
        .par_iter()
        .enumerate()
        .map(|(i, (name, c))| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(600 + i as u64));
            let n = c.ambient_dim();
            let one = Poly::one(n);
            let lc = laplace_cone(c, &one)?;
            let g = laplace_gamma_symbolic(c, &one)?;
            let symbolic = g.t_free_part().without_t().equals(&lc);
            let (mut ok, mut poles, mut tries) = (0, 0, 0);
            let mut bad = Vec::new();
            while ok < PER_CONE && tries < 1000 {
                tries += 1;
                let lam: Vec<CQ> = (0..n).map(|_| creal(qq(rng.gen_range(-9..=9), rng.gen_range(1..=4)))).collect();
                if !is_regular(&lam, c)? {
                    continue;
                }
                let pe = match g.to_polyexp(&lam) {
                    Ok(p) => p,
                    // a single triangulation term sits on its own pole
                    Err(Error::Pole(_)) => {
                        poles += 1;
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                let v = lc.eval(&lam, None)?;
                if pe.purely_polynomial_part() != Poly::constant(n, v) {
                    bad.push(format!("{name} λ = {lam:?}"));
                }
                ok += 1;
            }
            Ok((name.clone(), symbolic, ok, poles, bad))
        })
        .collect();
    let mut poles = 0;
    for r in results {
        let (name, symbolic, ok, p, bad) = r?;
        poles += p;
        t.check(symbolic, || format!("{name}: symbolic constant part differs"));
        t.check(ok == PER_CONE, || format!("{name}: only {ok} regular λ found"));
        for b in bad {
            t.fail(b);
        }
        t.checks += ok;
    }
    t.note(format!("{poles} λ skipped at single-term poles"));
    Ok(())
}

fn relative_fans(cfg: &SuiteConfig, t: &mut Tally) -> Result<()> {
    let line = builtin_fan("gl1_in_gl2_corner")?;
    let mut dims: Vec<usize> = line.cells().iter().map(|c| c.cone.dim()).collect();
    dims.sort_unstable();
    t.check(dims == [0, 1, 1], || format!("gl1_in_gl2_corner cell dimensions {dims:?}"));
    let rays: Vec<Q> = line.cells().iter().filter(|c| c.cone.dim() == 1).map(|c| c.cone.rint_point()[0].clone()).collect();
    t.check(rays.len() == 2 && rays[0].signum() == -rays[1].signum(), || "the two half-lines are not opposite".into());
    t.check(line.base_chamber().is_subspace(), || "the GL(1) chamber is not the whole line".into());

    let plane = builtin_fan("gl2_in_gl3_corner")?;
    let total = plane.cells().len();
    let open = plane.cells().iter().filter(|c| c.cone.dim() == plane.dim()).count();
    t.check(total == 8, || format!("gl2_in_gl3_corner has {total} cells"));
    t.check(open == 3, || format!("gl2_in_gl3_corner has {open} open 2-cells"));

    for (k, name) in BUILTIN_CONFIGS.iter().enumerate() {
        let f = builtin_fan(name)?;
        t.check(f.discrepancies.is_empty(), || format!("{name}: {:?}", f.discrepancies));
        let r = f.check_partition(10 * cfg.samples, cfg.seed + k as u64)?;
        t.check(r.overlaps.is_empty(), || format!("{name}: overlaps {:?}", r.overlaps));
        t.check(r.coverage_failures.is_empty(), || format!("{name}: coverage {:?}", r.coverage_failures));
        t.check(r.witness_failures.is_empty(), || format!("{name}: witnesses {:?}", r.witness_failures));
        t.check(r.face_failures.is_empty(), || format!("{name}: faces {:?}", r.face_failures));
        t.note(format!("{name}: {} cells", r.cells));
    }
    Ok(())
}

fn relative_identities(cfg: &SuiteConfig, t: &mut Tally) -> Result<()> {
    let sc = SamplerConfig { samples: cfg.samples, max_coord: 12, seed: cfg.seed };
    for name in BUILTIN_CONFIGS {
        let f = Arc::new(builtin_fan(name)?);
        let ctx = IdentityContext { relative: Some(f), ..Default::default() };
        for id in RELATIVE_IDS {
            let r = verify_identity(id, &ctx, &sc)?;
            t.check(r.passed, || format!("{name} {id}: {:?} {:?}", r.failures.first(), r.details));
        }
    }
    Ok(())
}

fn root_data(t: &mut Tally) -> Result<()> {
    for n in 1..=4 {
        let datum = RootDatum::gl(n);
        let rep = check_basic_root_props(&datum)?;
        t.check(rep.passed(), || format!("GL({n}): {:?}", rep.failures));
        t.note(format!("GL({n}): {} pairs P ⊆ Q", rep.pairs));
        let roots = datum.roots();
        for p in datum.parabolics() {
            // roots of N_P are exactly those positive on the open chamber
            let h = p.chamber().rint_point();
            let np: Vec<&Vec<Q>> = roots.iter().filter(|a| dot(a, &h).is_positive()).collect();
            let mut rho = vec![Q::zero(); n];
            for a in &np {
                rho = linalg::add(&rho, a);
            }
            let rho = linalg::scale(&rho, &qq(1, 2));
            t.check(p.rho() == rho, || format!("{p}: ρ {:?} != {rho:?}", p.rho()));
            t.check(p.dim_nilradical() == np.len(), || format!("{p}: dim N {} != {}", p.dim_nilradical(), np.len()));
        }
    }
    Ok(())
}

fn random_t(rng: &mut ChaCha8Rng, n: usize) -> Vec<Q> {
    (0..n).map(|_| qq(rng.gen_range(-5..=5), rng.gen_range(1..=3))).collect()
}

fn period_engine(cfg: &SuiteConfig, t: &mut Tally) -> Result<()> {
    let sampler = FormSampler { max_data_per_cell: 1, max_degree: 2, complex: true, integrable: false };
    for (k, name) in BUILTIN_CONFIGS.iter().enumerate() {
        let f = builtin_fan(name)?;
        let n = f.dim();
        let mut rng = form_rng(cfg.seed.wrapping_mul(100).wrapping_add(k as u64));
        let (mut ok, mut drawn, mut skipped) = (0, 0, 0);
        while ok < cfg.forms_per_fan && drawn < 20 * cfg.forms_per_fan {
            drawn += 1;
            let xi = random_character(&f, &mut rng);
            let form = random_form(&f, &xi, &sampler, &mut rng)?;
            let reg = is_xi_regular(&f, &form, &xi)?;
            if integrability(&f, &form, &xi)? {
                t.check(reg.regular, || format!("{name}: integrable but not regular: {}", form.to_json(&f).unwrap_or_default()));
            }
            if !reg.regular {
                continue;
            }
            let tp = random_t(&mut rng, n);
            let (e, v) = match (truncated_period_expansion(&f, &form, &xi, &tp), regularized_period(&f, &form, &xi, &tp)) {
                (Ok(e), Ok(v)) => (e, v),
                (Err(Error::Pole(_)), _) | (_, Err(Error::Pole(_))) => {
                    skipped += 1;
                    continue;
                }
                (Err(e), _) | (_, Err(e)) => return Err(e),
            };
            t.check(constant_part_equals(&e, &v), || format!("{name}: constant part differs"));
            let p0 = e.purely_polynomial_part();
            for _ in 0..10 {
                let s = random_t(&mut rng, n);
                t.check(e.translate(&s).purely_polynomial_part() == p0, || format!("{name}: shift {s:?} moves the constant"));
            }
            ok += 1;
        }
        t.check(ok == cfg.forms_per_fan, || format!("{name}: only {ok} regular forms in {drawn} draws"));
        t.note(format!("{name}: {ok} regular forms of {drawn} drawn, {skipped} at single-term poles"));
    }

    // the half-line: μ = λ + 1/2 with ξ = 0
    let line = builtin_fan("gl1_in_gl2_corner")?;
    let ray = line
        .maximal_cells()
        .into_iter()
        .find(|c| c.cone.rint_point()[0].is_positive())
        .ok_or(Error::EmptyFan)?
        .parabolic
        .clone();
    for (num, den) in [(-5, 2), (3, 1), (1, 3), (-7, 4)] {
        let lam = qq(num, den);
        let mu = &lam + qq(1, 2);
        let mut form = ToyFormData::new();
        form.push(&ray, ExponentDatum::simple(vec![creal(lam.clone())]));
        let v = regularized_period(&line, &form, &Character::zero(1), &[q(0)])?;
        let want = ExactScalar::from_q(-mu.recip());
        t.check(v == want, || format!("λ = {lam}: {v} != {want}"));
    }

    let mc = FormSampler { max_data_per_cell: 1, max_degree: 0, complex: false, integrable: true };
    for (k, name) in BUILTIN_CONFIGS.iter().enumerate() {
        let f = builtin_fan(name)?;
        if f.dim() > 2 {
            continue;
        }
        let mut rng = form_rng(cfg.seed.wrapping_mul(100).wrapping_add(50 + k as u64));
        for round in 0..3 {
            let xi = random_character(&f, &mut rng);
            let form = random_form(&f, &xi, &mc, &mut rng)?;
            t.check(integrability(&f, &form, &xi)?, || format!("{name}: sampled form is not integrable"));
            let tp = vec![Q::zero(); f.dim()];
            let exact = regularized_period(&f, &form, &xi, &tp)?.to_c64();
            let est = period_monte_carlo(&f, &form, &xi, &tp, cfg.mc_samples, cfg.seed + round)?;
            let err = est.relative_error(exact);
            t.check(err < cfg.mc_tolerance, || format!("{name}: exact {exact:?}, estimate ({}, {}), error {err:.4}", est.re, est.im));
        }
    }
    Ok(())
}

fn eisenstein(cfg: &SuiteConfig, t: &mut Tally) -> Result<()> {
    let none = BTreeMap::new();
    let mut rng = rng(cfg, 11);
    for name in BUILTIN_CONFIGS {
        let f = builtin_fan(name)?;
        let cqs = computed_c_values(&f)?;
        let class: Vec<_> = cqs.keys().cloned().collect();
        for p in &class {
            let cc = f.c_coefficient(p)?;
            t.check(cc.consistent(), || format!("{name} {}: {cc:?}", cc.cell));
            if cc.abelian {
                t.check(cc.dimension_ratio.as_ref() == Some(&cc.value), || format!("{name} {}: ratio {:?}", cc.cell, cc.dimension_ratio));
            }
        }
        for _ in 0..3 {
            let c = qq(rng.gen_range(-6..=6), rng.gen_range(1..=4));
            let tt: Vec<Q> = (0..f.dim()).map(|_| qq(rng.gen_range(-4..=4), 3)).collect();
            let r = eisenstein_correction_terms(&f, &class, &c, &cqs, &tt, &none)?;
            t.check(r.terms.len() == 2 * class.len(), || format!("{name}: {} terms", r.terms.len()));
            let mut want = Vec::new();
            for term in &r.terms {
                let cell = f.cell_by_id(&term.cell)?;
                let a = &c * (q(1) - q(2) * &cqs[&cell.parabolic]);
                let sgn = q(i64::from(term.sign));
                // root of sgn·s + a
                let root = -&a / &sgn;
                want.push(root.clone());
                t.check(term.pole == root, || format!("{name} {}: pole {} != {root}", term.cell, term.pole));
                t.check(term.denominator(&creal(root.clone())).re.is_zero(), || format!("{name}: denominator nonzero at the pole"));
                t.check(matches!(term.eval(&creal(root.clone())), Err(Error::Pole(_))), || format!("{name}: no pole at {root}"));
                t.check(term.eval(&creal(&root + q(1))).is_ok(), || format!("{name}: spurious pole at {root} + 1"));
            }
            want.sort();
            want.dedup();
            t.check(r.poles == want, || format!("{name}: pole set {:?} != {want:?}", r.poles));
            for p in &class {
                let id = f.cell(p)?.id();
                let signs: Vec<i8> = r.terms.iter().filter(|x| x.cell == id).map(|x| x.sign).collect();
                t.check(signs == [1, -1], || format!("{name} {id}: signs {signs:?}"));
            }
        }
    }
    let diag = builtin_fan("gl2_diag_in_gl2xgl2")?;
    let cqs = computed_c_values(&diag)?;
    t.check(cqs.len() == 1, || format!("diagonal fan has {} maximal cells", cqs.len()));
    for (p, v) in &cqs {
        t.check(p.is_minimal(), || format!("diagonal maximal cell {p} is not B×B"));
        t.check(*v == qq(1, 2), || format!("c = {v} for {p}"));
        let cc = diag.c_coefficient(p)?;
        t.check(cc.dimension_ratio == Some(qq(1, 2)), || format!("dimension ratio {:?}", cc.dimension_ratio));
    }
    Ok(())
}

fn determinism(cfg: &SuiteConfig, t: &mut Tally) -> Result<()> {
    let quiet = SuiteConfig { timing: false, ..cfg.clone() };
    for k in [2, 5, 7, 9, 11] {
        let a = to_pretty(&run_criterion(k, &quiet)?);
        let b = to_pretty(&run_criterion(k, &quiet)?);
        t.check(a == b, || format!("criterion {k} report differs between runs"));
    }
    for name in FIGURES {
        let a = emit_figure(name, &FigureParams::default())?;
        let b = emit_figure(name, &FigureParams::default())?;
        t.check(a == b, || format!("{name}.svg differs between runs"));
    }
    let names = |c: Vec<(String, Arc<Cone>)>| c.into_iter().map(|(n, c)| format!("{n} {c}")).collect::<Vec<_>>();
    t.check(names(corpus_cones(cfg)) == names(corpus_cones(cfg)), || "random corpus differs between runs".into());
    for name in BUILTIN_CONFIGS {
        let f = builtin_fan(name)?;
        let draw = || -> Result<String> {
            let mut rng = form_rng(cfg.seed);
            let xi = random_character(&f, &mut rng);
            let s = FormSampler { max_data_per_cell: 2, max_degree: 2, complex: true, integrable: false };
            random_form(&f, &xi, &s, &mut rng)?.to_json(&f)
        };
        t.check(draw()? == draw()?, || format!("{name}: random forms differ between runs"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_and_criterion() {
        let cfg = SuiteConfig { suite: "nope".into(), ..Default::default() };
        assert!(matches!(run_suite(&cfg), Err(Error::Unknown { .. })));
        assert!(run_criterion(0, &cfg).is_err());
        assert!(run_criterion(13, &cfg).is_err());
    }

    #[test]
    fn cheap_criteria_pass() {
        let cfg = SuiteConfig::default();
        for k in [2, 9] {
            let c = run_criterion(k, &cfg).unwrap();
            assert!(c.passed, "{c:?}");
            assert!(c.elapsed_ms.is_none());
        }
    }
}
