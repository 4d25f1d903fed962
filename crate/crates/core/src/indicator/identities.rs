//! Registry of indicator identities, each checked by exact pointwise evaluation.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::cell::{Cell, SamplePoint, SignedCellSum, Term};
use super::functions::{gamma, gamma_support_certificate, sigma};
use super::sampling::{sample_points, Sampler, SamplerConfig};
use crate::arith::{fmt_rational, to_f64, Q};
use crate::cones::{eps, Cone, Space};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IdentityId {
    Euler,
    BgsAngle,
    BgsDual,
    Langlands1,
    Langlands2,
    GammaDecomposition,
    GammaDualDecomposition,
    GammaDuality,
    GammaFanRefinement,
    HtauTauSigma,
    SigmaSupport,
    SigmaNormBound,
    SigmaZero,
    GammaVanishing,
    GammaSupport,
    RelativeGammaSupport,
    RelativeTauExpansion,
    RelativeTauHatExpansion,
    RelativeHtauTauSigma,
    RelativeSigmaSupport,
    RelativeSigmaNormBound,
}

impl IdentityId {
    pub const ALL: [IdentityId; 21] = [
        IdentityId::Euler,
        IdentityId::BgsAngle,
        IdentityId::BgsDual,
        IdentityId::Langlands1,
        IdentityId::Langlands2,
        IdentityId::GammaDecomposition,
        IdentityId::GammaDualDecomposition,
        IdentityId::GammaDuality,
        IdentityId::GammaFanRefinement,
        IdentityId::HtauTauSigma,
        IdentityId::SigmaSupport,
        IdentityId::SigmaNormBound,
        IdentityId::SigmaZero,
        IdentityId::GammaVanishing,
        IdentityId::GammaSupport,
        IdentityId::RelativeGammaSupport,
        IdentityId::RelativeTauExpansion,
        IdentityId::RelativeTauHatExpansion,
        IdentityId::RelativeHtauTauSigma,
        IdentityId::RelativeSigmaSupport,
        IdentityId::RelativeSigmaNormBound,
    ];

    /// Identities that only need a single cone (and sampled truncation points).
    pub const CONE_IDS: [IdentityId; 14] = [
        IdentityId::Euler,
        IdentityId::BgsAngle,
        IdentityId::BgsDual,
        IdentityId::Langlands1,
        IdentityId::Langlands2,
        IdentityId::GammaDecomposition,
        IdentityId::GammaDualDecomposition,
        IdentityId::GammaDuality,
        IdentityId::HtauTauSigma,
        IdentityId::SigmaSupport,
        IdentityId::SigmaNormBound,
        IdentityId::SigmaZero,
        IdentityId::GammaVanishing,
        IdentityId::GammaSupport,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IdentityId::Euler => "euler",
            IdentityId::BgsAngle => "bgs_angle",
            IdentityId::BgsDual => "bgs_dual",
            IdentityId::Langlands1 => "langlands_1",
            IdentityId::Langlands2 => "langlands_2",
            IdentityId::GammaDecomposition => "gamma_decomposition",
            IdentityId::GammaDualDecomposition => "gamma_dual_decomposition",
            IdentityId::GammaDuality => "gamma_duality",
            IdentityId::GammaFanRefinement => "gamma_fan_refinement",
            IdentityId::HtauTauSigma => "htau_tau_sigma",
            IdentityId::SigmaSupport => "sigma_support",
            IdentityId::SigmaNormBound => "sigma_norm_bound",
            IdentityId::SigmaZero => "sigma_zero",
            IdentityId::GammaVanishing => "gamma_vanishing",
            IdentityId::GammaSupport => "gamma_support",
            IdentityId::RelativeGammaSupport => "relative_gamma_support",
            IdentityId::RelativeTauExpansion => "relative_tau_expansion",
            IdentityId::RelativeTauHatExpansion => "relative_tau_hat_expansion",
            IdentityId::RelativeHtauTauSigma => "relative_htau_tau_sigma",
            IdentityId::RelativeSigmaSupport => "relative_sigma_support",
            IdentityId::RelativeSigmaNormBound => "relative_sigma_norm_bound",
        }
    }

    pub fn is_relative(self) -> bool {
        self.name().starts_with("relative_")
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IdentityId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        IdentityId::ALL
            .iter()
            .copied()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::Unknown { kind: "identity", name: s.to_string() })
    }
}

type PointFn = Arc<dyn Fn(&SamplePoint, &[Q]) -> i64 + Send + Sync>;

/// One side of a pointwise identity.
#[derive(Clone)]
pub enum Side {
    Sum(SignedCellSum),
    Func(PointFn),
}

impl Side {
    pub fn constant(dim: usize, c: i64) -> Side {
        Side::Sum(SignedCellSum::constant(dim, c))
    }

    fn eval(&self, p: &SamplePoint, h: &[Q]) -> i64 {
        match self {
            Side::Sum(s) => s.eval_point(p),
            Side::Func(f) => f(p, h),
        }
    }
}

#[derive(Clone)]
pub struct Check {
    pub label: String,
    pub lhs: Side,
    pub rhs: Side,
}

impl Check {
    pub fn new(label: impl Into<String>, lhs: SignedCellSum, rhs: SignedCellSum) -> Self {
        Check { label: label.into(), lhs: Side::Sum(lhs), rhs: Side::Sum(rhs) }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Failure {
    pub check: String,
    pub point: Vec<String>,
    pub lhs: i64,
    pub rhs: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub id: String,
    pub cones: Vec<String>,
    pub seed: u64,
    pub samples: usize,
    pub checks: usize,
    pub failure_count: usize,
    pub failures: Vec<Failure>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub details: Vec<String>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl IdentityReport {
    pub fn merge(id: &str, seed: u64, parts: Vec<IdentityReport>) -> IdentityReport {
        let mut out = IdentityReport {
            id: id.to_string(),
            cones: Vec::new(),
            seed,
            samples: 0,
            checks: 0,
            failure_count: 0,
            failures: Vec::new(),
            details: Vec::new(),
            passed: true,
            elapsed_ms: None,
        };
        for p in parts {
            out.cones.extend(p.cones);
            out.samples += p.samples;
            out.checks += p.checks;
            out.failure_count += p.failure_count;
            for f in p.failures {
                if out.failures.len() < MAX_WITNESSES {
                    out.failures.push(f);
                }
            }
            out.details.extend(p.details);
            out.passed &= p.passed;
            if let Some(e) = p.elapsed_ms {
                *out.elapsed_ms.get_or_insert(0) += e;
            }
        }
        out
    }
}

const MAX_WITNESSES: usize = 20;

fn fmt_point(h: &[Q]) -> Vec<String> {
    h.iter().map(fmt_rational).collect()
}

/// Evaluates every check at every point; failures sorted by sample index.
pub fn run_checks(id: &str, cones: Vec<String>, seed: u64, checks: &[Check], points: &[Vec<Q>]) -> IdentityReport {
    let per_point: Vec<Vec<Failure>> = points
        .par_iter()
        .map(|h| {
            let p = SamplePoint::new(h);
            checks
                .iter()
                .filter_map(|c| {
                    let l = c.lhs.eval(&p, h);
                    let r = c.rhs.eval(&p, h);
                    (l != r).then(|| Failure { check: c.label.clone(), point: fmt_point(h), lhs: l, rhs: r })
                })
                .collect()
        })
        .collect();
    let failure_count = per_point.iter().map(|f| f.len()).sum();
    let failures = per_point.into_iter().flatten().take(MAX_WITNESSES).collect();
    IdentityReport {
        id: id.to_string(),
        cones,
        seed,
        samples: points.len(),
        checks: checks.len(),
        failure_count,
        failures,
        details: Vec::new(),
        passed: failure_count == 0,
        elapsed_ms: None,
    }
}

/// What an identity quantifies over.
#[derive(Clone, Default)]
pub struct IdentityContext {
    pub cone: Option<Arc<Cone>>,
    /// Truncation points; drawn from the sampler when empty.
    pub ts: Vec<Vec<Q>>,
    /// Subdivision of the cone for the fan refinement identity.
    pub fan: Option<Vec<Arc<Cone>>>,
    /// Relative fan for the `relative_*` identities.
    pub relative: Option<Arc<crate::fan::RelativeFan>>,
}

impl IdentityContext {
    pub fn cone(c: Arc<Cone>) -> Self {
        IdentityContext { cone: Some(c), ..Default::default() }
    }
}

pub(crate) fn projector(c: &Cone) -> Matrix {
    c.span().projection_matrix().clone()
}

pub(crate) fn rejector(c: &Cone) -> Matrix {
    let n = c.ambient_dim();
    let p = projector(c);
    let mut m = Matrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            let v = m.get(i, j) - p.get(i, j);
            m.set(i, j, v);
        }
    }
    m
}

fn cell_map(c: Arc<Cone>, m: &Matrix, s: &[Q]) -> Cell {
    Cell::rint(c).pullback(m, s)
}

fn zero_cone(space: &Space) -> Arc<Cone> {
    Arc::new(Cone::zero(space))
}

/// Vectors worth combining when sampling near the walls of `c` and its derived cones.
pub fn cone_pool(c: &Cone, ts: &[Vec<Q>]) -> Result<(Vec<Vec<Q>>, Vec<Vec<Q>>)> {
    let mut pool: Vec<Vec<Q>> = Vec::new();
    let mut fixed: Vec<Vec<Q>> = vec![c.space().zero_vector()];
    let d = c.dual_arc();
    for k in [c, d.as_ref()] {
        pool.extend(k.rays().iter().cloned());
        pool.extend(k.lineality().iter().cloned());
    }
    for fd in c.face_data()? {
        for k in [fd.cone(), &fd.angle, &fd.dual, &fd.angle_dual] {
            let p = k.rint_point();
            if !linalg::is_zero_vec(&p) {
                pool.push(p.clone());
            }
            fixed.push(p.clone());
            for t in ts {
                fixed.push(linalg::add(t, &p));
            }
        }
        for t in ts {
            let pt = fd.cone().span().project(t);
            pool.push(pt.clone());
            pool.push(linalg::sub(t, &pt));
        }
    }
    fixed.extend(ts.iter().cloned());
    pool.retain(|v| !linalg::is_zero_vec(v));
    pool.sort();
    pool.dedup();
    Ok((pool, fixed))
}

/// Deterministic truncation points: a sampled vector, a point of `rint C` and a
/// structured combination.
pub fn draw_ts(c: &Cone, seed: u64, max_coord: i64) -> Vec<Vec<Q>> {
    let n = c.ambient_dim();
    let mut s = Sampler::new(seed ^ 0x5eed_7, max_coord.min(6));
    let mut pool: Vec<Vec<Q>> = c.rays().to_vec();
    pool.extend(c.lineality().iter().cloned());
    let mut inner = c.rint_point();
    for l in c.lineality() {
        inner = linalg::add(&inner, &linalg::scale(l, &s.small()));
    }
    vec![s.vector(n), inner, s.structured(n, &pool, &[])]
}

fn checks_for(id: IdentityId, c: &Arc<Cone>, t: &[Q]) -> Result<Vec<Check>> {
    let n = c.ambient_dim();
    let space = c.space();
    let data = c.face_data()?;
    let f0 = c.lineality_dim();
    let cd = c.dim();
    let subspace = i64::from(c.is_subspace());
    let ident = Matrix::identity(n);
    let zero = space.zero_vector();
    let tag = |s: &str| format!("{s} T={}", crate::arith::RationalVector(t.to_vec()));
    let mut out = Vec::new();
    match id {
        IdentityId::Euler => {
            let sum: i64 = data.iter().map(|f| eps(cd, f.dim())).sum();
            out.push(Check::new("euler", SignedCellSum::constant(n, sum), SignedCellSum::constant(n, subspace)));
        }
        IdentityId::BgsAngle => {
            for (i, f) in data.iter().enumerate() {
                let terms = data
                    .iter()
                    .filter(|e| f.face.is_subface_of(&e.face))
                    .map(|e| Term { weight: eps(cd, e.dim()), factors: vec![Cell::rint(e.angle.clone())] })
                    .collect();
                let lhs = SignedCellSum::from_terms(n, terms);
                let neg = Cell::closed(f.angle.clone()).pullback(&negate(&ident), &zero);
                out.push(Check::new(format!("face {i}"), lhs, SignedCellSum::cell(n, neg)));
            }
        }
        IdentityId::BgsDual => {
            let terms = data
                .iter()
                .map(|f| Term { weight: eps(f.dim(), f0), factors: vec![Cell::rint(f.dual.clone())] })
                .collect();
            let lhs = SignedCellSum::from_terms(n, terms);
            let rhs = Cell::closed(c.dual_arc()).pullback(&negate(&ident), &zero);
            out.push(Check::new("dual", lhs, SignedCellSum::cell(n, rhs)));
        }
        IdentityId::Langlands1 => {
            let terms = data
                .iter()
                .map(|f| Term {
                    weight: eps(cd, f.dim()),
                    factors: vec![
                        cell_map(f.cone().clone(), &projector(f.cone()), &zero),
                        cell_map(f.angle_dual.clone(), &rejector(f.cone()), &zero),
                    ],
                })
                .collect();
            out.push(Check::new("langlands 1", SignedCellSum::from_terms(n, terms), SignedCellSum::constant(n, subspace)));
        }
        IdentityId::Langlands2 => {
            let terms = data
                .iter()
                .map(|f| Term {
                    weight: eps(cd, f.dim()),
                    factors: vec![Cell::rint(f.angle.clone()), Cell::rint(f.dual.clone())],
                })
                .collect();
            let rhs = SignedCellSum::cell(n, Cell::rint(zero_cone(space))).scale(subspace);
            out.push(Check::new("langlands 2", SignedCellSum::from_terms(n, terms), rhs));
        }
        IdentityId::GammaDecomposition => {
            let mut rhs = SignedCellSum::zero(n);
            for f in data {
                let rej = rejector(f.cone());
                let pf = projector(f.cone());
                let g = gamma(&f.angle, &rej.mul_vec(t))?.pullback(&rej, &zero);
                let cell = SignedCellSum::cell(n, cell_map(f.cone().clone(), &pf, &pf.mul_vec(t)));
                rhs = rhs.add(&g.mul(&cell));
            }
            out.push(Check::new(tag("decomposition"), SignedCellSum::cell(n, Cell::rint(c.clone())), rhs));
        }
        IdentityId::GammaDualDecomposition => {
            let mut rhs = SignedCellSum::zero(n);
            for f in data {
                let rej = rejector(f.cone());
                let pf = projector(f.cone());
                let a = SignedCellSum::cell(n, cell_map(f.angle_dual.clone(), &rej, &zero));
                let g = gamma(f.cone(), &pf.mul_vec(t))?.pullback(&pf, &zero);
                rhs = rhs.add(&a.mul(&g).scale(eps(f.dim(), f0)));
            }
            let lhs = SignedCellSum::cell(n, Cell::shifted(c.dual_arc(), t));
            out.push(Check::new(tag("dual decomposition"), lhs, rhs));
        }
        IdentityId::GammaDuality => {
            let lhs = gamma(c, t)?;
            let d = c.dual_arc();
            let rhs = gamma(&d, &linalg::neg(t))?.pullback(&ident, t).scale(eps(cd, f0));
            out.push(Check::new(tag("duality"), lhs, rhs));
        }
        IdentityId::HtauTauSigma => {
            let sigmas: Vec<SignedCellSum> = (0..data.len()).map(|e| sigma(c, e)).collect::<Result<_>>()?;
            for (i, f) in data.iter().enumerate() {
                let lhs = SignedCellSum::from_terms(
                    n,
                    vec![Term { weight: 1, factors: vec![Cell::rint(f.angle.clone()), Cell::rint(f.dual.clone())] }],
                );
                let mut rhs = SignedCellSum::zero(n);
                for (e, s) in data.iter().zip(&sigmas) {
                    if e.face.is_subface_of(&f.face) {
                        rhs = rhs.add(s);
                    }
                }
                out.push(Check::new(format!("face {i}"), lhs, rhs));
            }
        }
        IdentityId::SigmaSupport => {
            for (i, f) in data.iter().enumerate() {
                let s = sigma(c, i)?;
                let inside = SignedCellSum::cell(n, Cell::rint(f.angle.clone()));
                let lhs = s.sub(&s.mul(&inside));
                out.push(Check::new(format!("face {i}"), lhs, SignedCellSum::zero(n)));
            }
        }
        IdentityId::SigmaZero => {
            let top = data.len() - 1;
            let rhs = SignedCellSum::cell(n, Cell::rint(zero_cone(space))).scale(subspace);
            out.push(Check::new("sigma(C,C)", sigma(c, top)?, rhs));
        }
        IdentityId::GammaVanishing => {
            let g = gamma(c, t)?;
            let lin = Arc::new(c.minimal_face());
            let pl = projector(&lin);
            let in_span = SignedCellSum::cell(n, Cell::closed(Arc::new(Cone::subspace(space, c.span().basis())?)));
            let agree = SignedCellSum::cell(n, cell_map(zero_cone(space), &pl, &pl.mul_vec(t)));
            let lhs = g.sub(&g.mul(&in_span.mul(&agree)));
            out.push(Check::new(tag("vanishing"), lhs, SignedCellSum::zero(n)));
        }
        IdentityId::GammaSupport => {
            let g = Arc::new(gamma(c, t)?);
            let ball = gamma_support_certificate(c, t)?;
            let f: PointFn = Arc::new(move |p, h| i64::from(g.eval_point(p) != 0 && !ball.contains(h)));
            out.push(Check { label: tag("support ball"), lhs: Side::Func(f), rhs: Side::constant(n, 0) });
        }
        other => {
            return Err(Error::Input(format!("identity {other} needs a fan context")));
        }
    }
    Ok(out)
}

fn negate(m: &Matrix) -> Matrix {
    let mut r = m.clone();
    for x in r.data.iter_mut() {
        *x = -x.clone();
    }
    r
}

fn timed<F: FnOnce() -> Result<IdentityReport>>(timing: bool, f: F) -> Result<IdentityReport> {
    let start = Instant::now();
    let mut r = f()?;
    if timing {
        r.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    }
    Ok(r)
}

/// Verifies `id` in `ctx` at sampled exact rational points.
pub fn verify_identity(id: IdentityId, ctx: &IdentityContext, cfg: &SamplerConfig) -> Result<IdentityReport> {
    verify_identity_timed(id, ctx, cfg, false)
}

pub fn verify_identity_timed(
    id: IdentityId,
    ctx: &IdentityContext,
    cfg: &SamplerConfig,
    timing: bool,
) -> Result<IdentityReport> {
    timed(timing, || {
        if id.is_relative() {
            let fan = ctx
                .relative
                .as_ref()
                .ok_or_else(|| Error::Input(format!("identity {id} needs a relative fan")))?;
            return crate::fan::verify_relative(id, fan, cfg);
        }
        let c = ctx.cone.as_ref().ok_or_else(|| Error::Input(format!("identity {id} needs a cone")))?;
        let ts = if ctx.ts.is_empty() { draw_ts(c, cfg.seed, cfg.max_coord) } else { ctx.ts.clone() };
        for t in &ts {
            c.space().check(t)?;
        }
        match id {
            IdentityId::GammaFanRefinement => {
                let fan = ctx
                    .fan
                    .as_ref()
                    .ok_or_else(|| Error::Input("gamma_fan_refinement needs a fan".into()))?;
                fan_refinement(c, fan, &ts, cfg)
            }
            IdentityId::SigmaNormBound => sigma_norm_bound(c, cfg),
            _ => {
                let mut checks = Vec::new();
                let t_dependent = matches!(
                    id,
                    IdentityId::GammaDecomposition
                        | IdentityId::GammaDualDecomposition
                        | IdentityId::GammaDuality
                        | IdentityId::GammaVanishing
                        | IdentityId::GammaSupport
                );
                let used: &[Vec<Q>] = if t_dependent { &ts } else { &ts[..1] };
                for t in used {
                    checks.extend(checks_for(id, c, t)?);
                }
                let (pool, fixed) = cone_pool(c, &ts)?;
                let points = if id == IdentityId::Euler {
                    vec![c.space().zero_vector()]
                } else {
                    sample_points(c.ambient_dim(), &fixed, &pool, &ts, cfg)
                };
                Ok(run_checks(id.name(), vec![format!("{c}")], cfg.seed, &checks, &points))
            }
        }
    })
}

/// Exact fan validation: every cell lies in `c`, pairwise intersections are faces of
/// both, and every facet of a top-dimensional cell is either on the boundary of `c`
/// or shared with another top-dimensional cell.
pub fn validate_fan(c: &Cone, cells: &[Arc<Cone>]) -> Result<()> {
    if cells.is_empty() {
        return Err(Error::NotAFan("no cells".into()));
    }
    for (i, a) in cells.iter().enumerate() {
        if a.space() != c.space() {
            return Err(Error::NotAFan(format!("cell {i} lives in another space")));
        }
        if !a.is_subset_of(c) {
            return Err(Error::NotAFan(format!("cell {i} is not contained in the cone")));
        }
    }
    for i in 0..cells.len() {
        for j in i + 1..cells.len() {
            let x = cells[i].intersect(&cells[j])?;
            if cells[i].face_index(&x)?.is_none() || cells[j].face_index(&x)?.is_none() {
                return Err(Error::NotAFan(format!("cells {i} and {j} do not meet in a common face")));
            }
        }
    }
    let top: Vec<&Arc<Cone>> = cells.iter().filter(|a| a.dim() == c.dim()).collect();
    if top.is_empty() {
        return Err(Error::NotAFan("no cell of full dimension".into()));
    }
    for (i, a) in top.iter().enumerate() {
        for f in a.faces()? {
            if f.dim() + 1 != a.dim() {
                continue;
            }
            let p = f.cone.rint_point();
            let on_boundary = !c.rint_contains(&p);
            let shared = top
                .iter()
                .enumerate()
                .any(|(j, b)| j != i && b.face_index(&f.cone).ok().flatten().is_some());
            if !on_boundary && !shared {
                return Err(Error::NotAFan(format!("interior facet of cell {i} is not shared")));
            }
        }
    }
    Ok(())
}

/// One term `Γ(A(F,C), H^G, T^G)·[rint G](H − T_G)` of the refinement expansion of
/// `[rint C]` along a fan, for a face `F` of `C` and a cell face `G` with `rint G ⊆ rint F`.
#[derive(Clone, Debug)]
pub struct RefinementTerm {
    pub face: Arc<Cone>,
    pub piece: Arc<Cone>,
    pub sum: SignedCellSum,
}

fn cell_faces(cells: &[Arc<Cone>]) -> Result<Vec<Arc<Cone>>> {
    let mut gs: Vec<Arc<Cone>> = Vec::new();
    for cell in cells {
        for f in cell.faces()? {
            if !gs.iter().any(|g| **g == *f.cone) {
                gs.push(f.cone.clone());
            }
        }
    }
    Ok(gs)
}

/// The terms whose sum is `[rint C]` for a fan subdividing `C`.
pub fn fan_refinement_terms(c: &Cone, cells: &[Arc<Cone>], t: &[Q]) -> Result<Vec<RefinementTerm>> {
    validate_fan(c, cells)?;
    let n = c.ambient_dim();
    let zero = c.space().zero_vector();
    let gs = cell_faces(cells)?;
    let mut out = Vec::new();
    for f in c.face_data()? {
        for g in gs.iter().filter(|g| f.cone().rint_contains(&g.rint_point())) {
            let rej = rejector(g);
            let pg = projector(g);
            let gm = gamma(&f.angle, &rej.mul_vec(t))?.pullback(&rej, &zero);
            let cell = SignedCellSum::cell(n, cell_map(g.clone(), &pg, &pg.mul_vec(t)));
            out.push(RefinementTerm { face: f.cone().clone(), piece: g.clone(), sum: gm.mul(&cell) });
        }
    }
    Ok(out)
}

fn fan_refinement(c: &Arc<Cone>, cells: &[Arc<Cone>], ts: &[Vec<Q>], cfg: &SamplerConfig) -> Result<IdentityReport> {
    let n = c.ambient_dim();
    let gs = cell_faces(cells)?;
    let mut checks = Vec::new();
    for t in ts {
        let mut rhs = SignedCellSum::zero(n);
        for term in fan_refinement_terms(c, cells, t)? {
            rhs = rhs.add(&term.sum);
        }
        let label = format!("fan refinement T={}", crate::arith::RationalVector(t.clone()));
        checks.push(Check::new(label, SignedCellSum::cell(n, Cell::rint(c.clone())), rhs));
    }
    let (mut pool, mut fixed) = cone_pool(c, ts)?;
    for g in &gs {
        pool.extend(g.rays().iter().cloned());
        let p = g.rint_point();
        for t in ts {
            fixed.push(linalg::add(t, &p));
        }
        fixed.push(p);
    }
    let points = sample_points(n, &fixed, &pool, ts, cfg);
    let mut names = vec![format!("{c}")];
    names.extend(cells.iter().map(|x| format!("{x}")));
    Ok(run_checks(IdentityId::GammaFanRefinement.name(), names, cfg.seed, &checks, &points))
}

/// Largest `‖H_F‖² / ‖H^F‖²` over support samples of `σ`, `None` when unbounded
/// (a support point with `H^F = 0` and `H_F ≠ 0`).
pub fn norm_ratio(s: &SignedCellSum, f: &Cone, points: &[Vec<Q>]) -> Option<Q> {
    let ratios: Vec<Option<Q>> = points
        .par_iter()
        .filter(|h| s.eval(h) != 0)
        .map(|h| {
            let hf = f.span().project(h);
            let hperp = linalg::sub(h, &hf);
            let num = f.space().norm2(&hf);
            let den = f.space().norm2(&hperp);
            if den.is_zero() {
                if num.is_zero() {
                    Some(Q::zero())
                } else {
                    None
                }
            } else {
                Some(num / den)
            }
        })
        .collect();
    let mut best = Q::zero();
    for r in ratios {
        let r = r?;
        if r > best {
            best = r;
        }
    }
    Some(best)
}

/// Empirical `k = 2·max ‖H_F‖/‖H^F‖`; the doubled sample must stay within `k`.
/// A base sample that misses the support of `s` certifies nothing; when only the
/// doubled sample reaches it, the doubled sample becomes the base and is checked
/// against `more(2·|doubled|)`.
pub fn norm_bound_check(
    label: &str,
    s: &SignedCellSum,
    f: &Cone,
    first: &[Vec<Q>],
    doubled: &[Vec<Q>],
    more: &dyn Fn(usize) -> Vec<Vec<Q>>,
) -> (Option<Failure>, String) {
    let hits = |pts: &[Vec<Q>]| pts.par_iter().any(|h| s.eval(h) != 0);
    if hits(first) {
        certify(label, s, f, first, doubled)
    } else if hits(doubled) {
        certify(label, s, f, doubled, &more(2 * doubled.len()))
    } else {
        (None, format!("{label}: no support sampled"))
    }
}

fn certify(label: &str, s: &SignedCellSum, f: &Cone, first: &[Vec<Q>], doubled: &[Vec<Q>]) -> (Option<Failure>, String) {
    let base = norm_ratio(s, f, first);
    let wide = norm_ratio(s, f, doubled);
    match (base, wide) {
        (Some(b), Some(w)) => {
            // k² = 4·b; the doubled maximum w must satisfy w ≤ k²
            let k2 = b.clone() * Q::from_integer(4.into());
            let k = to_f64(&k2).sqrt();
            let detail = format!("{label}: k = {k:.6} from {} points", first.len());
            if w > k2 && w.is_positive() {
                let fail = Failure {
                    check: format!("{label} unstable under doubling"),
                    point: vec![fmt_rational(&b), fmt_rational(&w)],
                    lhs: 1,
                    rhs: 0,
                };
                (Some(fail), detail)
            } else {
                (None, detail)
            }
        }
        _ => (
            Some(Failure { check: format!("{label} unbounded ratio"), point: vec![], lhs: 1, rhs: 0 }),
            format!("{label}: k = inf"),
        ),
    }
}

fn sigma_norm_bound(c: &Arc<Cone>, cfg: &SamplerConfig) -> Result<IdentityReport> {
    let n = c.ambient_dim();
    let (pool, fixed) = cone_pool(c, &[])?;
    let first = sample_points(n, &fixed, &pool, &[], cfg);
    let cfg2 = SamplerConfig { samples: 2 * cfg.samples, ..cfg.clone() };
    let doubled = sample_points(n, &fixed, &pool, &[], &cfg2);
    let data = c.face_data()?;
    let mut failures = Vec::new();
    let mut details = Vec::new();
    for (i, f) in data.iter().enumerate() {
        let s = sigma(c, i)?;
        let more = |m: usize| sample_points(n, &fixed, &pool, &[], &SamplerConfig { samples: m, ..cfg.clone() });
        let (fail, detail) = norm_bound_check(&format!("face {i}"), &s, f.cone(), &first, &doubled, &more);
        details.push(detail);
        failures.extend(fail);
    }
    let failure_count = failures.len();
    Ok(IdentityReport {
        id: IdentityId::SigmaNormBound.name().to_string(),
        cones: vec![format!("{c}")],
        seed: cfg.seed,
        samples: doubled.len(),
        checks: data.len(),
        failure_count,
        failures,
        details,
        passed: failure_count == 0,
        elapsed_ms: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q;

    fn v(x: &[i64]) -> Vec<Q> {
        x.iter().map(|&a| q(a)).collect()
    }

    fn cfg() -> SamplerConfig {
        SamplerConfig { samples: 300, max_coord: 6, seed: 3 }
    }

    #[test]
    fn cone_identities_on_small_cones() {
        let s = Space::euclidean(2);
        let cones = vec![
            Cone::from_halfspaces(&s, &[v(&[1, 0]), v(&[0, 1])], &[]).unwrap(),
            Cone::from_halfspaces(&s, &[v(&[1, 0])], &[]).unwrap(),
            Cone::subspace(&s, &[v(&[1, 1])]).unwrap(),
            Cone::from_generators(&s, &[v(&[1, 2])], &[]).unwrap(),
            Cone::zero(&s),
        ];
        for c in cones {
            let ctx = IdentityContext::cone(Arc::new(c));
            for id in IdentityId::CONE_IDS {
                let r = verify_identity(id, &ctx, &cfg()).unwrap();
                assert!(r.passed, "{id} failed: {:?}", r.failures);
            }
        }
    }

    #[test]
    fn half_plane_fan() {
        let s = Space::euclidean(2);
        let c = Arc::new(Cone::from_halfspaces(&s, &[v(&[1, 0])], &[]).unwrap());
        let cells = vec![
            Arc::new(Cone::from_generators(&s, &[v(&[0, 1]), v(&[1, 1])], &[]).unwrap()),
            Arc::new(Cone::from_generators(&s, &[v(&[1, 1]), v(&[1, -1])], &[]).unwrap()),
            Arc::new(Cone::from_generators(&s, &[v(&[1, -1]), v(&[0, -1])], &[]).unwrap()),
        ];
        let ctx = IdentityContext { cone: Some(c.clone()), fan: Some(cells.clone()), ..Default::default() };
        let r = verify_identity(IdentityId::GammaFanRefinement, &ctx, &cfg()).unwrap();
        assert!(r.passed, "{:?}", r.failures);
        // overlapping cells are rejected as input
        let bad = vec![cells[0].clone(), Arc::new(Cone::from_generators(&s, &[v(&[0, 1]), v(&[0, -1]), v(&[1, 0])], &[]).unwrap())];
        assert!(matches!(validate_fan(&c, &bad), Err(Error::NotAFan(_))));
        // missing the lower cell
        assert!(validate_fan(&c, &cells[..2]).is_err());
    }

    #[test]
    fn wrong_identity_is_caught() {
        // a deliberately wrong sign must produce failures
        let s = Space::euclidean(1);
        let c = Arc::new(Cone::from_halfspaces(&s, &[v(&[1])], &[]).unwrap());
        let g = gamma(&c, &[q(1)]).unwrap();
        let checks = vec![Check::new("bogus", g.clone(), g.neg())];
        let r = run_checks("bogus", vec![], 0, &checks, &[vec![q(1)], vec![q(2)]]);
        assert!(!r.passed);
        assert_eq!(r.failure_count, 1);
    }
}
