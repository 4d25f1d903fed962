//! Relative fans for an embedding `G' ⊂ G`: the cells `z_P^+ = a_P^+ ∩ a_0'` cut out
//! of the subgroup chamber by the ambient chambers.

use std::sync::Arc;

use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{dot, fmt_rational, RatString, RationalVector, Q};
use crate::cones::{angle_cone_of, eps, Cone, Space, Subspace};
use crate::error::{Error, Result};
use crate::indicator::identities::{norm_bound_check, projector, rejector, run_checks, Check, Failure, IdentityId, IdentityReport};
use crate::indicator::{gamma, gamma_support_certificate, sample_points, sigma_of, Cell, Sampler, SamplerConfig, SignedCellSum};
use crate::linalg::{self, Matrix};
use crate::roots::{Parabolic, RootDatum};

/// Names of the shipped embeddings.
pub const BUILTIN_CONFIGS: [&str; 5] =
    ["gl1_in_gl2_corner", "gl2_in_gl3_corner", "gl3_in_gl4_corner", "gl2_in_gl3_plane", "gl2_diag_in_gl2xgl2"];

/// `ι : a_0' → a_0` together with the two root data and the minimal parabolic `P_0'`.
#[derive(Clone, Debug)]
pub struct EmbeddingConfig {
    pub name: String,
    pub ambient: RootDatum,
    pub subgroup: RootDatum,
    /// `N × n` matrix, columns are the images of the basis of `a_0'`.
    pub iota: Matrix,
    /// Inner product on `a_0'`; equals `ιᵀι`.
    pub gram: Matrix,
    pub p0prime: Parabolic,
}

#[derive(Serialize, Deserialize)]
struct EmbeddingJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    ambient: Vec<usize>,
    subgroup: Vec<usize>,
    iota: Vec<Vec<RatString>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gram: Option<Vec<Vec<RatString>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p0prime: Option<Vec<Vec<Vec<usize>>>>,
}

fn int_rows(rows: &[&[i64]]) -> Vec<Vec<Q>> {
    rows.iter().map(|r| r.iter().map(|&x| Q::from_integer(x.into())).collect()).collect()
}

impl EmbeddingConfig {
    /// Validates injectivity and `ιᵀι = gram` (standard Gram when `None`).
    pub fn new(
        name: &str,
        ambient: RootDatum,
        subgroup: RootDatum,
        iota_rows: &[Vec<Q>],
        gram: Option<Matrix>,
        p0prime: Option<Parabolic>,
    ) -> Result<Self> {
        let big = ambient.rank();
        let n = subgroup.rank();
        if iota_rows.len() != big {
            return Err(Error::Dimension { expected: big, got: iota_rows.len() });
        }
        if let Some(r) = iota_rows.iter().find(|r| r.len() != n) {
            return Err(Error::Dimension { expected: n, got: r.len() });
        }
        let iota = Matrix::from_rows(iota_rows, n);
        if linalg::rank(iota_rows, n) != n {
            return Err(Error::NotIsometric("ι is not injective".into()));
        }
        let induced = iota.transpose().mul(&iota);
        let gram = gram.unwrap_or_else(|| Matrix::identity(n));
        if induced != gram {
            return Err(Error::NotIsometric(format!("ιᵀι = {induced:?} differs from the subgroup Gram matrix")));
        }
        let p0prime = p0prime.unwrap_or_else(|| subgroup.standard_borel());
        if !p0prime.is_minimal() || p0prime.rank() != n {
            return Err(Error::Input(format!("{p0prime} is not a minimal parabolic of the subgroup")));
        }
        Ok(EmbeddingConfig { name: name.to_string(), ambient, subgroup, iota, gram, p0prime })
    }

    pub fn builtin(name: &str) -> Result<Self> {
        let gl = RootDatum::gl;
        match name {
            "gl1_in_gl2_corner" => Self::new(name, gl(2), gl(1), &int_rows(&[&[1], &[0]]), None, None),
            "gl2_in_gl3_corner" => Self::new(name, gl(3), gl(2), &int_rows(&[&[1, 0], &[0, 1], &[0, 0]]), None, None),
            "gl3_in_gl4_corner" => Self::new(
                name,
                gl(4),
                gl(3),
                &int_rows(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]),
                None,
                None,
            ),
            "gl2_in_gl3_plane" => Self::new(name, gl(3), gl(2), &int_rows(&[&[1, 0], &[0, 0], &[0, 1]]), None, None),
            "gl2_diag_in_gl2xgl2" => {
                let two = Q::from_integer(2.into());
                let gram = Matrix::from_rows(&[vec![two.clone(), Q::zero()], vec![Q::zero(), two]], 2);
                Self::new(
                    name,
                    RootDatum::product(&[2, 2])?,
                    gl(2),
                    &int_rows(&[&[1, 0], &[0, 1], &[1, 0], &[0, 1]]),
                    Some(gram),
                    None,
                )
            }
            other => Err(Error::Unknown { kind: "embedding", name: other.to_string() }),
        }
    }

    /// JSON: `{"ambient": [n..], "subgroup": [n..], "iota": [[..]], "gram"?, "p0prime"?}`.
    pub fn from_json(s: &str) -> Result<Self> {
        let j: EmbeddingJson = serde_json::from_str(s)?;
        let ambient = RootDatum::product(&j.ambient)?;
        let subgroup = RootDatum::product(&j.subgroup)?;
        let rows: Vec<Vec<Q>> = j.iota.into_iter().map(|r| r.into_iter().map(|x| x.0).collect()).collect();
        let gram = j.gram.map(|g| {
            let rows: Vec<Vec<Q>> = g.into_iter().map(|r| r.into_iter().map(|x| x.0).collect()).collect();
            Matrix::from_rows(&rows, subgroup.rank())
        });
        let p0 = j.p0prime.map(|p| subgroup.parabolic(&p)).transpose()?;
        Self::new(j.name.as_deref().unwrap_or("custom"), ambient, subgroup, &rows, gram, p0)
    }

    pub fn to_json(&self) -> String {
        let rat = |m: &Matrix| m.row_vecs().into_iter().map(|r| r.into_iter().map(RatString).collect()).collect();
        let j = EmbeddingJson {
            name: Some(self.name.clone()),
            ambient: self.ambient.blocks().to_vec(),
            subgroup: self.subgroup.blocks().to_vec(),
            iota: rat(&self.iota),
            gram: Some(rat(&self.gram)),
            p0prime: Some(self.p0prime.to_nested()),
        };
        serde_json::to_string_pretty(&j).expect("serializable")
    }

    /// `a_0'` with its induced inner product.
    pub fn space(&self) -> Space {
        if self.gram.is_identity() {
            Space::euclidean(self.gram.rows)
        } else {
            Space::with_gram(self.gram.clone()).expect("ιᵀι is positive definite for injective ι")
        }
    }

    /// Covector `α` on `a_0` pulled back to `a_0'`.
    fn pull(&self, a: &[Q]) -> Vec<Q> {
        self.iota.tmul_vec(a)
    }

    /// `ι⁻¹(ā_P^+)` for an ambient parabolic.
    pub fn pulled_chamber(&self, p: &Parabolic) -> Result<Cone> {
        let ineqs: Vec<Vec<Q>> = p.simple_roots().iter().map(|a| self.pull(a)).collect();
        let eqs: Vec<Vec<Q>> = p.a().annihilator().iter().map(|a| self.pull(a)).collect();
        Cone::from_covectors(&self.space(), &ineqs, &eqs)
    }

    /// `ā_{P'}^+ ⊂ a_0'` for a subgroup parabolic.
    pub fn subgroup_chamber(&self, p: &Parabolic) -> Result<Cone> {
        Cone::from_covectors(&self.space(), &p.simple_roots(), &p.a().annihilator())
    }

    /// `a_1`: vectors constant on the coordinates that `ι` cannot tell apart.
    fn a1_constraints(&self) -> Vec<Vec<Q>> {
        let big = self.ambient.rank();
        let mut out = Vec::new();
        for r in self.ambient.factor_ranges() {
            for i in r.clone() {
                for j in i + 1..r.end {
                    if self.iota.row(i) == self.iota.row(j) {
                        let mut v = vec![Q::zero(); big];
                        v[i] = Q::one();
                        v[j] = -Q::one();
                        out.push(v);
                    }
                }
            }
        }
        out
    }
}

/// One cell `z_P^+` with its parabolic data.
#[derive(Clone, Debug)]
pub struct FanCell {
    pub parabolic: Parabolic,
    /// `P ∩ G'`.
    pub subgroup_parabolic: Parabolic,
    /// `z̄_P^+` in `a_0'`.
    pub cone: Arc<Cone>,
    /// `z_P^G`.
    pub z_rel: Subspace,
    /// `ε_P^G`.
    pub epsilon: i64,
    /// `ρ̲_P` as a vector of `a_0'`.
    pub rho: Vec<Q>,
    /// A rational point of `a_{P'}^+ ∩ a_P^+`.
    pub witness: Vec<Q>,
}

impl FanCell {
    pub fn id(&self) -> String {
        self.parabolic.to_string()
    }

    /// `z_P`.
    pub fn z(&self) -> &Subspace {
        self.cone.span()
    }

    pub fn is_maximal(&self) -> bool {
        self.z_rel.dim() == 1
    }
}

#[derive(Clone, Debug)]
pub struct RelativeFan {
    pub config: EmbeddingConfig,
    space: Space,
    cells: Vec<FanCell>,
    /// Ambient parabolics with a nonempty cell that fail the `a_P ⊆ a_1` reading
    /// or whose cell does not sit inside a single subgroup chamber.
    pub discrepancies: Vec<String>,
}

/// `ℱ^G(P_0')` with cells, enumerated over all semi-standard ambient parabolics.
pub fn build_relative_fan(config: &EmbeddingConfig) -> Result<RelativeFan> {
    let space = config.space();
    let sub_ps: Vec<(Parabolic, Cone)> = config
        .subgroup
        .parabolics()
        .into_iter()
        .map(|p| {
            let c = config.subgroup_chamber(&p)?;
            Ok((p, c))
        })
        .collect::<Result<_>>()?;
    let a1 = config.a1_constraints();
    let g = config.ambient.whole();
    let z_g = config.pulled_chamber(&g)?.span().clone();
    let found: Vec<Option<(FanCell, Vec<String>)>> = config
        .ambient
        .parabolics()
        .into_par_iter()
        .map(|p| -> Result<Option<(FanCell, Vec<String>)>> {
            let z = config.pulled_chamber(&p)?;
            let r = z.rint_point();
            if !p.chamber().rint_contains(&config.iota.mul_vec(&r)) {
                return Ok(None);
            }
            let Some((pp, pc)) = sub_ps.iter().find(|(_, c)| c.rint_contains(&r)) else {
                return Ok(None);
            };
            if !config.p0prime.is_contained_in(pp) {
                return Ok(None);
            }
            let mut notes = Vec::new();
            if !(z.is_subset_of(pc) && pc.rint_contains(&r)) {
                notes.push(format!("{p}: cell not inside the chamber of {pp}"));
            }
            if p.a().basis().iter().any(|b| a1.iter().any(|c| !dot(b, c).is_zero())) {
                notes.push(format!("{p}: nonempty cell but a_P ⊄ a_1"));
            }
            let z_rel = z.span().intersect(&z_g.orthogonal_complement());
            let rho = rho_underline_raw(config, &p, pp);
            let cell = FanCell {
                epsilon: eps(z_rel.dim(), 0),
                parabolic: p,
                subgroup_parabolic: pp.clone(),
                cone: Arc::new(z),
                z_rel,
                rho,
                witness: r,
            };
            Ok(Some((cell, notes)))
        })
        .collect::<Result<_>>()?;
    let mut cells = Vec::new();
    let mut discrepancies = Vec::new();
    for (c, notes) in found.into_iter().flatten() {
        cells.push(c);
        discrepancies.extend(notes);
    }
    if cells.is_empty() {
        return Err(Error::EmptyFan);
    }
    Ok(RelativeFan { config: config.clone(), space, cells, discrepancies })
}

fn rho_underline_raw(config: &EmbeddingConfig, p: &Parabolic, pp: &Parabolic) -> Vec<Q> {
    let two = Q::from_integer(2.into());
    let cov = linalg::sub(&config.pull(&p.rho()), &linalg::scale(&pp.rho(), &two));
    config.space().raise(&cov)
}

/// Parabolic data for the constant `c_Q^{G'}`.
#[derive(Clone, Debug, Serialize)]
pub struct CCoefficient {
    pub cell: String,
    #[serde(serialize_with = "ser_q")]
    pub value: Q,
    /// `ρ_{Q'} = c·ρ_Q` on all of `z_Q`.
    pub projection_identity: bool,
    pub abelian: bool,
    #[serde(serialize_with = "ser_opt_q")]
    pub dimension_ratio: Option<Q>,
}

impl CCoefficient {
    pub fn consistent(&self) -> bool {
        self.projection_identity && self.dimension_ratio.as_ref().map_or(true, |r| *r == self.value)
    }
}

fn ser_q<S: serde::Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rational(x))
}

fn ser_opt_q<S: serde::Serializer>(x: &Option<Q>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_str(&fmt_rational(v)),
        None => s.serialize_none(),
    }
}

/// The relative indicator functions on `a_0'`.
#[derive(Clone, Debug)]
pub enum RelativeKind {
    Tau,
    TauHat,
    /// `Γ_P^Q(·, X)`.
    Gamma(Vec<Q>),
    Sigma,
}

/// Outcome of the partition checks for the cells of the closed subgroup chamber.
#[derive(Clone, Debug, Serialize)]
pub struct PartitionReport {
    pub config: String,
    pub cells: usize,
    pub pairs_checked: usize,
    pub overlaps: Vec<String>,
    pub samples: usize,
    pub coverage_failures: Vec<String>,
    pub witness_failures: Vec<String>,
    pub face_failures: Vec<String>,
}

impl PartitionReport {
    pub fn passed(&self) -> bool {
        self.overlaps.is_empty()
            && self.coverage_failures.is_empty()
            && self.witness_failures.is_empty()
            && self.face_failures.is_empty()
    }
}

impl RelativeFan {
    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn cells(&self) -> &[FanCell] {
        &self.cells
    }

    pub fn cell(&self, p: &Parabolic) -> Result<&FanCell> {
        self.cells.iter().find(|c| c.parabolic == *p).ok_or_else(|| Error::UnknownCell(p.to_string()))
    }

    /// Look up a cell by its display id or its nested-list JSON form.
    pub fn cell_by_id(&self, id: &str) -> Result<&FanCell> {
        let id = id.trim();
        if let Some(c) = self.cells.iter().find(|c| c.id() == id) {
            return Ok(c);
        }
        if let Ok(nested) = serde_json::from_str::<Vec<Vec<Vec<usize>>>>(id) {
            if let Ok(p) = self.config.ambient.parabolic(&nested) {
                return self.cell(&p);
            }
        }
        Err(Error::UnknownCell(id.to_string()))
    }

    /// Cells whose relative interior lies in `a_{P'}^+`.
    pub fn cells_over(&self, pp: &Parabolic) -> Vec<&FanCell> {
        self.cells.iter().filter(|c| c.subgroup_parabolic == *pp).collect()
    }

    /// `ā_{P_0'}^+`.
    pub fn base_chamber(&self) -> Cone {
        self.config.subgroup_chamber(&self.config.p0prime).expect("subgroup chamber")
    }

    pub fn whole(&self) -> &FanCell {
        self.cell(&self.config.ambient.whole()).expect("G is always a cell")
    }

    /// All closed cells `z̄_P^+`.
    pub fn closed_cells(&self) -> Vec<Arc<Cone>> {
        self.cells.iter().map(|c| c.cone.clone()).collect()
    }

    /// Closed cells of full dimension.
    pub fn top_cells(&self) -> Vec<Arc<Cone>> {
        let d = self.base_chamber().dim();
        self.cells.iter().filter(|c| c.cone.dim() == d).map(|c| c.cone.clone()).collect()
    }

    pub fn maximal_cells(&self) -> Vec<&FanCell> {
        self.cells.iter().filter(|c| c.is_maximal()).collect()
    }

    /// Ordered pairs `P ⊆ Q` of cells (indices).
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, p) in self.cells.iter().enumerate() {
            for (j, q) in self.cells.iter().enumerate() {
                if p.parabolic.is_contained_in(&q.parabolic) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// `A(z̄_Q^+, z̄_P^+)`.
    pub fn angle(&self, p: &Parabolic, q: &Parabolic) -> Result<Arc<Cone>> {
        if !p.is_contained_in(q) {
            return Err(Error::NotContained(p.to_string(), q.to_string()));
        }
        let (cp, cq) = (self.cell(p)?, self.cell(q)?);
        Ok(Arc::new(angle_cone_of(&cp.cone, &cq.cone)?))
    }

    /// `ρ̲_P`, the projection of `ρ_P − 2ρ_{P'}` to `a_0'`.
    pub fn rho_underline(&self, p: &Parabolic) -> Result<RationalVector> {
        Ok(RationalVector(self.cell(p)?.rho.clone()))
    }

    /// `c_Q^{G'}` for a cell with `dim z_Q^G = 1`.
    pub fn c_coefficient(&self, q: &Parabolic) -> Result<CCoefficient> {
        let cell = self.cell(q)?;
        if !cell.is_maximal() {
            return Err(Error::NotMaximal(q.to_string()));
        }
        let rho_q = self.config.pull(&q.rho());
        let rho_qp = cell.subgroup_parabolic.rho();
        let w = &cell.z_rel.basis()[0];
        let den = dot(&rho_q, w);
        if den.is_zero() {
            return Err(Error::Input(format!("ρ_Q vanishes on z_Q^G for {q}")));
        }
        let value = dot(&rho_qp, w) / den;
        let projection_identity =
            cell.z().basis().iter().all(|z| dot(&rho_qp, z) == &value * dot(&rho_q, z));
        let abelian = q.factors().iter().all(|f| f.len() <= 2);
        let dimension_ratio = (abelian && q.dim_nilradical() > 0).then(|| {
            Q::new(cell.subgroup_parabolic.dim_nilradical().into(), q.dim_nilradical().into())
        });
        Ok(CCoefficient { cell: q.to_string(), value, projection_identity, abelian, dimension_ratio })
    }

    /// `τ_P^Q`, `τ̂_P^Q`, `Γ_P^Q(·, X)` or `σ_P^Q` on `a_0'`.
    pub fn relative_indicator(&self, p: &Parabolic, q: &Parabolic, kind: &RelativeKind) -> Result<SignedCellSum> {
        let a = self.angle(p, q)?;
        let n = self.dim();
        Ok(match kind {
            RelativeKind::Tau => SignedCellSum::cell(n, Cell::rint(a)),
            RelativeKind::TauHat => SignedCellSum::cell(n, Cell::rint(a.dual_arc())),
            RelativeKind::Gamma(x) => gamma(&a, x)?,
            RelativeKind::Sigma => sigma_of(&self.cell(p)?.cone, &self.cell(q)?.cone)?,
        })
    }

    /// Disjointness, coverage of `ā_{P_0'}^+`, witnesses and the face bijection.
    pub fn check_partition(&self, samples: usize, seed: u64) -> Result<PartitionReport> {
        let mut rep = PartitionReport {
            config: self.config.name.clone(),
            cells: self.cells.len(),
            pairs_checked: 0,
            overlaps: Vec::new(),
            samples: 0,
            coverage_failures: Vec::new(),
            witness_failures: Vec::new(),
            face_failures: Vec::new(),
        };
        for i in 0..self.cells.len() {
            for j in i + 1..self.cells.len() {
                rep.pairs_checked += 1;
                let (a, b) = (&self.cells[i].cone, &self.cells[j].cone);
                let x = a.intersect(b)?;
                let r = x.rint_point();
                if a.rint_contains(&r) && b.rint_contains(&r) {
                    rep.overlaps.push(format!("{} ∩ {}", self.cells[i].id(), self.cells[j].id()));
                }
            }
        }
        for c in &self.cells {
            let ok = self.config.subgroup_chamber(&c.subgroup_parabolic)?.rint_contains(&c.witness)
                && c.parabolic.chamber().rint_contains(&self.config.iota.mul_vec(&c.witness));
            if !ok {
                rep.witness_failures.push(c.id());
            }
        }
        rep.face_failures = self.face_bijection_failures()?;
        let base = self.base_chamber();
        let sub_ps: Vec<(Parabolic, Cone)> = self
            .config
            .subgroup
            .parabolics()
            .into_iter()
            .map(|p| {
                let c = self.config.subgroup_chamber(&p)?;
                Ok((p, c))
            })
            .collect::<Result<_>>()?;
        let mut s = Sampler::new(seed, 12);
        let n = self.dim();
        let points: Vec<Vec<Q>> = (0..samples)
            .map(|_| {
                let mut h = vec![Q::zero(); n];
                for r in base.rays() {
                    if s.rng().gen_range(0..3) > 0 {
                        h = linalg::add(&h, &linalg::scale(r, &s.positive_small()));
                    }
                }
                for l in base.lineality() {
                    if s.rng().gen_range(0..3) > 0 {
                        h = linalg::add(&h, &linalg::scale(l, &s.small()));
                    }
                }
                h
            })
            .collect();
        rep.samples = points.len();
        let fails: Vec<String> = points
            .par_iter()
            .filter_map(|h| {
                let hits: Vec<&FanCell> = self.cells.iter().filter(|c| c.cone.rint_contains(h)).collect();
                let pp = sub_ps.iter().find(|(_, c)| c.rint_contains(h)).map(|(p, _)| p);
                let good = hits.len() == 1 && pp == Some(&hits[0].subgroup_parabolic);
                (!good).then(|| format!("{} lies in {} cells", RationalVector(h.clone()), hits.len()))
            })
            .collect();
        rep.coverage_failures = fails.into_iter().take(20).collect();
        Ok(rep)
    }

    /// `Q ↦ z̄_Q^+` is an order-reversing bijection onto the faces of `z̄_P^+`, and
    /// `z̄_P^+` is not a subspace for `P ≠ G`.
    pub fn face_bijection_failures(&self) -> Result<Vec<String>> {
        let mut out = Vec::new();
        for c in &self.cells {
            let above: Vec<&FanCell> =
                self.cells.iter().filter(|q| c.parabolic.is_contained_in(&q.parabolic)).collect();
            let faces = c.cone.faces()?;
            let mut idx = Vec::new();
            for q in &above {
                match c.cone.face_index(&q.cone)? {
                    Some(i) => idx.push(i),
                    None => out.push(format!("{} is not a face of {}", q.id(), c.id())),
                }
            }
            let mut u = idx.clone();
            u.sort_unstable();
            u.dedup();
            if u.len() != idx.len() || u.len() != faces.len() {
                out.push(format!("{}: {} parabolics above, {} faces", c.id(), above.len(), faces.len()));
            }
            for a in &above {
                for b in &above {
                    if a.parabolic.is_contained_in(&b.parabolic) != b.cone.is_subset_of(&a.cone) {
                        out.push(format!("{}: order mismatch between {} and {}", c.id(), a.id(), b.id()));
                    }
                }
            }
            if !c.parabolic.is_whole() && c.cone.is_subspace() {
                out.push(format!("{} is a linear subspace", c.id()));
            }
        }
        Ok(out)
    }

    fn sample_context(&self, cfg: &SamplerConfig) -> Result<(Vec<Vec<Q>>, Vec<Vec<Q>>, Vec<Vec<Q>>)> {
        let n = self.dim();
        let base = self.base_chamber();
        let mut s = Sampler::new(cfg.seed ^ 0x7e1a, cfg.max_coord.min(6));
        let mut pool: Vec<Vec<Q>> = Vec::new();
        let mut fixed: Vec<Vec<Q>> = vec![vec![Q::zero(); n]];
        for c in &self.cells {
            pool.extend(c.cone.rays().iter().cloned());
            pool.extend(c.cone.lineality().iter().cloned());
            pool.extend(c.cone.dual().rays().iter().cloned());
            fixed.push(c.cone.rint_point());
        }
        let mut inner = base.rint_point();
        for l in base.lineality() {
            inner = linalg::add(&inner, &linalg::scale(l, &s.small()));
        }
        let xs = vec![s.vector(n), inner, s.structured(n, &pool, &[])];
        for x in &xs {
            for c in &self.cells {
                let p = c.cone.rint_point();
                fixed.push(linalg::add(x, &p));
                let px = c.z().project(x);
                fixed.push(px.clone());
                pool.push(px.clone());
                pool.push(linalg::sub(x, &px));
            }
            fixed.push(x.clone());
        }
        pool.retain(|v| !linalg::is_zero_vec(v));
        pool.sort();
        pool.dedup();
        Ok((pool, fixed, xs))
    }
}

/// Relative cone identities over all pairs `P ⊆ Q` of cells.
pub fn verify_relative(id: IdentityId, fan: &RelativeFan, cfg: &SamplerConfig) -> Result<IdentityReport> {
    let n = fan.dim();
    let zero = vec![Q::zero(); n];
    let (pool, fixed, xs) = fan.sample_context(cfg)?;
    let cells = fan.cells();
    let pairs = fan.pairs();
    let angle = |i: usize, j: usize| fan.angle(&cells[i].parabolic, &cells[j].parabolic);
    let between = |i: usize, j: usize| -> Vec<usize> {
        (0..cells.len())
            .filter(|&r| {
                cells[i].parabolic.is_contained_in(&cells[r].parabolic)
                    && cells[r].parabolic.is_contained_in(&cells[j].parabolic)
            })
            .collect()
    };
    let label = |i: usize, j: usize| format!("{} ⊆ {}", cells[i].id(), cells[j].id());
    let mut checks = Vec::new();
    match id {
        IdentityId::RelativeGammaSupport => {
            for &(i, j) in &pairs {
                let a = angle(i, j)?;
                for x in &xs {
                    let g = Arc::new(gamma(&a, x)?);
                    let ball = gamma_support_certificate(&a, x)?;
                    let f: Arc<dyn Fn(&crate::indicator::SamplePoint, &[Q]) -> i64 + Send + Sync> =
                        Arc::new(move |p, h| i64::from(g.eval_point(p) != 0 && !ball.contains(h)));
                    checks.push(Check {
                        label: format!("{} X={}", label(i, j), RationalVector(x.clone())),
                        lhs: crate::indicator::identities::Side::Func(f),
                        rhs: crate::indicator::identities::Side::constant(n, 0),
                    });
                }
            }
        }
        IdentityId::RelativeTauExpansion => {
            for &(i, j) in &pairs {
                let lhs = SignedCellSum::cell(n, Cell::rint(angle(i, j)?));
                for x in &xs {
                    let mut rhs = SignedCellSum::zero(n);
                    for r in between(i, j) {
                        let rc = &cells[r].cone;
                        let (pr, rj) = (projector(rc), rejector(rc));
                        let g = gamma(&*angle(i, r)?, &rj.mul_vec(x))?.pullback(&rj, &zero);
                        let t = SignedCellSum::cell(n, Cell::rint(angle(r, j)?).pullback(&pr, &pr.mul_vec(x)));
                        rhs = rhs.add(&g.mul(&t));
                    }
                    checks.push(Check::new(format!("{} X={}", label(i, j), RationalVector(x.clone())), lhs.clone(), rhs));
                }
            }
        }
        IdentityId::RelativeTauHatExpansion => {
            for &(i, j) in &pairs {
                let dual = angle(i, j)?.dual_arc();
                for x in &xs {
                    let lhs = SignedCellSum::cell(n, Cell::shifted(dual.clone(), x));
                    let mut rhs = SignedCellSum::zero(n);
                    for r in between(i, j) {
                        let rc = &cells[r].cone;
                        let (pr, rj) = (projector(rc), rejector(rc));
                        let e = eps(rc.dim(), cells[j].cone.dim());
                        let th = SignedCellSum::cell(n, Cell::rint(angle(i, r)?.dual_arc()).pullback(&rj, &zero));
                        let g = gamma(&*angle(r, j)?, &pr.mul_vec(x))?.pullback(&pr, &zero);
                        rhs = rhs.add(&th.mul(&g).scale(e));
                    }
                    checks.push(Check::new(format!("{} X={}", label(i, j), RationalVector(x.clone())), lhs, rhs));
                }
            }
        }
        IdentityId::RelativeHtauTauSigma => {
            let g = cells.iter().position(|c| c.parabolic.is_whole()).ok_or(Error::EmptyFan)?;
            for &(i, j) in &pairs {
                let th = SignedCellSum::cell(n, Cell::rint(angle(j, g)?.dual_arc()));
                let lhs = th.mul(&SignedCellSum::cell(n, Cell::rint(angle(i, j)?)));
                let mut rhs = SignedCellSum::zero(n);
                for r in between(i, g).into_iter().filter(|&r| cells[j].parabolic.is_contained_in(&cells[r].parabolic)) {
                    rhs = rhs.add(&sigma_of(&cells[i].cone, &cells[r].cone)?);
                }
                checks.push(Check::new(label(i, j), lhs, rhs));
            }
        }
        IdentityId::RelativeSigmaSupport => {
            for &(i, j) in &pairs {
                let s = sigma_of(&cells[i].cone, &cells[j].cone)?;
                let inside = SignedCellSum::cell(n, Cell::rint(angle(i, j)?));
                checks.push(Check::new(label(i, j), s.sub(&s.mul(&inside)), SignedCellSum::zero(n)));
            }
        }
        IdentityId::RelativeSigmaNormBound => {
            let first = sample_points(n, &fixed, &pool, &xs, cfg);
            let cfg2 = SamplerConfig { samples: 2 * cfg.samples, ..cfg.clone() };
            let doubled = sample_points(n, &fixed, &pool, &xs, &cfg2);
            let mut failures: Vec<Failure> = Vec::new();
            let mut details = Vec::new();
            for &(i, j) in &pairs {
                let s = sigma_of(&cells[i].cone, &cells[j].cone)?;
                let more = |m: usize| sample_points(n, &fixed, &pool, &xs, &SamplerConfig { samples: m, ..cfg.clone() });
                let (fail, detail) = norm_bound_check(&label(i, j), &s, &cells[j].cone, &first, &doubled, &more);
                details.push(detail);
                failures.extend(fail);
            }
            let failure_count = failures.len();
            return Ok(IdentityReport {
                id: id.name().to_string(),
                cones: vec![fan.config.name.clone()],
                seed: cfg.seed,
                samples: doubled.len(),
                checks: pairs.len(),
                failure_count,
                failures,
                details,
                passed: failure_count == 0,
                elapsed_ms: None,
            });
        }
        other => return Err(Error::Input(format!("{other} is not a relative identity"))),
    }
    let points = sample_points(n, &fixed, &pool, &xs, cfg);
    Ok(run_checks(id.name(), vec![fan.config.name.clone()], cfg.seed, &checks, &points))
}

/// The relative identities in registry order.
pub const RELATIVE_IDS: [IdentityId; 6] = [
    IdentityId::RelativeGammaSupport,
    IdentityId::RelativeTauExpansion,
    IdentityId::RelativeTauHatExpansion,
    IdentityId::RelativeHtauTauSigma,
    IdentityId::RelativeSigmaSupport,
    IdentityId::RelativeSigmaNormBound,
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{q, qq};

    fn fan(name: &str) -> RelativeFan {
        build_relative_fan(&EmbeddingConfig::builtin(name).unwrap()).unwrap()
    }

    #[test]
    fn cell_counts() {
        let f = fan("gl1_in_gl2_corner");
        assert_eq!(f.cells().len(), 3);
        let f = fan("gl2_in_gl3_corner");
        assert_eq!(f.cells().len(), 8);
        assert_eq!(f.top_cells().len(), 3);
        assert_eq!(fan("gl2_in_gl3_plane").top_cells().len(), 3);
        for name in BUILTIN_CONFIGS {
            assert!(fan(name).discrepancies.is_empty(), "{name}");
        }
    }

    #[test]
    fn rho_and_c() {
        let f = fan("gl1_in_gl2_corner");
        let b = f.config.ambient.standard_borel();
        assert_eq!(f.rho_underline(&b).unwrap().0, vec![qq(1, 2)]);
        assert_eq!(f.rho_underline(&f.config.ambient.whole()).unwrap().0, vec![q(0)]);
        let c = f.c_coefficient(&b).unwrap();
        assert_eq!(c.value, q(0));
        assert!(c.consistent());
        let d = fan("gl2_diag_in_gl2xgl2");
        let bb = d.config.ambient.standard_borel();
        let c = d.c_coefficient(&bb).unwrap();
        assert_eq!(c.value, qq(1, 2));
        assert!(c.consistent());
        // (1 − 2c)·ρ vanishes, and so does ρ̲
        assert_eq!(d.rho_underline(&bb).unwrap().0, vec![q(0), q(0)]);
        let g = fan("gl2_in_gl3_corner");
        let p = g.config.ambient.parabolic(&[vec![vec![1, 2], vec![3]]]).unwrap();
        let c = g.c_coefficient(&p).unwrap();
        assert_eq!(c.value, q(0));
        assert!(c.abelian && c.consistent());
        assert!(matches!(g.c_coefficient(&g.config.ambient.standard_borel()), Err(Error::NotMaximal(_))));
    }

    #[test]
    fn isometry_is_enforced() {
        let rows = int_rows(&[&[1, 0], &[0, 1], &[1, 0], &[0, 1]]);
        let r = EmbeddingConfig::new("x", RootDatum::product(&[2, 2]).unwrap(), RootDatum::gl(2), &rows, None, None);
        assert!(matches!(r, Err(Error::NotIsometric(_))));
        let c = EmbeddingConfig::builtin("gl2_diag_in_gl2xgl2").unwrap();
        let back = EmbeddingConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(back.iota, c.iota);
    }

    #[test]
    fn diagonal_members_are_swap_stable() {
        let f = fan("gl2_diag_in_gl2xgl2");
        for c in f.cells() {
            let nested = c.parabolic.to_nested();
            let shifted: Vec<Vec<usize>> = nested[1].iter().map(|b| b.iter().map(|i| i - 2).collect()).collect();
            assert_eq!(nested[0], shifted, "{}", c.id());
        }
        assert_eq!(f.cells().len(), 2);
    }

    #[test]
    fn partitions_hold() {
        for name in ["gl1_in_gl2_corner", "gl2_in_gl3_corner", "gl2_diag_in_gl2xgl2"] {
            let r = fan(name).check_partition(500, 1).unwrap();
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn one_dimensional_indicators() {
        let f = fan("gl1_in_gl2_corner");
        let b = f.config.ambient.standard_borel();
        let g = f.config.ambient.whole();
        let tau = f.relative_indicator(&b, &g, &RelativeKind::Tau).unwrap();
        let th = f.relative_indicator(&b, &g, &RelativeKind::TauHat).unwrap();
        for (x, want) in [(q(1), 1), (q(0), 0), (q(-2), 0)] {
            assert_eq!(tau.eval(&[x.clone()]), want);
            assert_eq!(th.eval(&[x]), want);
        }
        let s = f.relative_indicator(&b, &b, &RelativeKind::Sigma).unwrap();
        assert_eq!(s.eval(&[q(3)]), 0);
    }
}
