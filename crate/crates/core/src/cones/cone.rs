//! Polyhedral cones with both representations kept in a canonical form.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_traits::{Signed, Zero};
use once_cell::sync::OnceCell;

use super::faces::{Face, FaceData};
use super::space::{Space, Subspace};
use crate::arith::{dot, primitive, Q};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

#[derive(Clone, Debug, PartialEq, Eq)]
struct BitSet(Vec<u64>);

impl BitSet {
    fn new(n: usize) -> Self {
        BitSet(vec![0; n.div_ceil(64).max(1)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, o: &BitSet) -> BitSet {
        BitSet(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn subset_of(&self, o: &BitSet) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & !b == 0)
    }
}

/// Double description: lineality basis and extreme rays (modulo lineality) of
/// `{x : e·x = 0 (e ∈ eqs), a·x ≥ 0 (a ∈ ineqs)}`.
pub(crate) fn double_description(n: usize, eqs: &[Vec<Q>], ineqs: &[Vec<Q>]) -> (Vec<Vec<Q>>, Vec<Vec<Q>>) {
    let mut lin = linalg::nullspace(eqs, n);
    let mut rays: Vec<(Vec<Q>, BitSet)> = Vec::new();
    let m = ineqs.len();
    for (k, a) in ineqs.iter().enumerate() {
        if let Some(bi) = lin.iter().position(|b| !dot(a, b).is_zero()) {
            let mut b = lin.remove(bi);
            let mut ab = dot(a, &b);
            if ab.is_negative() {
                b = linalg::neg(&b);
                ab = -ab;
            }
            for l in lin.iter_mut() {
                let c = dot(a, l) / &ab;
                if !c.is_zero() {
                    *l = primitive(&linalg::lincomb(&Q::from_integer(1.into()), l, &-c, &b));
                }
            }
            for (r, z) in rays.iter_mut() {
                let c = dot(a, r) / &ab;
                if !c.is_zero() {
                    *r = primitive(&linalg::lincomb(&Q::from_integer(1.into()), r, &-c, &b));
                }
                z.set(k);
            }
            // b is tight on every earlier inequality since it was a lineality direction
            let mut zb = BitSet::new(m);
            for j in 0..k {
                zb.set(j);
            }
            rays.push((primitive(&b), zb));
            continue;
        }
        let vals: Vec<Q> = rays.iter().map(|(r, _)| dot(a, r)).collect();
        if vals.iter().all(|v| !v.is_negative()) {
            for ((_, z), v) in rays.iter_mut().zip(&vals) {
                if v.is_zero() {
                    z.set(k);
                }
            }
            continue;
        }
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();
        let mut new_rays: Vec<(Vec<Q>, BitSet)> = Vec::new();
        for &p in &pos {
            for &qi in &neg {
                let common = rays[p].1.and(&rays[qi].1);
                let adjacent = !(0..rays.len())
                    .any(|r| r != p && r != qi && common.subset_of(&rays[r].1));
                if adjacent {
                    let v = linalg::lincomb(&vals[p], &rays[qi].0, &-vals[qi].clone(), &rays[p].0);
                    let mut z = common;
                    z.set(k);
                    new_rays.push((primitive(&v), z));
                }
            }
        }
        let mut kept: Vec<(Vec<Q>, BitSet)> = Vec::new();
        for (i, (r, mut z)) in rays.into_iter().enumerate() {
            if vals[i].is_negative() {
                continue;
            }
            if vals[i].is_zero() {
                z.set(k);
            }
            kept.push((r, z));
        }
        kept.extend(new_rays);
        rays = kept;
    }
    (lin, rays.into_iter().map(|(r, _)| r).collect())
}

/// A polyhedral cone. Constructed once, immutable afterwards.
///
/// Inequalities are stored as covectors `a` meaning `a·x ≥ 0`; the facet normal
/// `n` with `⟨n, x⟩ = a·x` on `V_C` is the canonical identifier of a facet.
pub struct Cone {
    space: Space,
    equalities: Vec<Vec<Q>>,
    facets: Vec<Vec<Q>>,
    normals: Vec<Vec<Q>>,
    lineality: Vec<Vec<Q>>,
    rays: Vec<Vec<Q>>,
    /// `incidence[i][j]`: facet i is tight on ray j.
    incidence: Vec<Vec<bool>>,
    dim: usize,
    span: OnceCell<Subspace>,
    lin_space: OnceCell<Subspace>,
    faces: OnceCell<Vec<Face>>,
    face_data: OnceCell<Vec<FaceData>>,
    dual_cache: OnceCell<Arc<Cone>>,
}

impl Clone for Cone {
    fn clone(&self) -> Self {
        Cone {
            space: self.space.clone(),
            equalities: self.equalities.clone(),
            facets: self.facets.clone(),
            normals: self.normals.clone(),
            lineality: self.lineality.clone(),
            rays: self.rays.clone(),
            incidence: self.incidence.clone(),
            dim: self.dim,
            span: self.span.clone(),
            lin_space: self.lin_space.clone(),
            faces: OnceCell::new(),
            face_data: OnceCell::new(),
            dual_cache: OnceCell::new(),
        }
    }
}

impl fmt::Debug for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Cone")
            .field("ambient", &self.space.dim())
            .field("dim", &self.dim)
            .field("equalities", &fmt_vecs(&self.equalities))
            .field("facets", &fmt_vecs(&self.normals))
            .field("lineality", &fmt_vecs(&self.lineality))
            .field("rays", &fmt_vecs(&self.rays))
            .finish()
    }
}

fn fmt_vecs(v: &[Vec<Q>]) -> Vec<String> {
    v.iter()
        .map(|x| crate::arith::RationalVector(x.clone()).to_string())
        .collect()
}

impl PartialEq for Cone {
    fn eq(&self, o: &Self) -> bool {
        self.space == o.space && self.equalities == o.equalities && self.normals == o.normals
    }
}
impl Eq for Cone {}

impl Hash for Cone {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.space.dim().hash(state);
        self.equalities.hash(state);
        self.normals.hash(state);
    }
}

impl PartialOrd for Cone {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Cone {
    fn cmp(&self, o: &Self) -> Ordering {
        (self.space.dim(), self.dim, &self.equalities, &self.normals)
            .cmp(&(o.space.dim(), o.dim, &o.equalities, &o.normals))
    }
}

impl Cone {
    /// `{x : e·x = 0, a·x ≥ 0}` from covectors.
    pub fn from_covectors(space: &Space, ineqs: &[Vec<Q>], eqs: &[Vec<Q>]) -> Result<Cone> {
        for v in ineqs.iter().chain(eqs) {
            space.check(v)?;
        }
        let (lin, rays) = double_description(space.dim(), eqs, ineqs);
        Ok(Self::finish(space, lin, rays, ineqs))
    }

    /// `{x : ⟨e, x⟩ = 0, ⟨n, x⟩ ≥ 0}` from normal vectors (half-spaces).
    pub fn from_halfspaces(space: &Space, normals: &[Vec<Q>], eq_normals: &[Vec<Q>]) -> Result<Cone> {
        let a: Vec<Vec<Q>> = normals.iter().map(|n| space.lower(n)).collect();
        let e: Vec<Vec<Q>> = eq_normals.iter().map(|n| space.lower(n)).collect();
        Self::from_covectors(space, &a, &e)
    }

    /// Conic hull of `rays` plus the linear span of `lineality`.
    pub fn from_generators(space: &Space, rays: &[Vec<Q>], lineality: &[Vec<Q>]) -> Result<Cone> {
        for v in rays.iter().chain(lineality) {
            space.check(v)?;
        }
        // the standard dual {a : a·r ≥ 0, a·l = 0} yields candidate inequalities
        let (dlin, drays) = double_description(space.dim(), lineality, rays);
        Self::from_covectors(space, &drays, &dlin)
    }

    pub fn zero(space: &Space) -> Cone {
        Self::from_generators(space, &[], &[]).expect("zero cone")
    }

    pub fn full(space: &Space) -> Cone {
        Self::from_covectors(space, &[], &[]).expect("full space")
    }

    pub fn subspace(space: &Space, basis: &[Vec<Q>]) -> Result<Cone> {
        Self::from_generators(space, &[], basis)
    }

    /// Canonical form from a lineality basis, extreme rays and inequality candidates
    /// that contain every facet.
    fn finish(space: &Space, lin: Vec<Vec<Q>>, rays: Vec<Vec<Q>>, candidates: &[Vec<Q>]) -> Cone {
        let n = space.dim();
        let lineality = linalg::rref(&lin, n).0;
        let lin_sub = Subspace::new(space.clone(), &lineality);
        let mut rs: Vec<Vec<Q>> = rays
            .iter()
            .map(|r| primitive(&lin_sub.reject(r)))
            .filter(|r| !linalg::is_zero_vec(r))
            .collect();
        rs.sort();
        rs.dedup();
        let mut all = lineality.clone();
        all.extend(rs.iter().cloned());
        let span_basis = linalg::rref(&all, n).0;
        let dim = span_basis.len();
        let equalities = linalg::rref(&linalg::nullspace(&span_basis, n), n).0;
        let span = Subspace::new(space.clone(), &span_basis);

        let mut facets: Vec<(Vec<Q>, Vec<Q>, Vec<bool>)> = Vec::new();
        for a in candidates {
            let tight: Vec<bool> = rs.iter().map(|r| dot(a, r).is_zero()).collect();
            if tight.iter().all(|&t| t) {
                continue;
            }
            let mut gens = lineality.clone();
            gens.extend(rs.iter().zip(&tight).filter(|(_, &t)| t).map(|(r, _)| r.clone()));
            if linalg::rank(&gens, n) + 1 != dim {
                continue;
            }
            let normal = primitive(&span.project(&space.raise(a)));
            if facets.iter().any(|(nn, _, _)| *nn == normal) {
                continue;
            }
            let cov = space.lower(&normal);
            facets.push((normal, cov, tight));
        }
        facets.sort_by(|x, y| x.0.cmp(&y.0));
        let normals = facets.iter().map(|f| f.0.clone()).collect();
        let covs = facets.iter().map(|f| f.1.clone()).collect();
        let incidence = facets.into_iter().map(|f| f.2).collect();
        let c = Cone {
            space: space.clone(),
            equalities,
            facets: covs,
            normals,
            lineality,
            rays: rs,
            incidence,
            dim,
            span: OnceCell::new(),
            lin_space: OnceCell::new(),
            faces: OnceCell::new(),
            face_data: OnceCell::new(),
            dual_cache: OnceCell::new(),
        };
        let _ = c.span.set(span);
        let _ = c.lin_space.set(lin_sub);
        c
    }

    /// Face of `self` cut out by the facets in `active` (given the tight rays).
    pub(crate) fn face_cone(&self, ray_mask: &[bool]) -> Cone {
        let rays: Vec<Vec<Q>> = self
            .rays
            .iter()
            .zip(ray_mask)
            .filter(|(_, &m)| m)
            .map(|(r, _)| r.clone())
            .collect();
        Self::finish(&self.space, self.lineality.clone(), rays, &self.facets)
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn ambient_dim(&self) -> usize {
        self.space.dim()
    }

    /// `dim V_C`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lineality_dim(&self) -> usize {
        self.lineality.len()
    }

    /// Equality covectors (RREF basis of the annihilator of `V_C`).
    pub fn equalities(&self) -> &[Vec<Q>] {
        &self.equalities
    }

    /// Irredundant non-implicit inequality covectors, in canonical order.
    pub fn facets(&self) -> &[Vec<Q>] {
        &self.facets
    }

    /// Facet normals in `V_C` (primitive), in canonical order.
    pub fn facet_normals(&self) -> &[Vec<Q>] {
        &self.normals
    }

    pub fn lineality(&self) -> &[Vec<Q>] {
        &self.lineality
    }

    /// Extreme rays, projected onto the orthogonal complement of the lineality.
    pub fn rays(&self) -> &[Vec<Q>] {
        &self.rays
    }

    pub fn incidence(&self) -> &[Vec<bool>] {
        &self.incidence
    }

    /// `V_C`.
    pub fn span(&self) -> &Subspace {
        self.span.get_or_init(|| {
            let mut all = self.lineality.clone();
            all.extend(self.rays.iter().cloned());
            Subspace::new(self.space.clone(), &all)
        })
    }

    /// `V_{F_0}`, the lineality space.
    pub fn lineality_space(&self) -> &Subspace {
        self.lin_space
            .get_or_init(|| Subspace::new(self.space.clone(), &self.lineality))
    }

    /// `V_C ∩ V^{F_0}`, spanned by the projected rays.
    pub fn pointed_span(&self) -> Subspace {
        Subspace::new(self.space.clone(), &self.rays)
    }

    pub fn is_subspace(&self) -> bool {
        self.rays.is_empty()
    }

    pub fn is_pointed(&self) -> bool {
        self.lineality.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.dim == 0
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.dim == self.space.dim()
    }

    /// `ε_C = (−1)^{dim V_C}`.
    pub fn sign(&self) -> i64 {
        if self.dim % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn contains(&self, h: &[Q]) -> bool {
        self.equalities.iter().all(|e| dot(e, h).is_zero())
            && self.facets.iter().all(|a| !dot(a, h).is_negative())
    }

    /// Relative interior membership: `h ∈ V_C` and every facet strict.
    pub fn rint_contains(&self, h: &[Q]) -> bool {
        self.equalities.iter().all(|e| dot(e, h).is_zero())
            && self.facets.iter().all(|a| dot(a, h).is_positive())
    }

    /// A point of `rint C`: the sum of the extreme rays.
    pub fn rint_point(&self) -> Vec<Q> {
        let mut p = self.space.zero_vector();
        for r in &self.rays {
            p = linalg::add(&p, r);
        }
        p
    }

    /// `C^∨ = {X : ⟨X, C⟩ ≥ 0}` for the space's inner product.
    pub fn dual(&self) -> Cone {
        let ineqs: Vec<Vec<Q>> = self.rays.iter().map(|r| self.space.lower(r)).collect();
        let eqs: Vec<Vec<Q>> = self.lineality.iter().map(|l| self.space.lower(l)).collect();
        Self::from_covectors(&self.space, &ineqs, &eqs).expect("dual of a valid cone")
    }

    /// Cached `C^∨`.
    pub fn dual_arc(&self) -> Arc<Cone> {
        self.dual_cache.get_or_init(|| Arc::new(self.dual())).clone()
    }

    /// Faces with their angle cones and duals, in `faces()` order.
    pub fn face_data(&self) -> Result<&[FaceData]> {
        self.face_data
            .get_or_try_init(|| super::faces::face_data(self))
            .map(|v| v.as_slice())
    }

    pub fn intersect(&self, o: &Cone) -> Result<Cone> {
        if self.space != o.space {
            return Err(Error::Input("intersection of cones in different spaces".into()));
        }
        let mut ineqs = self.facets.clone();
        ineqs.extend(o.facets.iter().cloned());
        let mut eqs = self.equalities.clone();
        eqs.extend(o.equalities.iter().cloned());
        Self::from_covectors(&self.space, &ineqs, &eqs)
    }

    /// `{x ∈ target : M x ∈ self}` for a linear map `M : target → self.space`.
    pub fn preimage(&self, m: &Matrix, target: &Space) -> Result<Cone> {
        if m.rows != self.space.dim() || m.cols != target.dim() {
            return Err(Error::Dimension { expected: self.space.dim(), got: m.rows });
        }
        let ineqs: Vec<Vec<Q>> = self.facets.iter().map(|a| m.tmul_vec(a)).collect();
        let eqs: Vec<Vec<Q>> = self.equalities.iter().map(|a| m.tmul_vec(a)).collect();
        Self::from_covectors(target, &ineqs, &eqs)
    }

    /// Same point set viewed in another space of equal dimension (e.g. a different Gram).
    pub fn with_space(&self, space: &Space) -> Result<Cone> {
        space.check(&self.space.zero_vector())?;
        Self::from_covectors(space, &self.facets, &self.equalities)
    }

    /// `C − C` set inclusion in both directions is equality; this checks `self ⊆ o`.
    pub fn is_subset_of(&self, o: &Cone) -> bool {
        self.lineality.iter().all(|l| o.contains(l) && o.contains(&linalg::neg(l)))
            && self.rays.iter().all(|r| o.contains(r))
    }

    pub fn faces(&self) -> Result<&[Face]> {
        self.faces
            .get_or_try_init(|| super::faces::enumerate(self))
            .map(|v| v.as_slice())
    }

    /// Index in `faces()` of the face equal to `f`, if `f` is a face.
    pub fn face_index(&self, f: &Cone) -> Result<Option<usize>> {
        Ok(self.faces()?.iter().position(|x| *x.cone == *f))
    }

    /// `F_0`, the minimal face.
    pub fn minimal_face(&self) -> Cone {
        Self::subspace(&self.space, &self.lineality).expect("lineality subspace")
    }

    /// Round-trip check between the two representations.
    pub fn validate(&self) -> bool {
        let n = self.space.dim();
        let gens_ok = self.lineality.iter().all(|l| {
            self.facets.iter().all(|a| dot(a, l).is_zero())
                && self.equalities.iter().all(|e| dot(e, l).is_zero())
        }) && self.rays.iter().all(|r| self.contains(r));
        let again = Self::from_generators(&self.space, &self.rays, &self.lineality);
        gens_ok && again.map(|c| c == *self).unwrap_or(false) && linalg::rank(&self.equalities, n) + self.dim == n
    }
}

impl fmt::Display for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "cone(dim {} in R^{}, {} facets, {} rays, lineality {})",
            self.dim,
            self.space.dim(),
            self.facets.len(),
            self.rays.len(),
            self.lineality.len()
        )
    }
}

pub type ConeRef = Arc<Cone>;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{q, qq};

    fn v(x: &[i64]) -> Vec<Q> {
        x.iter().map(|&a| q(a)).collect()
    }

    fn quadrant() -> Cone {
        Cone::from_halfspaces(&Space::euclidean(2), &[v(&[1, 0]), v(&[0, 1])], &[]).unwrap()
    }

    fn half_plane() -> Cone {
        Cone::from_halfspaces(&Space::euclidean(2), &[v(&[1, 0])], &[]).unwrap()
    }

    #[test]
    fn quadrant_is_self_dual() {
        let c = quadrant();
        assert_eq!(c.rays(), &[v(&[0, 1]), v(&[1, 0])]);
        assert_eq!(c.dual(), c);
        assert!(c.validate());
    }

    #[test]
    fn half_plane_dual_is_ray() {
        let c = half_plane();
        assert_eq!(c.lineality_dim(), 1);
        let d = c.dual();
        let ray = Cone::from_generators(&Space::euclidean(2), &[v(&[1, 0])], &[]).unwrap();
        assert_eq!(d, ray);
        assert_eq!(d.dual(), c);
    }

    #[test]
    fn zero_dual_is_full() {
        let s = Space::euclidean(2);
        assert_eq!(Cone::zero(&s).dual(), Cone::full(&s));
        assert_eq!(Cone::full(&s).dual(), Cone::zero(&s));
    }

    #[test]
    fn rint_examples() {
        let c = quadrant();
        assert!(c.rint_contains(&v(&[1, 1])));
        assert!(!c.rint_contains(&v(&[1, 0])));
        let line = Cone::subspace(&Space::euclidean(2), &[v(&[1, 0])]).unwrap();
        assert!(line.rint_contains(&v(&[5, 0])));
        let h = half_plane();
        assert!(!h.rint_contains(&v(&[0, 3])));
        assert!(h.rint_contains(&[qq(1, 7), q(-4)]));
    }

    #[test]
    fn redundant_and_implicit_inequalities() {
        let s = Space::euclidean(3);
        // x ≥ 0, y ≥ 0, x + y ≥ 0 (redundant), z ≥ 0, −z ≥ 0 (implicit equality)
        let c = Cone::from_halfspaces(
            &s,
            &[v(&[1, 0, 0]), v(&[0, 1, 0]), v(&[1, 1, 0]), v(&[0, 0, 1]), v(&[0, 0, -1])],
            &[],
        )
        .unwrap();
        assert_eq!(c.dim(), 2);
        assert_eq!(c.facets().len(), 2);
        assert_eq!(c.equalities().len(), 1);
        let g = Cone::from_generators(&s, &[v(&[1, 0, 0]), v(&[0, 1, 0]), v(&[1, 1, 0])], &[]).unwrap();
        assert_eq!(c, g);
    }

    #[test]
    fn dual_with_gram() {
        let g = Matrix::from_rows(&[v(&[2, 1]), v(&[1, 2])], 2);
        let s = Space::with_gram(g).unwrap();
        let c = Cone::from_generators(&s, &[v(&[1, 0]), v(&[0, 1])], &[]).unwrap();
        let d = c.dual();
        for r in c.rays() {
            for x in d.rays() {
                assert!(!s.inner(r, x).is_negative());
            }
        }
        assert_eq!(d.dual(), c);
    }

    #[test]
    fn nonsimplicial_3d() {
        let s = Space::euclidean(3);
        let rays = [v(&[1, 0, 1]), v(&[0, 1, 1]), v(&[-1, 0, 1]), v(&[0, -1, 1])];
        let c = Cone::from_generators(&s, &rays, &[]).unwrap();
        assert_eq!(c.rays().len(), 4);
        assert_eq!(c.facets().len(), 4);
        assert!(c.validate());
        assert_eq!(c.dual().dual(), c);
    }
}
