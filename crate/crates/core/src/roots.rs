//! Type-A root data (`GL(n)` and products of `GL(n_i)`), semi-standard parabolics
//! as ordered set partitions, and their chamber cones.

use std::fmt;

use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{dot, Q};
use crate::cones::{Cone, Space, Subspace};
use crate::error::{Error, Result};
use crate::indicator::{gamma, Sampler};
use crate::linalg::{self, Matrix};

/// `GL(n_1) × … × GL(n_k)` acting on `a_0 = R^N`, `N = Σ n_i`, standard inner product.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RootDatum {
    blocks: Vec<usize>,
}

impl RootDatum {
    pub fn gl(n: usize) -> Self {
        RootDatum { blocks: vec![n] }
    }

    pub fn product(blocks: &[usize]) -> Result<Self> {
        if blocks.is_empty() || blocks.contains(&0) {
            return Err(Error::Input("root datum blocks must be positive".into()));
        }
        Ok(RootDatum { blocks: blocks.to_vec() })
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    /// `dim a_0`.
    pub fn rank(&self) -> usize {
        self.blocks.iter().sum()
    }

    pub fn space(&self) -> Space {
        Space::euclidean(self.rank())
    }

    /// Global 0-based index ranges of the `GL` factors.
    pub fn factor_ranges(&self) -> Vec<std::ops::Range<usize>> {
        let mut start = 0;
        self.blocks
            .iter()
            .map(|&b| {
                let r = start..start + b;
                start += b;
                r
            })
            .collect()
    }

    /// All roots `e_i − e_j`, `i ≠ j` in the same factor.
    pub fn roots(&self) -> Vec<Vec<Q>> {
        let n = self.rank();
        let mut out = Vec::new();
        for r in self.factor_ranges() {
            for i in r.clone() {
                for j in r.clone() {
                    if i != j {
                        let mut v = vec![Q::zero(); n];
                        v[i] = Q::one();
                        v[j] = -Q::one();
                        out.push(v);
                    }
                }
            }
        }
        out
    }

    /// All semi-standard parabolics, sorted by their nested-list serialization.
    pub fn parabolics(&self) -> Vec<Parabolic> {
        let mut acc: Vec<Vec<Vec<Vec<usize>>>> = vec![Vec::new()];
        for r in self.factor_ranges() {
            let parts = ordered_set_partitions(&r.collect::<Vec<_>>());
            acc = acc
                .into_iter()
                .flat_map(|prefix| {
                    parts.iter().map(move |p| {
                        let mut x = prefix.clone();
                        x.push(p.clone());
                        x
                    })
                })
                .collect();
        }
        let mut out: Vec<Parabolic> = acc.into_iter().map(|factors| Parabolic { n: self.rank(), factors }).collect();
        out.sort_by_key(|p| p.to_nested());
        out
    }

    /// `ℱ(P)`: the parabolics containing `p`.
    pub fn parabolics_containing(&self, p: &Parabolic) -> Vec<Parabolic> {
        self.parabolics().into_iter().filter(|q| p.is_contained_in(q)).collect()
    }

    /// `𝒫(A_0)`: the minimal (Borel) parabolics.
    pub fn borels(&self) -> Vec<Parabolic> {
        self.parabolics().into_iter().filter(|p| p.is_minimal()).collect()
    }

    /// Upper-triangular Borel: singletons in increasing order.
    pub fn standard_borel(&self) -> Parabolic {
        Parabolic {
            n: self.rank(),
            factors: self.factor_ranges().into_iter().map(|r| r.map(|i| vec![i]).collect()).collect(),
        }
    }

    /// `G` itself.
    pub fn whole(&self) -> Parabolic {
        Parabolic { n: self.rank(), factors: self.factor_ranges().into_iter().map(|r| vec![r.collect()]).collect() }
    }

    /// Parabolic from nested 1-based global indices, one ordered partition per factor.
    pub fn parabolic(&self, nested: &[Vec<Vec<usize>>]) -> Result<Parabolic> {
        let ranges = self.factor_ranges();
        if nested.len() != ranges.len() {
            return Err(Error::Dimension { expected: ranges.len(), got: nested.len() });
        }
        let mut factors = Vec::new();
        for (parts, r) in nested.iter().zip(&ranges) {
            let mut seen: Vec<usize> = Vec::new();
            let mut f = Vec::new();
            for part in parts {
                if part.is_empty() {
                    return Err(Error::Input("empty block in parabolic".into()));
                }
                let mut b: Vec<usize> = part.iter().map(|&i| i.wrapping_sub(1)).collect();
                b.sort_unstable();
                seen.extend(&b);
                f.push(b);
            }
            seen.sort_unstable();
            if seen != r.clone().collect::<Vec<_>>() {
                return Err(Error::Input(format!("blocks {parts:?} do not partition the factor")));
            }
            factors.push(f);
        }
        Ok(Parabolic { n: self.rank(), factors })
    }
}

fn ordered_set_partitions(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let k = items.len();
    // first block: any nonempty subset
    for mask in 1u32..(1 << k) {
        let first: Vec<usize> = (0..k).filter(|&i| mask >> i & 1 == 1).map(|i| items[i]).collect();
        let rest: Vec<usize> = (0..k).filter(|&i| mask >> i & 1 == 0).map(|i| items[i]).collect();
        for mut tail in ordered_set_partitions(&rest) {
            tail.insert(0, first.clone());
            out.push(tail);
        }
    }
    out
}

/// A semi-standard parabolic: per `GL` factor an ordered set partition of its indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Parabolic {
    n: usize,
    factors: Vec<Vec<Vec<usize>>>,
}

fn indicator(n: usize, b: &[usize]) -> Vec<Q> {
    let mut v = vec![Q::zero(); n];
    for &i in b {
        v[i] = Q::one();
    }
    v
}

impl Parabolic {
    pub fn factors(&self) -> &[Vec<Vec<usize>>] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    /// 1-based nested lists, the serialized form.
    pub fn to_nested(&self) -> Vec<Vec<Vec<usize>>> {
        self.factors.iter().map(|f| f.iter().map(|b| b.iter().map(|i| i + 1).collect()).collect()).collect()
    }

    /// All blocks in order (factor by factor).
    pub fn blocks(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.factors.iter().flatten()
    }

    pub fn is_minimal(&self) -> bool {
        self.blocks().all(|b| b.len() == 1)
    }

    pub fn is_whole(&self) -> bool {
        self.factors.iter().all(|f| f.len() == 1)
    }

    /// `self ⊆ q`: each block of `q` is a union of consecutive blocks of `self`.
    pub fn is_contained_in(&self, q: &Parabolic) -> bool {
        if self.n != q.n || self.factors.len() != q.factors.len() {
            return false;
        }
        self.factors.iter().zip(&q.factors).all(|(pf, qf)| {
            let mut it = pf.iter();
            qf.iter().all(|qb| {
                let mut acc: Vec<usize> = Vec::new();
                while acc.len() < qb.len() {
                    match it.next() {
                        Some(b) => acc.extend(b),
                        None => return false,
                    }
                }
                acc.sort_unstable();
                acc == *qb
            }) && it.next().is_none()
        })
    }

    /// `a_P`, spanned by the block indicators.
    pub fn a(&self) -> Subspace {
        let vs: Vec<Vec<Q>> = self.blocks().map(|b| indicator(self.n, b)).collect();
        Subspace::new(Space::euclidean(self.n), &vs)
    }

    /// `Δ_P`: for consecutive blocks `B, B'` of a factor, `1_B/|B| − 1_{B'}/|B'|`.
    pub fn simple_roots(&self) -> Vec<Vec<Q>> {
        self.simple_roots_tagged().into_iter().map(|(_, _, a)| a).collect()
    }

    fn simple_roots_tagged(&self) -> Vec<(usize, usize, Vec<Q>)> {
        let mut out = Vec::new();
        for (fi, f) in self.factors.iter().enumerate() {
            for k in 0..f.len().saturating_sub(1) {
                let a = linalg::scale(&indicator(self.n, &f[k]), &Q::new(1.into(), f[k].len().into()));
                let b = linalg::scale(&indicator(self.n, &f[k + 1]), &Q::new(1.into(), f[k + 1].len().into()));
                out.push((fi, k, linalg::sub(&a, &b)));
            }
        }
        out
    }

    fn check_in(&self, q: &Parabolic) -> Result<()> {
        if self.is_contained_in(q) {
            Ok(())
        } else {
            Err(Error::NotContained(self.to_string(), q.to_string()))
        }
    }

    /// `Δ_P^Q`: the simple roots of `P` vanishing on `a_Q`.
    pub fn simple_roots_in(&self, q: &Parabolic) -> Result<Vec<Vec<Q>>> {
        self.check_in(q)?;
        let aq = q.a();
        Ok(self
            .simple_roots()
            .into_iter()
            .filter(|a| aq.basis().iter().all(|b| dot(a, b).is_zero()))
            .collect())
    }

    /// `∆̂_P^Q ⊂ a_P^Q`, the basis dual to `Δ_P^Q`.
    pub fn coweights_in(&self, q: &Parabolic) -> Result<Vec<Vec<Q>>> {
        let roots = self.simple_roots_in(q)?;
        Ok(dual_basis(&roots))
    }

    /// `a_P^Q`, the orthogonal complement of `a_Q` in `a_P`.
    pub fn a_rel(&self, q: &Parabolic) -> Result<Subspace> {
        self.check_in(q)?;
        Ok(self.a().intersect(&q.a().orthogonal_complement()))
    }

    /// The closed chamber `ā_P^+`.
    pub fn chamber(&self) -> Cone {
        let s = Space::euclidean(self.n);
        Cone::from_covectors(&s, &self.simple_roots(), &self.a().annihilator()).expect("chamber cone")
    }

    /// `A(ā_Q^+, ā_P^+) = {H ∈ a_P : ⟨H, α⟩ ≥ 0, α ∈ Δ_P^Q}`.
    pub fn angle_chamber(&self, q: &Parabolic) -> Result<Cone> {
        let s = Space::euclidean(self.n);
        Cone::from_covectors(&s, &self.simple_roots_in(q)?, &self.a().annihilator())
    }

    /// `ρ_P`: on block `B_j` of a factor, `(Σ_{i>j}|B_i| − Σ_{i<j}|B_i|)/2`.
    pub fn rho(&self) -> Vec<Q> {
        let mut v = vec![Q::zero(); self.n];
        for f in &self.factors {
            let sizes: Vec<i64> = f.iter().map(|b| b.len() as i64).collect();
            for (j, b) in f.iter().enumerate() {
                let after: i64 = sizes[j + 1..].iter().sum();
                let before: i64 = sizes[..j].iter().sum();
                for &i in b {
                    v[i] = Q::new((after - before).into(), 2.into());
                }
            }
        }
        v
    }

    /// `dim N_P = Σ_{i<j} |B_i||B_j|` per factor.
    pub fn dim_nilradical(&self) -> usize {
        self.factors
            .iter()
            .map(|f| {
                let s: Vec<usize> = f.iter().map(|b| b.len()).collect();
                (0..s.len()).flat_map(|i| (i + 1..s.len()).map(move |j| (i, j))).map(|(i, j)| s[i] * s[j]).sum::<usize>()
            })
            .sum()
    }

    /// The Borel obtained by splitting every block into increasing singletons.
    pub fn minimal_refinement(&self) -> Parabolic {
        Parabolic {
            n: self.n,
            factors: self.factors.iter().map(|f| f.iter().flat_map(|b| b.iter().map(|&i| vec![i])).collect()).collect(),
        }
    }
}

impl fmt::Display for Parabolic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .to_nested()
            .iter()
            .map(|fac| {
                let bs: Vec<String> = fac
                    .iter()
                    .map(|b| format!("{{{}}}", b.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")))
                    .collect();
                format!("({})", bs.join(","))
            })
            .collect();
        write!(f, "{}", parts.join("×"))
    }
}

impl Serialize for Parabolic {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_nested().serialize(s)
    }
}

/// Basis dual to `vs` inside their span.
pub fn dual_basis(vs: &[Vec<Q>]) -> Vec<Vec<Q>> {
    if vs.is_empty() {
        return Vec::new();
    }
    let k = vs.len();
    let g = Matrix::from_rows(&vs.iter().map(|a| vs.iter().map(|b| dot(a, b)).collect()).collect::<Vec<_>>(), k);
    let inv = g.inverse().expect("independent simple roots");
    (0..k)
        .map(|i| {
            let mut w = vec![Q::zero(); vs[0].len()];
            for (l, v) in vs.iter().enumerate() {
                w = linalg::add(&w, &linalg::scale(v, inv.get(i, l)));
            }
            w
        })
        .collect()
}

/// `Γ̃_R^P(H, T) = Γ(A(ā_P^+, ā_R^+), H, T)`.
pub fn tilde_gamma(r: &Parabolic, p: &Parabolic, h: &[Q], t: &[Q]) -> Result<i64> {
    let c = r.angle_chamber(p)?;
    Ok(gamma(&c, t)?.eval_exact(h))
}

/// The four conditions describing `Γ̃_R^P(·, T)` for regular `T`.
pub fn tilde_gamma_conditions(r: &Parabolic, p: &Parabolic, h: &[Q], t: &[Q]) -> Result<bool> {
    let ap = p.a();
    let hp = ap.project(h);
    let tp = ap.project(t);
    let diff = linalg::sub(h, t);
    Ok(hp == tp
        && r.a().contains(h)
        && r.simple_roots_in(p)?.iter().all(|a| dot(a, h).is_positive())
        && r.coweights_in(p)?.iter().all(|w| !dot(w, &diff).is_positive()))
}

/// Per-part outcome of the basic chamber properties for all pairs `P ⊆ Q`.
#[derive(Clone, Debug, Serialize)]
pub struct BasicRootPropsReport {
    pub datum: Vec<usize>,
    pub pairs: usize,
    /// Failure descriptions for parts 1–4.
    pub failures: [Vec<String>; 4],
}

impl BasicRootPropsReport {
    pub fn passed(&self) -> bool {
        self.failures.iter().all(|f| f.is_empty())
    }
}

/// Exhaustive check over all `P ⊆ Q`: (1) distinct simple roots pair non-positively,
/// (2) coweights pair non-negatively, (3) `A ∩ a_P^Q ⊆ A^∨`, (4) the projection of
/// `a_P^+` onto `a_Q` lies in `a_Q^+`.
pub fn check_basic_root_props(datum: &RootDatum) -> Result<BasicRootPropsReport> {
    let ps = datum.parabolics();
    let mut rep = BasicRootPropsReport { datum: datum.blocks.clone(), pairs: 0, failures: Default::default() };
    for p in &ps {
        let cp = p.chamber();
        for q in ps.iter().filter(|q| p.is_contained_in(q)) {
            rep.pairs += 1;
            let tag = format!("{p} ⊆ {q}");
            let roots = p.simple_roots_in(q)?;
            for i in 0..roots.len() {
                for j in 0..roots.len() {
                    if i != j && dot(&roots[i], &roots[j]).is_positive() {
                        rep.failures[0].push(tag.clone());
                    }
                }
            }
            let ws = p.coweights_in(q)?;
            if ws.iter().any(|a| ws.iter().any(|b| dot(a, b).is_negative())) {
                rep.failures[1].push(tag.clone());
            }
            let ang = p.angle_chamber(q)?;
            let apq = Cone::subspace(ang.space(), p.a_rel(q)?.basis())?;
            if !ang.intersect(&apq)?.is_subset_of(&ang.dual()) {
                rep.failures[2].push(tag.clone());
            }
            let aq = q.a();
            let cq = q.chamber();
            let gens_ok = cp.rays().iter().chain(cp.lineality()).all(|r| cq.contains(&aq.project(r)))
                && cp.lineality().iter().all(|l| cq.contains(&linalg::neg(&aq.project(l))));
            if !gens_ok || !cq.rint_contains(&aq.project(&cp.rint_point())) {
                rep.failures[3].push(tag);
            }
        }
    }
    Ok(rep)
}

/// Outcome of a sampled implication check.
#[derive(Clone, Debug, Serialize)]
pub struct ImplicationReport {
    pub name: String,
    pub datum: Vec<usize>,
    /// Points at which the hypothesis held.
    pub tested: usize,
    pub failures: Vec<String>,
}

impl ImplicationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.tested > 0
    }
}

fn random_point(s: &mut Sampler, basis: &[Vec<Q>], n: usize, positive: bool) -> Vec<Q> {
    let mut v = vec![Q::zero(); n];
    for b in basis {
        let c = if positive { s.positive_small() } else { s.rational() };
        v = linalg::add(&v, &linalg::scale(b, &c));
    }
    v
}

/// For `P_0` minimal and `P ⊇ P_0`: lower bounds `C_1` on `∆̂_P` and `C_2` on
/// `∆̂_0^P` give `⟨ϖ, H⟩ ≥ C_2 − m|C_1|` on `∆̂_0 ∖ ∆̂_P`, with `m` read off the
/// decomposition `ϖ = ϖ̄ + ϖ'`.
pub fn check_coweight_lower_bound(datum: &RootDatum, samples: usize, seed: u64) -> Result<ImplicationReport> {
    let n = datum.rank();
    let g = datum.whole();
    let mut s = Sampler::new(seed, 10);
    let mut rep = ImplicationReport { name: "coweight_lower_bound".into(), datum: datum.blocks.clone(), tested: 0, failures: vec![] };
    let mut cases = Vec::new();
    for p0 in datum.borels() {
        let w0 = p0.coweights_in(&g)?;
        for p in datum.parabolics_containing(&p0) {
            let wp = p.coweights_in(&g)?;
            let wbar = p0.coweights_in(&p)?;
            let ap = p.a();
            let mut rest = Vec::new();
            let mut m = Q::zero();
            for w in w0.iter().filter(|w| !wp.contains(w)) {
                let wprime = ap.project(w);
                let coords = if wp.is_empty() {
                    Some(vec![])
                } else {
                    linalg::coordinates(&wp, &wprime)
                };
                let ok_bar = wbar.contains(&linalg::sub(w, &wprime));
                match coords {
                    Some(c) if ok_bar && c.iter().all(|x| !x.is_negative()) => {
                        m = m.max(c.iter().fold(Q::zero(), |a, b| a + b));
                        rest.push(w.clone());
                    }
                    _ => rep.failures.push(format!("{p0} ⊆ {p}: decomposition of {w:?}")),
                }
            }
            cases.push((wp, wbar, rest, m));
        }
    }
    let per = samples.div_ceil(cases.len().max(1)).max(1);
    for (wp, wbar, rest, m) in &cases {
        for _ in 0..per {
            let h = s.vector(n);
            // weakest admissible C1 (smallest |C1|) and the exact C2
            let c1 = wp.iter().map(|w| dot(w, &h)).min().unwrap_or_else(Q::zero).min(Q::zero());
            let c2 = wbar.iter().map(|w| dot(w, &h)).min().unwrap_or_else(Q::zero);
            rep.tested += 1;
            let bound = &c2 - m * c1.abs();
            if let Some(w) = rest.iter().find(|w| dot(w, &h) < bound) {
                if rep.failures.len() < 20 {
                    rep.failures.push(format!("H={h:?} ϖ={w:?}"));
                }
            }
        }
    }
    Ok(rep)
}

/// For `P ⊆ Q` and a minimal `P_0 ⊆ P`: `⟨α,H⟩ > 0` on `Δ_P^Q` and `⟨ϖ,H⟩ ≤ 0` on
/// `∆̂_0^P` imply `⟨α,H⟩ > 0` on `Δ_0^Q ∖ Δ_0^P`.
pub fn check_root_positivity_extension(datum: &RootDatum, samples: usize, seed: u64) -> Result<ImplicationReport> {
    let n = datum.rank();
    let mut s = Sampler::new(seed, 10);
    let mut rep = ImplicationReport { name: "root_positivity_extension".into(), datum: datum.blocks.clone(), tested: 0, failures: vec![] };
    let ps = datum.parabolics();
    let mut cases = Vec::new();
    for p in &ps {
        let p0 = p.minimal_refinement();
        for q in ps.iter().filter(|q| p.is_contained_in(q)) {
            cases.push((p.clone(), q.clone(), p0.clone()));
        }
    }
    let per = samples.div_ceil(cases.len()).max(1);
    for (p, q, p0) in &cases {
        let hyp_roots = p.simple_roots_in(q)?;
        let ws = p0.coweights_in(p)?;
        let d0p = p0.simple_roots_in(p)?;
        let concl: Vec<Vec<Q>> = p0.simple_roots_in(q)?.into_iter().filter(|a| !d0p.contains(a)).collect();
        let ang = p.angle_chamber(q)?;
        let lin = ang.lineality().to_vec();
        let mut done = 0;
        let mut tries = 0;
        while done < per && tries < 50 * per {
            tries += 1;
            let h = if s.rng().gen_bool(0.5) {
                s.vector(n)
            } else {
                // a_P part in rint A(ā_Q^+, ā_P^+), a_0^P part in −cone(Δ_0^P)
                let mut h = random_point(&mut s, ang.rays(), n, true);
                h = linalg::add(&h, &random_point(&mut s, &lin, n, false));
                linalg::sub(&h, &random_point(&mut s, &d0p, n, true))
            };
            let hyp = hyp_roots.iter().all(|a| dot(a, &h).is_positive()) && ws.iter().all(|w| !dot(w, &h).is_positive());
            if !hyp {
                continue;
            }
            done += 1;
            rep.tested += 1;
            if concl.iter().any(|a| !dot(a, &h).is_positive()) && rep.failures.len() < 20 {
                rep.failures.push(format!("{p} ⊆ {q}, H={h:?}"));
            }
        }
    }
    Ok(rep)
}

/// `Q ↦ ā_Q^+` from `ℱ(P)` to the faces of `ā_P^+` is bijective and order-reversing
/// (`Q ⊆ Q'` iff `ā_{Q'}^+ ⊆ ā_Q^+`).
pub fn check_face_poset(datum: &RootDatum, p: &Parabolic) -> Result<bool> {
    let c = p.chamber();
    let fp = datum.parabolics_containing(p);
    let faces = c.faces()?;
    if faces.len() != fp.len() {
        return Ok(false);
    }
    let mut idx = Vec::new();
    for qq in &fp {
        match c.face_index(&qq.chamber())? {
            Some(i) => idx.push(i),
            None => return Ok(false),
        }
    }
    let mut sorted = idx.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != idx.len() {
        return Ok(false);
    }
    for (a, qa) in fp.iter().enumerate() {
        for (b, qb) in fp.iter().enumerate() {
            let geo = faces[idx[b]].cone.is_subset_of(&faces[idx[a]].cone);
            if qa.is_contained_in(qb) != geo {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A regular `T ∈ a_0^+` for the Borel `p0` with small integer gaps.
pub fn regular_point(p0: &Parabolic, s: &mut Sampler) -> Vec<Q> {
    let mut t = vec![Q::zero(); p0.rank()];
    for f in p0.factors() {
        let mut x = s.rational();
        for b in f {
            t[b[0]] = x.clone();
            x -= s.positive_small();
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{q, qq};

    #[test]
    fn parabolic_counts() {
        assert_eq!(RootDatum::gl(2).parabolics().len(), 3);
        assert_eq!(RootDatum::gl(3).parabolics().len(), 13);
        assert_eq!(RootDatum::gl(4).parabolics().len(), 75);
        let d = RootDatum::product(&[2, 2]).unwrap();
        assert_eq!(d.parabolics().len(), 9);
        let g2 = RootDatum::gl(2);
        assert_eq!(g2.parabolics_containing(&g2.standard_borel()).len(), 2);
        assert_eq!(RootDatum::gl(3).borels().len(), 6);
    }

    #[test]
    fn rho_and_nilradical() {
        let g2 = RootDatum::gl(2);
        assert_eq!(g2.standard_borel().rho(), vec![qq(1, 2), qq(-1, 2)]);
        assert_eq!(g2.whole().rho(), vec![q(0), q(0)]);
        let g3 = RootDatum::gl(3);
        let p = g3.parabolic(&[vec![vec![1, 2], vec![3]]]).unwrap();
        assert_eq!(p.rho(), vec![qq(1, 2), qq(1, 2), q(-1)]);
        assert_eq!(p.dim_nilradical(), 2);
        assert_eq!(g2.standard_borel().dim_nilradical(), 1);
        assert_eq!(g3.whole().dim_nilradical(), 0);
    }

    #[test]
    fn containment_and_chambers() {
        let g3 = RootDatum::gl(3);
        let b = g3.standard_borel();
        let p = g3.parabolic(&[vec![vec![1, 2], vec![3]]]).unwrap();
        let bad = g3.parabolic(&[vec![vec![1, 3], vec![2]]]).unwrap();
        assert!(b.is_contained_in(&p));
        assert!(!b.is_contained_in(&bad));
        assert!(matches!(b.simple_roots_in(&bad), Err(Error::NotContained(..))));
        let c = g3.whole().chamber();
        assert!(c.is_subspace() && c.dim() == 1);
        let g2 = RootDatum::gl(2);
        let cb = g2.standard_borel().chamber();
        assert!(cb.contains(&[q(2), q(1)]) && !cb.contains(&[q(1), q(2)]));
        assert!(cb.is_full_dimensional());
    }

    #[test]
    fn dual_bases() {
        let g4 = RootDatum::gl(4);
        for p in g4.parabolics() {
            let r = p.simple_roots();
            let w = p.coweights_in(&g4.whole()).unwrap();
            for (i, a) in r.iter().enumerate() {
                for (j, x) in w.iter().enumerate() {
                    assert_eq!(dot(a, x), if i == j { q(1) } else { q(0) });
                }
            }
        }
    }

    #[test]
    fn rho_is_half_sum_of_positive_roots() {
        let g4 = RootDatum::gl(4);
        for p in g4.parabolics() {
            let mut sum = vec![q(0); 4];
            for f in p.factors() {
                for i in 0..f.len() {
                    for j in i + 1..f.len() {
                        for &a in &f[i] {
                            for &b in &f[j] {
                                sum[a] += qq(1, 2);
                                sum[b] -= qq(1, 2);
                            }
                        }
                    }
                }
            }
            assert_eq!(p.rho(), sum, "{p}");
            let block_of = |i: usize| p.blocks().position(|b| b.contains(&i)).unwrap();
            let positive = g4.roots().iter().filter(|r| {
                let a = r.iter().position(|x| x.is_positive()).unwrap();
                let b = r.iter().position(|x| x.is_negative()).unwrap();
                block_of(a) < block_of(b)
            }).count();
            assert_eq!(p.dim_nilradical(), positive, "{p}");
        }
    }

    #[test]
    fn basic_props_small_ranks() {
        for n in 1..=3 {
            let rep = check_basic_root_props(&RootDatum::gl(n)).unwrap();
            assert!(rep.passed(), "{rep:?}");
        }
        assert_eq!(check_basic_root_props(&RootDatum::gl(3)).unwrap().pairs, 1 * 6 * 4 + 6 * 2 + 1);
    }

    #[test]
    fn implications_gl3() {
        let g3 = RootDatum::gl(3);
        let r = check_coweight_lower_bound(&g3, 300, 3).unwrap();
        assert!(r.passed(), "{r:?}");
        let r = check_root_positivity_extension(&g3, 300, 3).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn face_poset_gl3() {
        let g3 = RootDatum::gl(3);
        for p in g3.parabolics() {
            assert!(check_face_poset(&g3, &p).unwrap(), "{p}");
        }
    }

    #[test]
    fn tilde_gamma_matches_conditions_gl2() {
        let g2 = RootDatum::gl(2);
        let b = g2.standard_borel();
        let g = g2.whole();
        let t = vec![q(1), q(-1)];
        for x in -5..=5 {
            for y in -5..=5 {
                let h = vec![qq(x, 2), qq(y, 2)];
                for (r, p) in [(&b, &g), (&b, &b), (&g, &g)] {
                    let v = tilde_gamma(r, p, &h, &t).unwrap();
                    assert_eq!(v == 1, tilde_gamma_conditions(r, p, &h, &t).unwrap(), "{r} {p} {h:?}");
                    assert!(v == 0 || v == 1);
                }
            }
        }
        assert!(tilde_gamma(&g, &b, &t, &t).is_err());
    }
}
