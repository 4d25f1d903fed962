//! Sums of terms `e^{⟨λ, L·T + v⟩} · N(λ, T) / Π ⟨λ, u_i⟩^{m_i}`.
//!
//! Internally the variables are the covector coordinates `μ = Gλ`, so that
//! `⟨λ, u⟩ = μ·u` and `∂/∂μ_j e^{⟨λ,H⟩} = H_j e^{⟨λ,H⟩}`. For the standard inner
//! product `μ = λ`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::poly::{canonical_form, Poly};
use super::polyexp::PolyExp;
use super::scalar::ExactScalar;
use crate::arith::{cdot, cq, fmt_rational, CQ, Q};
use crate::cones::Space;
use crate::error::{Error, Result};

/// Default cap on the degree of the polynomial weight.
pub const DEGREE_CAP: u32 = 6;

/// Shared data of a group of terms: exponent and denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct TermKey {
    /// `v` in the exponent.
    pub shift: Vec<Q>,
    /// `L` in the exponent, as `n` rows of length `m`; empty when `m = 0`.
    pub t_map: Vec<Vec<Q>>,
    /// Canonical forms `u_i` with multiplicities.
    pub denominators: Vec<(Vec<Q>, u32)>,
}

impl TermKey {
    fn exponent_key(&self) -> (Vec<Q>, Vec<Vec<Q>>) {
        (self.shift.clone(), self.t_map.clone())
    }

    fn has_t(&self) -> bool {
        self.t_map.iter().flatten().any(|x| !x.is_zero())
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct MeromorphicTransform {
    space: Space,
    tvars: usize,
    terms: BTreeMap<TermKey, Poly<ExactScalar>>,
}

fn zero_map(n: usize, m: usize) -> Vec<Vec<Q>> {
    if m == 0 {
        Vec::new()
    } else {
        vec![vec![Q::zero(); m]; n]
    }
}

fn merge_dens(a: &[(Vec<Q>, u32)], b: &[(Vec<Q>, u32)]) -> Vec<(Vec<Q>, u32)> {
    let mut m: BTreeMap<Vec<Q>, u32> = a.iter().cloned().collect();
    for (u, k) in b {
        *m.entry(u.clone()).or_insert(0) += k;
    }
    m.into_iter().collect()
}

impl MeromorphicTransform {
    pub fn zero(space: &Space, tvars: usize) -> Self {
        MeromorphicTransform { space: space.clone(), tvars, terms: BTreeMap::new() }
    }

    pub fn constant(space: &Space, tvars: usize, c: ExactScalar) -> Self {
        Self::simple(space, tvars, c, &[])
    }

    /// `c / Π ⟨λ, u_i⟩`.
    pub fn simple(space: &Space, tvars: usize, c: ExactScalar, dens: &[Vec<Q>]) -> Self {
        let n = space.dim();
        let mut coef = c;
        let mut m: BTreeMap<Vec<Q>, u32> = BTreeMap::new();
        for u in dens {
            let (v, s) = canonical_form(u);
            coef = coef.div_cq(&cq(s, Q::zero()));
            *m.entry(v).or_insert(0) += 1;
        }
        let key = TermKey { shift: vec![Q::zero(); n], t_map: zero_map(n, tvars), denominators: m.into_iter().collect() };
        let mut out = Self::zero(space, tvars);
        out.insert(key, Poly::constant(n + tvars, coef));
        out
    }

    fn insert(&mut self, key: TermKey, p: Poly<ExactScalar>) {
        if p.is_zero() {
            return;
        }
        let e = self.terms.entry(key.clone()).or_insert_with(|| Poly::zero(p.nvars()));
        *e = e.add(&p);
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Number of symbolic `T` variables.
    pub fn tvars(&self) -> usize {
        self.tvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, &Poly<ExactScalar>)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn same_shape(&self, o: &Self) {
        assert_eq!(self.space.dim(), o.space.dim(), "transform dimension");
        assert_eq!(self.tvars, o.tvars, "transform T arity");
    }

    pub fn add(&self, o: &Self) -> Self {
        self.same_shape(o);
        let mut out = self.clone();
        for (k, p) in &o.terms {
            out.insert(k.clone(), p.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&ExactScalar::from_q(-Q::one()))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &ExactScalar) -> Self {
        let mut out = Self::zero(&self.space, self.tvars);
        for (k, p) in &self.terms {
            out.insert(k.clone(), p.scale(c));
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.same_shape(o);
        let mut out = Self::zero(&self.space, self.tvars);
        for (k1, p1) in &self.terms {
            for (k2, p2) in &o.terms {
                let key = TermKey {
                    shift: crate::linalg::add(&k1.shift, &k2.shift),
                    t_map: k1.t_map.iter().zip(&k2.t_map).map(|(a, b)| crate::linalg::add(a, b)).collect(),
                    denominators: merge_dens(&k1.denominators, &k2.denominators),
                };
                out.insert(key, p1.mul(p2));
            }
        }
        out
    }

    /// Multiply by `e^{⟨λ, L·T + v⟩}`; `l` is `n × m` (rows), ignored when empty.
    pub fn exp_shift(&self, v: &[Q], l: &[Vec<Q>]) -> Self {
        let mut out = Self::zero(&self.space, self.tvars);
        for (k, p) in &self.terms {
            let mut key = k.clone();
            key.shift = crate::linalg::add(&key.shift, v);
            if !l.is_empty() {
                key.t_map = key.t_map.iter().zip(l).map(|(a, b)| crate::linalg::add(a, b)).collect();
            }
            out.insert(key, p.clone());
        }
        out
    }

    /// `∂/∂μ_j`.
    pub fn derivative(&self, j: usize) -> Self {
        let n = self.dim();
        let nv = n + self.tvars;
        let mut out = Self::zero(&self.space, self.tvars);
        for (k, p) in &self.terms {
            // exponent factor (L T + v)_j
            let mut lin = Poly::constant(nv, ExactScalar::from_q(k.shift[j].clone()));
            if self.tvars > 0 {
                for (t, c) in k.t_map[j].iter().enumerate() {
                    if !c.is_zero() {
                        lin = lin.add(&Poly::var(nv, n + t).scale(&ExactScalar::from_q(c.clone())));
                    }
                }
            }
            out.insert(k.clone(), lin.mul(p).add(&p.derivative(j)));
            for (i, (u, m)) in k.denominators.iter().enumerate() {
                if u[j].is_zero() {
                    continue;
                }
                let mut key = k.clone();
                key.denominators[i].1 += 1;
                let c = ExactScalar::from_q(-Q::from_integer((*m).into()) * &u[j]);
                out.insert(key, p.scale(&c));
            }
        }
        out
    }

    /// `q(∂/∂μ)` applied to `self`; `q` is a polynomial in `n` variables.
    pub fn apply_poly(&self, q: &Poly<Q>, cap: u32) -> Result<Self> {
        let n = self.dim();
        if q.nvars() != n {
            return Err(Error::Dimension { expected: n, got: q.nvars() });
        }
        if q.degree() > cap {
            return Err(Error::DegreeCap(q.degree(), cap));
        }
        let mut cache: BTreeMap<Vec<u32>, Self> = BTreeMap::new();
        cache.insert(vec![0; n], self.clone());
        let mut out = Self::zero(&self.space, self.tvars);
        let mut exps: Vec<&Vec<u32>> = q.terms().map(|(e, _)| e).collect();
        exps.sort_by_key(|e| e.iter().sum::<u32>());
        for e in exps {
            let d = self.partial(e, &mut cache);
            out = out.add(&d.scale(&ExactScalar::from_q(q.coefficient(e))));
        }
        Ok(out)
    }

    fn partial(&self, e: &[u32], cache: &mut BTreeMap<Vec<u32>, Self>) -> Self {
        if let Some(x) = cache.get(e) {
            return x.clone();
        }
        let j = e.iter().position(|&k| k > 0).expect("nonzero exponent");
        let mut prev = e.to_vec();
        prev[j] -= 1;
        let d = self.partial(&prev, cache).derivative(j);
        cache.insert(e.to_vec(), d.clone());
        d
    }

    /// `μ = Gλ`.
    pub fn covector(&self, lambda: &[CQ]) -> Result<Vec<CQ>> {
        let n = self.dim();
        if lambda.len() != n {
            return Err(Error::Dimension { expected: n, got: lambda.len() });
        }
        let g = self.space.gram_matrix();
        Ok((0..n).map(|i| cdot(lambda, &g.row(i))).collect())
    }

    fn denominator_value(mu: &[CQ], dens: &[(Vec<Q>, u32)]) -> Result<CQ> {
        let mut d = cq(Q::one(), Q::zero());
        for (u, m) in dens {
            let x = cdot(mu, u);
            if x.re.is_zero() && x.im.is_zero() {
                return Err(Error::Pole(format!("<λ, {}> = 0", fmt_vec(u))));
            }
            for _ in 0..*m {
                d = d * x.clone();
            }
        }
        Ok(d)
    }

    /// Value at `λ`, with the `T` variables set to `t` (required when `tvars > 0`).
    pub fn eval(&self, lambda: &[CQ], t: Option<&[Q]>) -> Result<ExactScalar> {
        let mu = self.covector(lambda)?;
        let tv: Vec<Q> = match (self.tvars, t) {
            (0, _) => Vec::new(),
            (m, Some(t)) if t.len() == m => t.to_vec(),
            (m, Some(t)) => return Err(Error::Dimension { expected: m, got: t.len() }),
            (_, None) => return Err(Error::Input("a value for T is required".into())),
        };
        let mut vals: Vec<ExactScalar> = mu.iter().map(|x| ExactScalar::from_cq(x.clone())).collect();
        vals.extend(tv.iter().map(|x| ExactScalar::from_q(x.clone())));
        let mut total = ExactScalar::zero();
        for (k, p) in &self.terms {
            let d = Self::denominator_value(&mu, &k.denominators)?;
            let mut shift = k.shift.clone();
            for (i, row) in k.t_map.iter().enumerate() {
                shift[i] += crate::arith::dot(row, &tv);
            }
            let e = ExactScalar::exp(&cdot(&mu, &shift));
            total = total + (&e * &p.eval(&vals)).div_cq(&d);
        }
        Ok(total)
    }

    /// As a polynomial-exponential function of the symbolic `T` at a fixed `λ`.
    pub fn to_polyexp(&self, lambda: &[CQ]) -> Result<PolyExp> {
        let mu = self.covector(lambda)?;
        let m = self.tvars;
        let vals: Vec<ExactScalar> = mu.iter().map(|x| ExactScalar::from_cq(x.clone())).collect();
        let mut out = PolyExp::zero(m);
        for (k, p) in &self.terms {
            let d = Self::denominator_value(&mu, &k.denominators)?;
            let kappa: Vec<CQ> = (0..m)
                .map(|t| {
                    let col: Vec<Q> = k.t_map.iter().map(|r| r[t].clone()).collect();
                    cdot(&mu, &col)
                })
                .collect();
            let c = ExactScalar::exp(&cdot(&mu, &k.shift)).div_cq(&d);
            out.add_part(&kappa, &p.partial_eval(&vals).scale(&c));
        }
        Ok(out)
    }

    /// Terms without `T` in the exponent (symbolic purely polynomial part).
    pub fn t_free_part(&self) -> Self {
        let mut out = Self::zero(&self.space, self.tvars);
        for (k, p) in &self.terms {
            if !k.has_t() {
                out.insert(k.clone(), p.clone());
            }
        }
        out
    }

    /// Drop the `T` variables (evaluating them at 0) and return a transform without `T`.
    pub fn without_t(&self) -> Self {
        let n = self.dim();
        let mut out = Self::zero(&self.space, 0);
        for (k, p) in &self.terms {
            let key = TermKey { shift: k.shift.clone(), t_map: Vec::new(), denominators: k.denominators.clone() };
            let mut r = Poly::zero(n);
            for (e, c) in p.terms() {
                if e[n..].iter().all(|&x| x == 0) {
                    r.add_term(e[..n].to_vec(), c.clone());
                }
            }
            out.insert(key, r);
        }
        out
    }

    /// Common-denominator form per exponent: `(numerator, denominator forms)`.
    pub fn normalize(&self) -> BTreeMap<(Vec<Q>, Vec<Vec<Q>>), (Poly<ExactScalar>, Vec<(Vec<Q>, u32)>)> {
        let nv = self.dim() + self.tvars;
        let mut groups: BTreeMap<(Vec<Q>, Vec<Vec<Q>>), Vec<(&TermKey, &Poly<ExactScalar>)>> = BTreeMap::new();
        for (k, p) in &self.terms {
            groups.entry(k.exponent_key()).or_default().push((k, p));
        }
        let mut out = BTreeMap::new();
        for (ek, ts) in groups {
            let mut lcm: BTreeMap<Vec<Q>, u32> = BTreeMap::new();
            for (k, _) in &ts {
                for (u, m) in &k.denominators {
                    let e = lcm.entry(u.clone()).or_insert(0);
                    *e = (*e).max(*m);
                }
            }
            let mut num = Poly::zero(nv);
            for (k, p) in ts {
                let have: BTreeMap<&Vec<Q>, u32> = k.denominators.iter().map(|(u, m)| (u, *m)).collect();
                let mut f = p.clone();
                for (u, m) in &lcm {
                    let missing = m - have.get(u).copied().unwrap_or(0);
                    if missing > 0 {
                        let mut lin = Poly::linear(u);
                        lin = lin.extend(self.tvars);
                        f = f.mul(&lin.pow(missing));
                    }
                }
                num = num.add(&f);
            }
            if !num.is_zero() {
                out.insert(ek, (num, lcm.into_iter().collect()));
            }
        }
        out
    }

    /// Symbolic zero test after normalization.
    pub fn is_identically_zero(&self) -> bool {
        self.normalize().is_empty()
    }

    /// Symbolic equality.
    pub fn equals(&self, o: &Self) -> bool {
        self.sub(o).is_identically_zero()
    }

    fn var_names(&self) -> Vec<String> {
        let mut v: Vec<String> = (1..=self.dim()).map(|i| format!("l{i}")).collect();
        v.extend((1..=self.tvars).map(|i| format!("T{i}")));
        v
    }
}

fn fmt_vec(v: &[Q]) -> String {
    format!("({})", v.iter().map(fmt_rational).collect::<Vec<_>>().join(", "))
}

impl fmt::Display for MeromorphicTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names = self.var_names();
        for (i, (k, p)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let mut parts = Vec::new();
            if k.shift.iter().any(|x| !x.is_zero()) || k.has_t() {
                let mut e = fmt_vec(&k.shift);
                if k.has_t() {
                    let rows: Vec<String> = k.t_map.iter().map(|r| fmt_vec(r)).collect();
                    e = format!("[{}]·T + {e}", rows.join(", "));
                }
                parts.push(format!("e^<λ, {e}>"));
            }
            parts.push(format!("({})", p.render_with(&names)));
            write!(f, "{}", parts.join("·"))?;
            if !k.denominators.is_empty() {
                let ds: Vec<String> = k
                    .denominators
                    .iter()
                    .map(|(u, m)| if *m == 1 { format!("<λ, {}>", fmt_vec(u)) } else { format!("<λ, {}>^{m}", fmt_vec(u)) })
                    .collect();
                write!(f, " / ({})", ds.join("·"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MeromorphicTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{creal, q};

    fn lam(v: &[i64]) -> Vec<CQ> {
        v.iter().map(|&x| creal(q(x))).collect()
    }

    #[test]
    fn derivative_of_reciprocal() {
        let s = Space::euclidean(1);
        // -1/μ, derivative 1/μ²
        let f = MeromorphicTransform::simple(&s, 0, ExactScalar::from_q(q(-1)), &[vec![q(1)]]);
        let d = f.derivative(0);
        assert_eq!(d.eval(&lam(&[2]), None).unwrap(), ExactScalar::from_q(crate::arith::qq(1, 4)));
        let g = MeromorphicTransform::simple(&s, 0, ExactScalar::one(), &[vec![q(1)], vec![q(1)]]);
        assert!(d.equals(&g));
    }

    #[test]
    fn exponential_derivative() {
        let s = Space::euclidean(1);
        let f = MeromorphicTransform::constant(&s, 0, ExactScalar::one()).exp_shift(&[q(3)], &[]);
        let d = f.derivative(0);
        assert!(d.equals(&f.scale(&ExactScalar::from_q(q(3)))));
    }

    #[test]
    fn normalization_detects_cancellation() {
        let s = Space::euclidean(2);
        // 1/(a b) = 1/(a (a+b)) + 1/(b (a+b))
        let e = ExactScalar::one();
        let lhs = MeromorphicTransform::simple(&s, 0, e.clone(), &[vec![q(1), q(0)], vec![q(0), q(1)]]);
        let r1 = MeromorphicTransform::simple(&s, 0, e.clone(), &[vec![q(1), q(0)], vec![q(1), q(1)]]);
        let r2 = MeromorphicTransform::simple(&s, 0, e, &[vec![q(0), q(1)], vec![q(1), q(1)]]);
        assert!(lhs.equals(&r1.add(&r2)));
        assert!(!lhs.equals(&r1));
    }
}
