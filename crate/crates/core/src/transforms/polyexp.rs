//! Polynomial-exponential functions `f(T) = Σ_κ e^{κ·T} q_κ(T)`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use super::poly::Poly;
use super::scalar::ExactScalar;
use crate::arith::{cdot, cq, fmt_complex, CQ, Q};

/// `κ` as pairs `(re, im)`, so that keys are ordered.
pub type ExponentKey = Vec<(Q, Q)>;

#[derive(Clone, PartialEq, Eq)]
pub struct PolyExp {
    nvars: usize,
    parts: BTreeMap<ExponentKey, Poly<ExactScalar>>,
}

fn to_key(k: &[CQ]) -> ExponentKey {
    k.iter().map(|z| (z.re.clone(), z.im.clone())).collect()
}

fn from_key(k: &ExponentKey) -> Vec<CQ> {
    k.iter().map(|(a, b)| cq(a.clone(), b.clone())).collect()
}

impl PolyExp {
    pub fn zero(nvars: usize) -> Self {
        PolyExp { nvars, parts: BTreeMap::new() }
    }

    pub fn polynomial(p: Poly<ExactScalar>) -> Self {
        let mut out = Self::zero(p.nvars());
        out.add_part(&vec![cq(Q::zero(), Q::zero()); p.nvars()], &p);
        out
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Add `e^{κ·T} p(T)`.
    pub fn add_part(&mut self, kappa: &[CQ], p: &Poly<ExactScalar>) {
        assert_eq!(kappa.len(), self.nvars, "exponent arity");
        if p.is_zero() {
            return;
        }
        let k = to_key(kappa);
        let e = self.parts.entry(k.clone()).or_insert_with(|| Poly::zero(p.nvars()));
        *e = e.add(p);
        if e.is_zero() {
            self.parts.remove(&k);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (k, p) in &o.parts {
            out.add_part(&from_key(k), p);
        }
        out
    }

    pub fn scale(&self, c: &ExactScalar) -> Self {
        let mut out = Self::zero(self.nvars);
        for (k, p) in &self.parts {
            out.add_part(&from_key(k), &p.scale(c));
        }
        out
    }

    pub fn parts(&self) -> impl Iterator<Item = (Vec<CQ>, &Poly<ExactScalar>)> {
        self.parts.iter().map(|(k, p)| (from_key(k), p))
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    /// `q_0`, the coefficient of `κ = 0`.
    pub fn purely_polynomial_part(&self) -> Poly<ExactScalar> {
        let zero: ExponentKey = vec![(Q::zero(), Q::zero()); self.nvars];
        self.parts.get(&zero).cloned().unwrap_or_else(|| Poly::zero(self.nvars))
    }

    /// `T ↦ f(T + s)`.
    pub fn translate(&self, s: &[Q]) -> Self {
        let mut out = Self::zero(self.nvars);
        for (k, p) in &self.parts {
            let kappa = from_key(k);
            let c = ExactScalar::exp(&cdot(&kappa, s));
            out.add_part(&kappa, &p.shift(s).scale(&c));
        }
        out
    }

    pub fn eval(&self, t: &[Q]) -> ExactScalar {
        let tv: Vec<ExactScalar> = t.iter().map(|x| ExactScalar::from_q(x.clone())).collect();
        let mut total = ExactScalar::zero();
        for (k, p) in &self.parts {
            let e = ExactScalar::exp(&cdot(&from_key(k), t));
            total = total + &e * &p.eval(&tv);
        }
        total
    }
}

impl fmt::Display for PolyExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "0");
        }
        let names: Vec<String> = (1..=self.nvars).map(|i| format!("T{i}")).collect();
        for (i, (k, p)) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if k.iter().all(|(a, b)| a.is_zero() && b.is_zero()) {
                write!(f, "({})", p.render_with(&names))?;
            } else {
                let ks: Vec<String> = from_key(k).iter().map(fmt_complex).collect();
                write!(f, "e^<({}), T>·({})", ks.join(", "), p.render_with(&names))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for PolyExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{creal, q};

    fn poly(s: &str) -> Poly<ExactScalar> {
        Poly::parse(s, 1).unwrap().map(|c| ExactScalar::from_q(c.clone()))
    }

    #[test]
    fn polynomial_part_extraction() {
        let mut f = PolyExp::zero(1);
        f.add_part(&[creal(q(2))], &poly("3"));
        f.add_part(&[creal(q(0))], &poly("5 + x"));
        assert_eq!(f.purely_polynomial_part(), poly("5 + x"));
        let mut g = PolyExp::zero(1);
        g.add_part(&[creal(q(1))], &poly("1"));
        assert!(g.purely_polynomial_part().is_zero());
    }

    #[test]
    fn translation_matches_evaluation() {
        let mut f = PolyExp::zero(1);
        f.add_part(&[creal(q(1))], &poly("x"));
        f.add_part(&[creal(q(0))], &poly("2"));
        let g = f.translate(&[q(3)]);
        assert_eq!(g.eval(&[q(1)]), f.eval(&[q(4)]));
        assert_eq!(g.purely_polynomial_part(), poly("2"));
    }
}
