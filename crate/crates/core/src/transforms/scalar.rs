//! Exact scalars `Σ c·√r·e^a` with `c ∈ Q(i)`, `r` a squarefree positive integer
//! and `a` a complex rational exponent. The representation is canonical, so
//! equality is structural.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{cq, fmt_complex, sqrt_rational, to_f64, CQ, Q};

type Key = (BigInt, Q, Q);

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ExactScalar {
    terms: BTreeMap<Key, (Q, Q)>,
}

fn key(r: BigInt, a: &CQ) -> Key {
    (r, a.re.clone(), a.im.clone())
}

impl ExactScalar {
    pub fn from_cq(c: CQ) -> Self {
        let mut s = ExactScalar::default();
        s.insert(key(BigInt::one(), &cq(Q::zero(), Q::zero())), c);
        s
    }

    pub fn from_q(c: Q) -> Self {
        Self::from_cq(cq(c, Q::zero()))
    }

    /// `√x` for a positive rational `x`.
    pub fn sqrt(x: &Q) -> Self {
        let (c, r) = sqrt_rational(x);
        let mut s = ExactScalar::default();
        s.insert(key(r, &cq(Q::zero(), Q::zero())), cq(c, Q::zero()));
        s
    }

    /// `e^a`.
    pub fn exp(a: &CQ) -> Self {
        let mut s = ExactScalar::default();
        s.insert(key(BigInt::one(), a), cq(Q::one(), Q::zero()));
        s
    }

    fn insert(&mut self, k: Key, c: CQ) {
        if c.re.is_zero() && c.im.is_zero() {
            return;
        }
        let e = self.terms.entry(k.clone()).or_insert((Q::zero(), Q::zero()));
        e.0 += c.re;
        e.1 += c.im;
        if e.0.is_zero() && e.1.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn scale(&self, c: &CQ) -> Self {
        let mut out = ExactScalar::default();
        for (k, (re, im)) in &self.terms {
            let v = cq(re.clone(), im.clone()) * c.clone();
            out.insert(k.clone(), v);
        }
        out
    }

    pub fn div_cq(&self, c: &CQ) -> Self {
        let n = &c.re * &c.re + &c.im * &c.im;
        let inv = cq(&c.re / &n, -&c.im / &n);
        self.scale(&inv)
    }

    /// The rational-complex value when no radicals or exponentials are present.
    pub fn as_cq(&self) -> Option<CQ> {
        match self.terms.len() {
            0 => Some(cq(Q::zero(), Q::zero())),
            1 => {
                let ((r, are, aim), (re, im)) = self.terms.iter().next().unwrap();
                (r.is_one() && are.is_zero() && aim.is_zero()).then(|| cq(re.clone(), im.clone()))
            }
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Floating value as `(re, im)`.
    pub fn to_c64(&self) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for ((r, are, aim), (cre, cim)) in &self.terms {
            let root = to_f64(&Q::from_integer(r.clone())).sqrt();
            let mag = to_f64(are).exp() * root;
            let (s, c) = to_f64(aim).sin_cos();
            let (er, ei) = (mag * c, mag * s);
            let (cr, ci) = (to_f64(cre), to_f64(cim));
            re += cr * er - ci * ei;
            im += cr * ei + ci * er;
        }
        (re, im)
    }

    /// Terms as `(coefficient, radicand, exponent)` strings, for serialization.
    pub fn components(&self) -> Vec<(String, String, String)> {
        self.terms
            .iter()
            .map(|((r, are, aim), (re, im))| {
                (
                    fmt_complex(&cq(re.clone(), im.clone())),
                    r.to_string(),
                    fmt_complex(&cq(are.clone(), aim.clone())),
                )
            })
            .collect()
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(c) = self.as_cq() {
            return write!(f, "{}", fmt_complex(&c));
        }
        for (i, (c, r, a)) in self.components().into_iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            if r != "1" {
                write!(f, "·√{r}")?;
            }
            if a != "0" {
                write!(f, "·e^({a})")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Zero for ExactScalar {
    fn zero() -> Self {
        ExactScalar::default()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for ExactScalar {
    fn one() -> Self {
        ExactScalar::from_q(Q::one())
    }
}

impl Add for &ExactScalar {
    type Output = ExactScalar;
    fn add(self, o: &ExactScalar) -> ExactScalar {
        let mut out = self.clone();
        for (k, (re, im)) in &o.terms {
            out.insert(k.clone(), cq(re.clone(), im.clone()));
        }
        out
    }
}

impl Add for ExactScalar {
    type Output = ExactScalar;
    fn add(self, o: ExactScalar) -> ExactScalar {
        &self + &o
    }
}

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        self.scale(&cq(-Q::one(), Q::zero()))
    }
}

impl Sub for ExactScalar {
    type Output = ExactScalar;
    fn sub(self, o: ExactScalar) -> ExactScalar {
        &self + &(-o)
    }
}

impl Mul for &ExactScalar {
    type Output = ExactScalar;
    fn mul(self, o: &ExactScalar) -> ExactScalar {
        let mut out = ExactScalar::default();
        for ((r1, a1, b1), (c1, d1)) in &self.terms {
            for ((r2, a2, b2), (c2, d2)) in &o.terms {
                // √r1·√r2 = g·√(r1 r2 / g²)
                let g = r1.gcd(r2);
                let r = r1 * r2 / (&g * &g);
                let mut c = cq(c1.clone(), d1.clone()) * cq(c2.clone(), d2.clone());
                if !g.is_one() {
                    c = c * cq(Q::from_integer(g.abs()), Q::zero());
                }
                let a = cq(a1 + a2, b1 + b2);
                out.insert(key(r, &a), c);
            }
        }
        out
    }
}

impl Mul for ExactScalar {
    type Output = ExactScalar;
    fn mul(self, o: ExactScalar) -> ExactScalar {
        &self * &o
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{q, qq};

    #[test]
    fn radicals_multiply() {
        let s2 = ExactScalar::sqrt(&q(2));
        let s6 = ExactScalar::sqrt(&q(6));
        let p = &s2 * &s6;
        // √2·√6 = 2√3
        assert_eq!(p, &ExactScalar::from_q(q(2)) * &ExactScalar::sqrt(&q(3)));
        let half = ExactScalar::sqrt(&qq(1, 2));
        assert_eq!(&half * &half, ExactScalar::from_q(qq(1, 2)));
    }

    #[test]
    fn exponentials_combine() {
        let a = ExactScalar::exp(&cq(q(1), q(0)));
        let b = ExactScalar::exp(&cq(q(-1), q(0)));
        assert_eq!(&a * &b, ExactScalar::one());
        let z = a.clone() - a;
        assert!(z.is_zero());
        let (re, _) = ExactScalar::exp(&cq(q(1), q(0))).to_c64();
        assert!((re - std::f64::consts::E).abs() < 1e-12);
    }
}
