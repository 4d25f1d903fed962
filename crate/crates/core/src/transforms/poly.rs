//! Sparse multivariate polynomials with exact coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use super::scalar::ExactScalar;
use crate::arith::{fmt_rational, parse_rational, Q};
use crate::error::{Error, Result};

/// Coefficient ring of a [`Poly`].
pub trait Coeff: Clone + PartialEq + Zero + One + std::fmt::Debug {
    fn from_q(x: Q) -> Self;
    fn mul_ref(&self, o: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    fn render(&self) -> String;
}

impl Coeff for Q {
    fn from_q(x: Q) -> Self {
        x
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn render(&self) -> String {
        fmt_rational(self)
    }
}

impl Coeff for ExactScalar {
    fn from_q(x: Q) -> Self {
        ExactScalar::from_q(x)
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn neg_ref(&self) -> Self {
        -self.clone()
    }
    fn render(&self) -> String {
        self.to_string()
    }
}

/// `Σ c_a x^a` over `nvars` variables; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly<K> {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, K>,
}

impl<K: Coeff> Poly<K> {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: K) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, K::one())
    }

    /// The variable `x_i` (0-based).
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, K::one());
        p
    }

    /// `Σ a_i x_i`.
    pub fn linear(a: &[Q]) -> Self {
        let n = a.len();
        let mut p = Self::zero(n);
        for (i, c) in a.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            p.add_term(e, K::from_q(c.clone()));
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &K)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, e: Vec<u32>, c: K) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(x) => {
                *x = x.clone() + c;
                if x.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn coefficient(&self, e: &[u32]) -> K {
        self.terms.get(e).cloned().unwrap_or_else(K::zero)
    }

    pub fn constant_term(&self) -> K {
        self.coefficient(&vec![0; self.nvars])
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.nvars, o.nvars, "polynomial arity");
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg_ref())).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: &K) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.mul_ref(s));
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.nvars, o.nvars, "polynomial arity");
        let mut out = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1.mul_ref(c2));
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.nvars);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// `∂/∂x_i`.
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut f = e.clone();
                f[i] -= 1;
                out.add_term(f, c.mul_ref(&K::from_q(Q::from_integer(e[i].into()))));
            }
        }
        out
    }

    /// Directional derivative `Σ v_i ∂_i`.
    pub fn directional(&self, v: &[Q]) -> Self {
        let mut out = Self::zero(self.nvars);
        for (i, c) in v.iter().enumerate() {
            if !c.is_zero() {
                out = out.add(&self.derivative(i).scale(&K::from_q(c.clone())));
            }
        }
        out
    }

    /// Substitute `x_i ↦ subs[i]`, polynomials in a common (possibly different) arity.
    pub fn compose(&self, subs: &[Poly<K>]) -> Poly<K> {
        assert_eq!(subs.len(), self.nvars, "substitution arity");
        let m = subs.first().map(|p| p.nvars).unwrap_or(0);
        let mut out = Poly::zero(m);
        for (e, c) in &self.terms {
            let mut t = Poly::constant(m, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = t.mul(&subs[i].pow(k));
                }
            }
            out = out.add(&t);
        }
        out
    }

    /// `H ↦ q(H + s)`.
    pub fn shift(&self, s: &[Q]) -> Self {
        let n = self.nvars;
        let subs: Vec<Poly<K>> = (0..n)
            .map(|i| Poly::var(n, i).add(&Poly::constant(n, K::from_q(s[i].clone()))))
            .collect();
        self.compose(&subs)
    }

    /// Embed into `nvars + extra` variables (new variables appended).
    pub fn extend(&self, extra: usize) -> Self {
        Poly {
            nvars: self.nvars + extra,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut f = e.clone();
                    f.extend(std::iter::repeat(0).take(extra));
                    (f, c.clone())
                })
                .collect(),
        }
    }

    /// Map the coefficients into another ring.
    pub fn map<L: Coeff>(&self, f: impl Fn(&K) -> L) -> Poly<L> {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }

    /// Evaluate the first `k` variables at the given values, keeping the rest.
    pub fn partial_eval(&self, vals: &[K]) -> Poly<K> {
        let k = vals.len();
        let mut out = Poly::zero(self.nvars - k);
        for (e, c) in &self.terms {
            let mut v = c.clone();
            for (i, &p) in e[..k].iter().enumerate() {
                for _ in 0..p {
                    v = v.mul_ref(&vals[i]);
                }
            }
            out.add_term(e[k..].to_vec(), v);
        }
        out
    }

    pub fn eval(&self, x: &[K]) -> K {
        assert_eq!(x.len(), self.nvars, "evaluation arity");
        self.partial_eval(x).constant_term()
    }
}

impl Poly<Q> {
    /// Parse e.g. `"1 + 2x1^2 - 3/4*x2*x3"`, `"(x + y)^2"`. Variables are `x1..xn`
    /// (1-based) or the aliases `x, y, z, w` for the first four.
    pub fn parse(s: &str, nvars: usize) -> Result<Self> {
        let mut p = Parser { s: s.as_bytes(), i: 0, nvars };
        let out = p.expr()?;
        p.ws();
        if p.i != p.s.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(out)
    }

    /// Rational value at a rational point.
    pub fn eval_q(&self, x: &[Q]) -> Q {
        self.eval(x)
    }
}

impl FromStr for Poly<Q> {
    type Err = Error;
    /// Parses with the arity given by the largest variable mentioned.
    fn from_str(s: &str) -> Result<Self> {
        let n = max_var(s);
        Self::parse(s, n)
    }
}

/// Largest variable index mentioned in a polynomial string (1-based count).
pub fn max_var(s: &str) -> usize {
    let b = s.as_bytes();
    let mut n = 0;
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        if c.is_ascii_alphabetic() {
            let mut j = i + 1;
            while j < b.len() && b[j].is_ascii_digit() {
                j += 1;
            }
            let k = match (c, &s[i + 1..j]) {
                (b'x', "") => 1,
                (b'y', "") => 2,
                (b'z', "") => 3,
                (b'w', "") => 4,
                (_, d) => d.parse().unwrap_or(0),
            };
            n = n.max(k);
            i = j;
        } else {
            i += 1;
        }
    }
    n
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
    nvars: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("polynomial at offset {}: {msg}", self.i))
    }

    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.i).copied()
    }

    fn expr(&mut self) -> Result<Poly<Q>> {
        let mut acc = if self.peek() == Some(b'-') {
            self.i += 1;
            self.term()?.neg()
        } else {
            if self.peek() == Some(b'+') {
                self.i += 1;
            }
            self.term()?
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.i += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.i += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly<Q>> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.i += 1;
                    acc = acc.mul(&self.power()?);
                }
                Some(c) if c == b'(' || c.is_ascii_alphanumeric() || c == b'.' => {
                    acc = acc.mul(&self.power()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<Poly<Q>> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.i += 1;
            self.ws();
            let start = self.i;
            while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
                self.i += 1;
            }
            let k: u32 = std::str::from_utf8(&self.s[start..self.i])
                .unwrap()
                .parse()
                .map_err(|_| self.err("expected a non-negative integer exponent"))?;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly<Q>> {
        match self.peek() {
            Some(b'(') => {
                self.i += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.i += 1;
                Ok(e)
            }
            Some(b'-') => {
                self.i += 1;
                Ok(self.power()?.neg())
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.i;
                while self.i < self.s.len() && (self.s[self.i].is_ascii_digit() || self.s[self.i] == b'.') {
                    self.i += 1;
                }
                // p/q literal, only when a digit follows the slash
                if self.i + 1 < self.s.len() && self.s[self.i] == b'/' && self.s[self.i + 1].is_ascii_digit() {
                    self.i += 1;
                    while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
                        self.i += 1;
                    }
                }
                let lit = std::str::from_utf8(&self.s[start..self.i]).unwrap();
                let v = parse_rational(lit)?;
                Ok(Poly::constant(self.nvars, v))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.i;
                self.i += 1;
                while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
                    self.i += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.i]).unwrap();
                let k = match name {
                    "x" => 1,
                    "y" => 2,
                    "z" => 3,
                    "w" => 4,
                    _ if name.starts_with('x') => name[1..].parse().map_err(|_| self.err("bad variable"))?,
                    _ => return Err(self.err(&format!("unknown variable '{name}'"))),
                };
                if k == 0 || k > self.nvars {
                    return Err(Error::Dimension { expected: self.nvars, got: k });
                }
                Ok(Poly::var(self.nvars, k - 1))
            }
            _ => Err(self.err("expected a number, variable or '('")),
        }
    }
}

impl<K: Coeff> Poly<K> {
    /// Render with the given variable names.
    pub fn render_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        // highest degree first
        let mut ts: Vec<_> = self.terms.iter().collect();
        ts.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            db.cmp(&da).then_with(|| b.0.cmp(a.0))
        });
        let mut f = String::new();
        for (k, (e, c)) in ts.into_iter().enumerate() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0)
                .map(|(i, &p)| if p == 1 { names[i].clone() } else { format!("{}^{}", names[i], p) })
                .collect();
            let mut cs = c.render();
            let neg = cs.starts_with('-') && !cs[1..].contains(['+', '-', ' ']);
            if neg {
                cs.remove(0);
            }
            if k > 0 {
                f.push_str(if neg { " - " } else { " + " });
            } else if neg {
                f.push('-');
            }
            let simple = !cs.contains(['+', '-', ' ', '/', '(']);
            match (mono.is_empty(), cs.as_str()) {
                (true, _) => f.push_str(&cs),
                (false, "1") => f.push_str(&mono.join("*")),
                (false, _) if simple => f.push_str(&format!("{cs}*{}", mono.join("*"))),
                (false, _) => f.push_str(&format!("({cs})*{}", mono.join("*"))),
            }
        }
        f
    }
}

impl<K: Coeff> fmt::Display for Poly<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.nvars).map(|i| format!("x{i}")).collect();
        write!(f, "{}", self.render_with(&names))
    }
}

impl<K: Coeff> fmt::Debug for Poly<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Sign-normalized primitive form: returns `(u', c)` with `u = c·u'`, `u'` integral
/// primitive and its first nonzero entry positive.
pub fn canonical_form(u: &[Q]) -> (Vec<Q>, Q) {
    let (ints, factor) = crate::arith::primitive_scaling(u);
    let mut v: Vec<Q> = ints.into_iter().map(Q::from_integer).collect();
    let mut c = factor.recip();
    if v.iter().find(|x| !x.is_zero()).map(|x| x.is_negative()).unwrap_or(false) {
        v = v.into_iter().map(|x| -x).collect();
        c = -c;
    }
    (v, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{q, qq};

    #[test]
    fn parse_and_print() {
        let p = Poly::parse("1 + 2x1^2 - 3/4*x2*x3", 3).unwrap();
        assert_eq!(p.coefficient(&[2, 0, 0]), q(2));
        assert_eq!(p.coefficient(&[0, 1, 1]), qq(-3, 4));
        assert_eq!(p.constant_term(), q(1));
        let again = Poly::parse(&p.to_string(), 3).unwrap();
        assert_eq!(p, again);
        let sq = Poly::parse("(x + y)^2", 2).unwrap();
        assert_eq!(sq, Poly::parse("x^2 + 2xy + y^2", 2).unwrap());
        assert_eq!(Poly::parse("0.5x", 1).unwrap(), Poly::parse("1/2 x1", 1).unwrap());
        assert!(Poly::parse("x3", 2).is_err());
        assert!(Poly::parse("x +", 2).is_err());
        assert_eq!(max_var("x2 + y*w"), 4);
    }

    #[test]
    fn shift_and_derivative() {
        let p = Poly::parse("x^2 y", 2).unwrap();
        let s = p.shift(&[q(1), q(0)]);
        assert_eq!(s, Poly::parse("x^2 y + 2 x y + y", 2).unwrap());
        assert_eq!(p.derivative(0), Poly::parse("2xy", 2).unwrap());
        assert_eq!(p.directional(&[q(1), q(1)]), Poly::parse("2xy + x^2", 2).unwrap());
        assert_eq!(p.eval(&[q(2), q(3)]), q(12));
    }

    #[test]
    fn canonical_forms() {
        let (u, c) = canonical_form(&[qq(-1, 2), q(1)]);
        assert_eq!(u, vec![q(1), q(-2)]);
        assert_eq!(c, qq(-1, 2));
    }
}
