//! Exact scalar helpers: rationals, complex rationals, primitive scaling and
//! the `"p/q"` string form used by every serialized artifact.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Q = BigRational;
pub type CQ = Complex<Q>;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qq(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn cq(re: Q, im: Q) -> CQ {
    Complex::new(re, im)
}

pub fn creal(re: Q) -> CQ {
    Complex::new(re, Q::zero())
}

/// Parses `"p/q"`, `"p"` or a terminating decimal such as `"-1.25"`.
pub fn parse_rational(s: &str) -> Result<Q> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::Parse(format!("empty rational '{s}'")));
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator in '{s}'")))?;
        let d: BigInt = d
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in '{s}'")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in '{s}'")));
        }
        return Ok(Q::new(n, d));
    }
    if let Some((ip, fp)) = t.split_once('.') {
        let neg = ip.starts_with('-');
        let digits = format!("{}{}", ip.trim_start_matches(['-', '+']), fp);
        let n: BigInt = digits
            .parse()
            .map_err(|_| Error::Parse(format!("bad decimal '{s}'")))?;
        let d = num_traits::pow(BigInt::from(10), fp.len());
        let v = Q::new(n, d);
        return Ok(if neg { -v } else { v });
    }
    let n: BigInt = t
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational '{s}'")))?;
    Ok(Q::from_integer(n))
}

/// Parses `"a"`, `"bi"`, `"a+bi"` or `"a-bi"` with rational parts.
pub fn parse_complex(s: &str) -> Result<CQ> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(body) = t.strip_suffix('i') else {
        return Ok(creal(parse_rational(&t)?));
    };
    // split at the last sign that is not leading
    let cut = body.char_indices().skip(1).filter(|&(_, c)| c == '+' || c == '-').map(|(i, _)| i).last();
    let (re, im) = match cut {
        Some(i) => (parse_rational(&body[..i])?, &body[i..]),
        None => (Q::zero(), body),
    };
    let im = match im {
        "" | "+" => Q::one(),
        "-" => -Q::one(),
        x => parse_rational(x.trim_start_matches('+'))?,
    };
    Ok(cq(re, im))
}

/// Comma-separated complex entries, optionally bracketed.
pub fn parse_complex_vector(s: &str) -> Result<Vec<CQ>> {
    let t = s.trim().trim_start_matches('[').trim_end_matches(']');
    if t.trim().is_empty() {
        return Ok(Vec::new());
    }
    t.split(',').map(parse_complex).collect()
}

pub fn fmt_rational(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn fmt_complex(z: &CQ) -> String {
    if z.im.is_zero() {
        fmt_rational(&z.re)
    } else if z.re.is_zero() {
        format!("{}i", fmt_rational(&z.im))
    } else if z.im.is_negative() {
        format!("{}-{}i", fmt_rational(&z.re), fmt_rational(&-z.im.clone()))
    } else {
        format!("{}+{}i", fmt_rational(&z.re), fmt_rational(&z.im))
    }
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // huge numerators: fall back on the ratio of logarithms of magnitudes
        let n = x.numer().to_f64().unwrap_or(f64::MAX);
        let d = x.denom().to_f64().unwrap_or(f64::MAX);
        n / d
    })
}

pub fn lcm_denominators(v: &[Q]) -> BigInt {
    v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Positive rescaling of `v` to a primitive integer vector (gcd of entries 1).
/// Returns the scaled vector and the (positive) factor applied.
pub fn primitive_scaling(v: &[Q]) -> (Vec<BigInt>, Q) {
    let l = lcm_denominators(v);
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Q::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return (ints, Q::one());
    }
    let out = ints.iter().map(|x| x / &g).collect();
    (out, Q::new(l, g))
}

pub fn primitive(v: &[Q]) -> Vec<Q> {
    primitive_scaling(v).0.into_iter().map(Q::from_integer).collect()
}

/// Largest square divisor extraction: returns `(k, s)` with `n = k^2 * s`, `s`
/// squarefree when the trial division finishes (always for |n| < 10^12).
pub fn square_part(n: &BigInt) -> (BigInt, BigInt) {
    let mut k = BigInt::one();
    let mut s = BigInt::one();
    let mut m = n.abs();
    let mut p = BigInt::from(2u32);
    let limit = BigInt::from(1_000_000u64);
    while &p * &p <= m && p <= limit {
        let mut e = 0u32;
        while (&m % &p).is_zero() {
            m /= &p;
            e += 1;
        }
        for _ in 0..e / 2 {
            k *= &p;
        }
        if e % 2 == 1 {
            s *= &p;
        }
        p += 1;
    }
    s *= m;
    (k, s)
}

/// `sqrt(x)` for a positive rational, as `c * sqrt(r)` with `r` a squarefree integer.
pub fn sqrt_rational(x: &Q) -> (Q, BigInt) {
    assert!(x.is_positive(), "sqrt of non-positive rational");
    let pq = x.numer() * x.denom();
    let (k, s) = square_part(&pq);
    (Q::new(k, x.denom().clone()), s)
}

/// Exact rational vector.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct RationalVector(pub Vec<Q>);

impl RationalVector {
    pub fn zeros(n: usize) -> Self {
        RationalVector(vec![Q::zero(); n])
    }

    pub fn from_ints(v: &[i64]) -> Self {
        RationalVector(v.iter().map(|&x| q(x)).collect())
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[i] = Q::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[Q] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| x.is_zero())
    }

    pub fn dot(&self, other: &[Q]) -> Q {
        dot(&self.0, other)
    }

    pub fn scale(&self, s: &Q) -> Self {
        RationalVector(self.0.iter().map(|x| x * s).collect())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(to_f64).collect()
    }

    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches('[').trim_end_matches(']');
        if t.trim().is_empty() {
            return Ok(RationalVector(Vec::new()));
        }
        t.split(',')
            .map(parse_rational)
            .collect::<Result<Vec<_>>>()
            .map(RationalVector)
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(fmt_rational).collect()
    }
}

impl fmt::Display for RationalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", fmt_rational(x))?;
        }
        write!(f, ")")
    }
}

impl Index<usize> for RationalVector {
    type Output = Q;
    fn index(&self, i: usize) -> &Q {
        &self.0[i]
    }
}

impl IndexMut<usize> for RationalVector {
    fn index_mut(&mut self, i: usize) -> &mut Q {
        &mut self.0[i]
    }
}

impl Add for &RationalVector {
    type Output = RationalVector;
    fn add(self, o: &RationalVector) -> RationalVector {
        RationalVector(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &RationalVector {
    type Output = RationalVector;
    fn sub(self, o: &RationalVector) -> RationalVector {
        RationalVector(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &RationalVector {
    type Output = RationalVector;
    fn neg(self) -> RationalVector {
        RationalVector(self.0.iter().map(|a| -a).collect())
    }
}

impl Mul<&Q> for &RationalVector {
    type Output = RationalVector;
    fn mul(self, s: &Q) -> RationalVector {
        self.scale(s)
    }
}

impl From<Vec<Q>> for RationalVector {
    fn from(v: Vec<Q>) -> Self {
        RationalVector(v)
    }
}

impl Serialize for RationalVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<RatString>::deserialize(d)?;
        Ok(RationalVector(v.into_iter().map(|r| r.0).collect()))
    }
}

/// A rational that (de)serializes as a `"p/q"` string; bare JSON integers are accepted on input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatString(pub Q);

impl Serialize for RatString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for RatString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match v {
            serde_json::Value::String(s) => parse_rational(&s)
                .map(RatString)
                .map_err(serde::de::Error::custom),
            serde_json::Value::Number(n) => parse_rational(&n.to_string())
                .map(RatString)
                .map_err(serde::de::Error::custom),
            other => Err(serde::de::Error::custom(format!(
                "expected rational string, got {other}"
            ))),
        }
    }
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

pub fn cdot(a: &[CQ], b: &[Q]) -> CQ {
    a.iter().zip(b).fold(CQ::zero(), |acc, (x, y)| {
        acc + CQ::new(&x.re * y, &x.im * y)
    })
}

pub fn complex_to_f64(z: &CQ) -> (f64, f64) {
    (to_f64(&z.re), to_f64(&z.im))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3/6").unwrap(), qq(1, 2));
        assert_eq!(parse_rational("-4").unwrap(), q(-4));
        assert_eq!(parse_rational("-1.25").unwrap(), qq(-5, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert_eq!(fmt_rational(&qq(-6, 4)), "-3/2");
    }

    #[test]
    fn primitive_vectors() {
        let v = vec![qq(1, 2), qq(-3, 4), q(0)];
        assert_eq!(primitive(&v), vec![q(2), q(-3), q(0)]);
        let (_, s) = primitive_scaling(&v);
        assert_eq!(s, q(4));
    }

    #[test]
    fn square_parts() {
        let (k, s) = square_part(&BigInt::from(72));
        assert_eq!((k, s), (BigInt::from(6), BigInt::from(2)));
        let (c, r) = sqrt_rational(&qq(1, 2));
        // sqrt(1/2) = sqrt(2)/2
        assert_eq!(c, qq(1, 2));
        assert_eq!(r, BigInt::from(2));
    }

    #[test]
    fn vector_parse() {
        let v = RationalVector::parse("[1, -2/3, 0.5]").unwrap();
        assert_eq!(v, RationalVector(vec![q(1), qq(-2, 3), qq(1, 2)]));
        assert_eq!(format!("{v}"), "(1, -2/3, 1/2)");
    }

    #[test]
    fn complex_parse() {
        assert_eq!(parse_complex("1/2").unwrap(), cq(qq(1, 2), q(0)));
        assert_eq!(parse_complex("-3i").unwrap(), cq(q(0), q(-3)));
        assert_eq!(parse_complex("-1/2 - 2/3i").unwrap(), cq(qq(-1, 2), qq(-2, 3)));
        assert_eq!(parse_complex("1+i").unwrap(), cq(q(1), q(1)));
        assert_eq!(parse_complex_vector("[0, 1-i]").unwrap().len(), 2);
        assert!(parse_complex("1+xi").is_err());
        for z in [cq(qq(-1, 2), qq(3, 4)), cq(q(0), q(-1)), cq(q(5), q(0))] {
            assert_eq!(parse_complex(&fmt_complex(&z)).unwrap(), z);
        }
    }
}
