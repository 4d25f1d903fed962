//! Indicator cells and formal signed sums of their products.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use once_cell::sync::OnceCell;

use crate::arith::{dot, primitive_scaling, Q};
use crate::cones::Cone;
use crate::linalg::{self, Matrix};

/// `[rint cone](M·H − s)` (or the closed cone when `closed`).
#[derive(Clone, Debug)]
pub struct Cell {
    pub cone: Arc<Cone>,
    pub closed: bool,
    pub map: Option<Arc<Matrix>>,
    pub shift: Option<Vec<Q>>,
    /// Known to be the empty set (e.g. a product of disjoint relative interiors).
    pub empty: bool,
}

impl Cell {
    pub fn rint(cone: Arc<Cone>) -> Cell {
        Cell { cone, closed: false, map: None, shift: None, empty: false }
    }

    pub fn closed(cone: Arc<Cone>) -> Cell {
        Cell { cone, closed: true, map: None, shift: None, empty: false }
    }

    /// `[rint cone](H − t)`.
    pub fn shifted(cone: Arc<Cone>, t: &[Q]) -> Cell {
        let shift = if linalg::is_zero_vec(t) { None } else { Some(t.to_vec()) };
        Cell { cone, closed: false, map: None, shift, empty: false }
    }

    /// Substitute `X = N·H − t` into the cell's variable.
    pub fn pullback(&self, n: &Matrix, t: &[Q]) -> Cell {
        let (map, shift) = match &self.map {
            None => (n.clone(), t.to_vec()),
            Some(m) => (m.mul(n), m.mul_vec(t)),
        };
        let shift = match &self.shift {
            None => shift,
            Some(s) => linalg::add(&shift, s),
        };
        Cell {
            cone: self.cone.clone(),
            closed: self.closed,
            map: Some(Arc::new(map)),
            shift: if linalg::is_zero_vec(&shift) { None } else { Some(shift) },
            empty: self.empty,
        }
    }

    fn argument(&self, h: &[Q]) -> Vec<Q> {
        let x = match &self.map {
            Some(m) => m.mul_vec(h),
            None => h.to_vec(),
        };
        match &self.shift {
            Some(s) => linalg::sub(&x, s),
            None => x,
        }
    }

    /// Exact evaluation.
    pub fn eval(&self, h: &[Q]) -> bool {
        if self.empty {
            return false;
        }
        let x = self.argument(h);
        if self.closed {
            self.cone.contains(&x)
        } else {
            self.cone.rint_contains(&x)
        }
    }

    fn compile(&self, dim: usize) -> CompiledCell {
        if self.empty {
            return CompiledCell { tests: Vec::new(), never: true };
        }
        let mut tests = Vec::new();
        let mut never = false;
        let rel_ineq = if self.closed { Rel::Ge } else { Rel::Gt };
        let forms = self
            .cone
            .equalities()
            .iter()
            .map(|a| (a, Rel::Eq))
            .chain(self.cone.facets().iter().map(|a| (a, rel_ineq)));
        for (a, rel) in forms {
            let w = match &self.map {
                Some(m) => m.tmul_vec(a),
                None => a.clone(),
            };
            debug_assert_eq!(w.len(), dim);
            let off = match &self.shift {
                Some(s) => dot(a, s),
                None => Q::zero(),
            };
            let mut all = w;
            all.push(off);
            let (ints, _) = primitive_scaling(&all);
            let off = ints[dim].clone();
            let coeffs = &ints[..dim];
            if coeffs.iter().all(|c| c.is_zero()) {
                // constant test: 0 ⋈ off
                let v = -off;
                let ok = match rel {
                    Rel::Eq => v.is_zero(),
                    Rel::Gt => v.is_positive(),
                    Rel::Ge => !v.is_negative(),
                };
                if !ok {
                    never = true;
                }
                continue;
            }
            tests.push(LinTest::new(coeffs, &off, rel));
        }
        CompiledCell { tests, never }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Rel {
    Eq,
    Gt,
    Ge,
}

impl Rel {
    fn holds_sign(self, s: std::cmp::Ordering) -> bool {
        use std::cmp::Ordering::*;
        match self {
            Rel::Eq => s == Equal,
            Rel::Gt => s == Greater,
            Rel::Ge => s != Less,
        }
    }
}

/// `coeffs·num − off·den ⋈ 0`.
#[derive(Clone, Debug)]
struct LinTest {
    small: Option<(Vec<i64>, i64)>,
    big: (Vec<BigInt>, BigInt),
    rel: Rel,
}

impl LinTest {
    fn new(coeffs: &[BigInt], off: &BigInt, rel: Rel) -> Self {
        let small = coeffs
            .iter()
            .map(|c| c.to_i64())
            .collect::<Option<Vec<i64>>>()
            .and_then(|c| off.to_i64().map(|o| (c, o)));
        LinTest { small, big: (coeffs.to_vec(), off.clone()), rel }
    }

    fn eval(&self, p: &SamplePoint) -> bool {
        if let (Some((c, o)), Some(num)) = (&self.small, &p.small) {
            let mut acc: i128 = 0;
            let mut ok = true;
            for (ci, xi) in c.iter().zip(num) {
                match (*ci as i128).checked_mul(*xi as i128).and_then(|t| acc.checked_add(t)) {
                    Some(v) => acc = v,
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                if let Some(v) = (*o as i128)
                    .checked_mul(p.den_small as i128)
                    .and_then(|t| acc.checked_sub(t))
                {
                    return self.rel.holds_sign(v.cmp(&0));
                }
            }
        }
        let mut acc = BigInt::zero();
        for (ci, xi) in self.big.0.iter().zip(&p.num) {
            acc += ci * xi;
        }
        acc -= &self.big.1 * &p.den;
        self.rel.holds_sign(acc.sign().cmp_zero())
    }
}

trait SignCmp {
    fn cmp_zero(self) -> std::cmp::Ordering;
}
impl SignCmp for num_bigint::Sign {
    fn cmp_zero(self) -> std::cmp::Ordering {
        match self {
            num_bigint::Sign::Minus => std::cmp::Ordering::Less,
            num_bigint::Sign::NoSign => std::cmp::Ordering::Equal,
            num_bigint::Sign::Plus => std::cmp::Ordering::Greater,
        }
    }
}

#[derive(Clone, Debug)]
struct CompiledCell {
    tests: Vec<LinTest>,
    never: bool,
}

impl CompiledCell {
    fn eval(&self, p: &SamplePoint) -> bool {
        !self.never && self.tests.iter().all(|t| t.eval(p))
    }
}

/// A rational point with a common positive denominator, prepared for fast sign tests.
#[derive(Clone, Debug)]
pub struct SamplePoint {
    pub num: Vec<BigInt>,
    pub den: BigInt,
    small: Option<Vec<i64>>,
    den_small: i64,
}

impl SamplePoint {
    pub fn new(h: &[Q]) -> Self {
        let den = h.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let num: Vec<BigInt> = h
            .iter()
            .map(|x| x.numer() * (&den / x.denom()))
            .collect();
        let small = num.iter().map(|x| x.to_i64()).collect::<Option<Vec<_>>>();
        let den_small = den.to_i64();
        let (small, den_small) = match (small, den_small) {
            (Some(s), Some(d)) => (Some(s), d),
            _ => (None, 1),
        };
        SamplePoint { num, den, small, den_small }
    }

    pub fn to_q(&self) -> Vec<Q> {
        self.num.iter().map(|n| Q::new(n.clone(), self.den.clone())).collect()
    }
}

/// `weight · Π factors`; no factors means the constant `weight`.
#[derive(Clone, Debug)]
pub struct Term {
    pub weight: i64,
    pub factors: Vec<Cell>,
}

#[derive(Debug)]
struct Compiled {
    terms: Vec<(i64, Vec<CompiledCell>)>,
}

/// Formal integer combination of products of cells, evaluated pointwise.
#[derive(Debug)]
pub struct SignedCellSum {
    dim: usize,
    terms: Vec<Term>,
    compiled: OnceCell<Compiled>,
}

impl Clone for SignedCellSum {
    fn clone(&self) -> Self {
        SignedCellSum { dim: self.dim, terms: self.terms.clone(), compiled: OnceCell::new() }
    }
}

impl SignedCellSum {
    pub fn zero(dim: usize) -> Self {
        SignedCellSum { dim, terms: Vec::new(), compiled: OnceCell::new() }
    }

    pub fn constant(dim: usize, c: i64) -> Self {
        let mut s = Self::zero(dim);
        if c != 0 {
            s.terms.push(Term { weight: c, factors: Vec::new() });
        }
        s
    }

    pub fn cell(dim: usize, c: Cell) -> Self {
        Self::from_terms(dim, vec![Term { weight: 1, factors: vec![c] }])
    }

    pub fn from_terms(dim: usize, terms: Vec<Term>) -> Self {
        SignedCellSum { dim, terms, compiled: OnceCell::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn push(&mut self, t: Term) {
        self.terms.push(t);
        self.compiled = OnceCell::new();
    }

    pub fn add(&self, o: &SignedCellSum) -> SignedCellSum {
        let mut terms = self.terms.clone();
        terms.extend(o.terms.iter().cloned());
        Self::from_terms(self.dim, terms)
    }

    pub fn neg(&self) -> SignedCellSum {
        self.scale(-1)
    }

    pub fn sub(&self, o: &SignedCellSum) -> SignedCellSum {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: i64) -> SignedCellSum {
        let terms = self
            .terms
            .iter()
            .map(|t| Term { weight: t.weight * k, factors: t.factors.clone() })
            .collect();
        Self::from_terms(self.dim, terms)
    }

    /// Distributes the product term by term.
    pub fn mul(&self, o: &SignedCellSum) -> SignedCellSum {
        let mut terms = Vec::with_capacity(self.terms.len() * o.terms.len());
        for a in &self.terms {
            for b in &o.terms {
                let mut f = a.factors.clone();
                f.extend(b.factors.iter().cloned());
                terms.push(Term { weight: a.weight * b.weight, factors: f });
            }
        }
        Self::from_terms(self.dim, terms)
    }

    /// Substitute `X = N·H − t`; the result lives in the domain of `N`.
    pub fn pullback(&self, n: &Matrix, t: &[Q]) -> SignedCellSum {
        let terms = self
            .terms
            .iter()
            .map(|term| Term {
                weight: term.weight,
                factors: term.factors.iter().map(|c| c.pullback(n, t)).collect(),
            })
            .collect();
        Self::from_terms(n.cols, terms)
    }

    fn compiled(&self) -> &Compiled {
        self.compiled.get_or_init(|| Compiled {
            terms: self
                .terms
                .iter()
                .map(|t| (t.weight, t.factors.iter().map(|c| c.compile(self.dim)).collect()))
                .collect(),
        })
    }

    pub fn eval_point(&self, p: &SamplePoint) -> i64 {
        self.compiled()
            .terms
            .iter()
            .filter(|(w, cells)| *w != 0 && cells.iter().all(|c| c.eval(p)))
            .map(|(w, _)| *w)
            .sum()
    }

    pub fn eval(&self, h: &[Q]) -> i64 {
        self.eval_point(&SamplePoint::new(h))
    }

    /// Reference evaluation without the compiled integer tests.
    pub fn eval_exact(&self, h: &[Q]) -> i64 {
        self.terms
            .iter()
            .filter(|t| t.factors.iter().all(|c| c.eval(h)))
            .map(|t| t.weight)
            .sum()
    }
}

/// Result of multiplying two cells: one cell over the intersection, flagged empty
/// when the relative interiors are disjoint.
pub fn product_of_cells(a: &Cell, b: &Cell) -> SignedCellSum {
    let dim = a.cone.ambient_dim();
    let plain = |c: &Cell| c.map.is_none() && c.shift.is_none() && !c.empty;
    if !(plain(a) && plain(b)) || a.closed != b.closed {
        let t = Term { weight: 1, factors: vec![a.clone(), b.clone()] };
        return SignedCellSum::from_terms(dim, vec![t]);
    }
    let inter = Arc::new(a.cone.intersect(&b.cone).expect("same ambient space"));
    let empty = if a.closed {
        false
    } else {
        let p = inter.rint_point();
        !(a.cone.rint_contains(&p) && b.cone.rint_contains(&p))
    };
    SignedCellSum::cell(dim, Cell { cone: inter, closed: a.closed, map: None, shift: None, empty })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{q, qq};
    use crate::cones::Space;

    fn v(x: &[i64]) -> Vec<Q> {
        x.iter().map(|&a| q(a)).collect()
    }

    fn half(s: &Space, n: &[i64]) -> Arc<Cone> {
        Arc::new(Cone::from_halfspaces(s, &[v(n)], &[]).unwrap())
    }

    #[test]
    fn products_of_open_half_planes() {
        let s = Space::euclidean(2);
        let x = Cell::rint(half(&s, &[1, 0]));
        let y = Cell::rint(half(&s, &[0, 1]));
        let p = product_of_cells(&x, &y);
        assert_eq!(p.eval(&v(&[1, 1])), 1);
        assert_eq!(p.eval(&v(&[1, 0])), 0);
        let xn = Cell::rint(half(&s, &[-1, 0]));
        let e = product_of_cells(&x, &xn);
        assert!(e.terms()[0].factors[0].empty);
        let yaxis = Cell::rint(Arc::new(Cone::subspace(&s, &[v(&[0, 1])]).unwrap()));
        let e2 = product_of_cells(&x, &yaxis);
        for i in -4..=4 {
            for j in -4..=4 {
                let h = [qq(i, 2), qq(j, 3)];
                assert_eq!(e2.eval(&h), x.eval(&h) as i64 * yaxis.eval(&h) as i64);
            }
        }
    }

    #[test]
    fn shifted_and_pulled_back() {
        let s = Space::euclidean(1);
        let ray = Arc::new(Cone::from_halfspaces(&s, &[v(&[1])], &[]).unwrap());
        let c = Cell::shifted(ray, &[q(1)]);
        let sum = SignedCellSum::cell(1, c);
        assert_eq!(sum.eval(&[qq(3, 2)]), 1);
        assert_eq!(sum.eval(&[q(1)]), 0);
        // X = 2H − 1
        let m = Matrix::from_rows(&[v(&[2])], 1);
        let pb = sum.pullback(&m, &[q(1)]);
        // 2H − 1 − 1 > 0 ⟺ H > 1
        assert_eq!(pb.eval(&[qq(11, 10)]), 1);
        assert_eq!(pb.eval(&[q(1)]), 0);
        assert_eq!(pb.eval_exact(&[qq(11, 10)]), 1);
    }

    #[test]
    fn big_coordinates_fall_back() {
        let s = Space::euclidean(2);
        let c = SignedCellSum::cell(2, Cell::rint(half(&s, &[1, -1])));
        let big = Q::from_integer(BigInt::from(10).pow(30));
        let h = [big.clone() + q(1), big];
        assert_eq!(c.eval(&h), 1);
    }
}
