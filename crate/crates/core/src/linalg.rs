//! Dense exact linear algebra over the rationals.

use num_traits::{One, Signed, Zero};

use crate::arith::{dot, Q};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Q>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Q::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Q>], cols: usize) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols);
            data.extend(r.iter().cloned());
        }
        Matrix { rows: rows.len(), cols, data }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[Vec<Q>], rows: usize) -> Self {
        Self::from_rows(cols, rows).transpose()
    }

    pub fn get(&self, i: usize, j: usize) -> &Q {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Q) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<Q> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<Q> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<Q>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn col_vecs(&self) -> Vec<Vec<Q>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.cols, o.rows);
        let mut m = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        let idx = i * o.cols + j;
                        m.data[idx] += a * b;
                    }
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| dot(&self.data[i * self.cols..(i + 1) * self.cols], v))
            .collect()
    }

    /// `selfᵀ · v`.
    pub fn tmul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(self.rows, v.len());
        let mut out = vec![Q::zero(); self.cols];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let a = self.get(i, j);
                if !a.is_zero() {
                    *o += a * vi;
                }
            }
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let v = self.get(i, j);
                    if i == j {
                        v.is_one()
                    } else {
                        v.is_zero()
                    }
                })
            })
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn det(&self) -> Q {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.row_vecs();
        let mut det = Q::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
                return Q::zero();
            };
            if p != c {
                a.swap(p, c);
                det = -det;
            }
            let piv = a[c][c].clone();
            det *= &piv;
            for r in c + 1..n {
                if a[r][c].is_zero() {
                    continue;
                }
                let f = &a[r][c] / &piv;
                for k in c..n {
                    let t = &f * &a[c][k];
                    a[r][k] -= t;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a: Vec<Vec<Q>> = (0..n)
            .map(|i| {
                let mut r = self.row(i);
                r.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
                r
            })
            .collect();
        for c in 0..n {
            let p = (c..n).find(|&r| !a[r][c].is_zero())?;
            a.swap(p, c);
            let inv = Q::one() / &a[c][c];
            for x in a[c].iter_mut() {
                *x *= &inv;
            }
            for r in 0..n {
                if r != c && !a[r][c].is_zero() {
                    let f = a[r][c].clone();
                    for k in 0..2 * n {
                        let t = &f * &a[c][k];
                        a[r][k] -= t;
                    }
                }
            }
        }
        let rows: Vec<Vec<Q>> = a.into_iter().map(|r| r[n..].to_vec()).collect();
        Some(Matrix::from_rows(&rows, n))
    }
}

/// Reduced row echelon form. Returns the nonzero rows and their pivot columns.
pub fn rref(rows: &[Vec<Q>], n: usize) -> (Vec<Vec<Q>>, Vec<usize>) {
    let mut a: Vec<Vec<Q>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        if r >= a.len() {
            break;
        }
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(p, r);
        let inv = Q::one() / &a[r][c];
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..a.len() {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for k in c..n {
                    let t = &f * &a[r][k];
                    a[i][k] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    (a, pivots)
}

pub fn rank(rows: &[Vec<Q>], n: usize) -> usize {
    rref(rows, n).0.len()
}

/// Basis of `{x : row·x = 0 for every row}`, in the standard free-variable form.
pub fn nullspace(rows: &[Vec<Q>], n: usize) -> Vec<Vec<Q>> {
    let (r, pivots) = rref(rows, n);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); n];
            v[f] = Q::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -r[i][f].clone();
            }
            v
        })
        .collect()
}

/// Some solution of `A x = b` (A given by rows), if any.
pub fn solve(rows: &[Vec<Q>], b: &[Q], n: usize) -> Option<Vec<Q>> {
    let aug: Vec<Vec<Q>> = rows
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut v = r.clone();
            v.push(bi.clone());
            v
        })
        .collect();
    let (r, pivots) = rref(&aug, n + 1);
    if pivots.contains(&n) {
        return None;
    }
    let mut x = vec![Q::zero(); n];
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = r[i][n].clone();
    }
    Some(x)
}

/// Coordinates of `v` in the (independent) family `basis`, if `v` lies in its span.
pub fn coordinates(basis: &[Vec<Q>], v: &[Q]) -> Option<Vec<Q>> {
    let n = v.len();
    let k = basis.len();
    let rows: Vec<Vec<Q>> = (0..n).map(|i| basis.iter().map(|b| b[i].clone()).collect()).collect();
    solve(&rows, v, k)
}

pub fn in_span(basis: &[Vec<Q>], v: &[Q]) -> bool {
    if v.iter().all(|x| x.is_zero()) {
        return true;
    }
    if basis.is_empty() {
        return false;
    }
    coordinates(basis, v).is_some()
}

/// Maximal independent subfamily, keeping the earliest vectors.
pub fn independent_subset(vs: &[Vec<Q>], n: usize) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut acc: Vec<Vec<Q>> = Vec::new();
    for (i, v) in vs.iter().enumerate() {
        let mut trial = acc.clone();
        trial.push(v.clone());
        if rank(&trial, n) > acc.len() {
            acc = rref(&trial, n).0;
            chosen.push(i);
        }
    }
    chosen
}

/// Exact LDLᵀ: true when every pivot is strictly positive.
pub fn is_positive_definite(g: &Matrix) -> bool {
    if !g.is_symmetric() {
        return false;
    }
    let n = g.rows;
    let mut a = g.row_vecs();
    for c in 0..n {
        if !a[c][c].is_positive() {
            return false;
        }
        let piv = a[c][c].clone();
        for r in c + 1..n {
            if a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] / &piv;
            for k in c..n {
                let t = &f * &a[c][k];
                a[r][k] -= t;
            }
        }
    }
    true
}

pub fn sub(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[Q], s: &Q) -> Vec<Q> {
    a.iter().map(|x| x * s).collect()
}

pub fn neg(a: &[Q]) -> Vec<Q> {
    a.iter().map(|x| -x).collect()
}

pub fn is_zero_vec(a: &[Q]) -> bool {
    a.iter().all(|x| x.is_zero())
}

/// `a*x + b*y`.
pub fn lincomb(a: &Q, x: &[Q], b: &Q, y: &[Q]) -> Vec<Q> {
    x.iter().zip(y).map(|(u, v)| a * u + b * v).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{q, qq};

    fn m(rows: &[&[i64]]) -> Matrix {
        let r: Vec<Vec<Q>> = rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
        let c = r[0].len();
        Matrix::from_rows(&r, c)
    }

    #[test]
    fn det_and_inverse() {
        let a = m(&[&[2, 1], &[1, 3]]);
        assert_eq!(a.det(), q(5));
        let inv = a.inverse().unwrap();
        assert!(a.mul(&inv).is_identity());
        assert_eq!(*inv.get(0, 0), qq(3, 5));
        assert!(m(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn nullspace_dim() {
        let a = m(&[&[1, 1, 1]]);
        let ns = nullspace(&a.row_vecs(), 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(a.mul_vec(v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn solve_and_span() {
        let basis = vec![vec![q(1), q(1), q(0)], vec![q(0), q(1), q(1)]];
        assert!(in_span(&basis, &[q(1), q(2), q(1)]));
        assert!(!in_span(&basis, &[q(1), q(0), q(0)]));
        assert_eq!(coordinates(&basis, &[q(1), q(2), q(1)]).unwrap(), vec![q(1), q(1)]);
    }

    #[test]
    fn positive_definite() {
        assert!(is_positive_definite(&m(&[&[2, 1], &[1, 2]])));
        assert!(!is_positive_definite(&m(&[&[1, 2], &[2, 1]])));
        assert!(!is_positive_definite(&m(&[&[1, 0], &[1, 1]])));
    }
}
