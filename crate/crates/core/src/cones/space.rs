//! Rational Euclidean spaces and their subspaces.

use std::sync::Arc;

use num_traits::Zero;

use crate::arith::{dot, Q};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

#[derive(Clone, Debug)]
struct GramData {
    g: Matrix,
    inv: Matrix,
}

/// `R^n` with a positive-definite rational inner product (standard by default).
#[derive(Clone, Debug)]
pub struct Space {
    dim: usize,
    gram: Option<Arc<GramData>>,
}

impl PartialEq for Space {
    fn eq(&self, o: &Self) -> bool {
        self.dim == o.dim && self.gram_matrix() == o.gram_matrix()
    }
}
impl Eq for Space {}

impl Space {
    pub fn euclidean(dim: usize) -> Self {
        Space { dim, gram: None }
    }

    /// Certifies positive-definiteness by exact LDLᵀ.
    pub fn with_gram(g: Matrix) -> Result<Self> {
        if g.rows != g.cols {
            return Err(Error::Dimension { expected: g.rows, got: g.cols });
        }
        if !linalg::is_positive_definite(&g) {
            return Err(Error::NotPositiveDefinite);
        }
        if g.is_identity() {
            return Ok(Self::euclidean(g.rows));
        }
        let inv = g.inverse().ok_or(Error::NotPositiveDefinite)?;
        Ok(Space { dim: g.rows, gram: Some(Arc::new(GramData { g, inv })) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_standard(&self) -> bool {
        self.gram.is_none()
    }

    pub fn gram_matrix(&self) -> Matrix {
        match &self.gram {
            Some(d) => d.g.clone(),
            None => Matrix::identity(self.dim),
        }
    }

    pub fn inner(&self, a: &[Q], b: &[Q]) -> Q {
        match &self.gram {
            None => dot(a, b),
            Some(d) => dot(a, &d.g.mul_vec(b)),
        }
    }

    pub fn norm2(&self, a: &[Q]) -> Q {
        self.inner(a, a)
    }

    /// Vector to covector: `v ↦ G v`, so that `covector · x = ⟨v, x⟩`.
    pub fn lower(&self, v: &[Q]) -> Vec<Q> {
        match &self.gram {
            None => v.to_vec(),
            Some(d) => d.g.mul_vec(v),
        }
    }

    /// Covector to vector: `a ↦ G⁻¹ a`.
    pub fn raise(&self, a: &[Q]) -> Vec<Q> {
        match &self.gram {
            None => a.to_vec(),
            Some(d) => d.inv.mul_vec(a),
        }
    }

    pub fn check(&self, v: &[Q]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::Dimension { expected: self.dim, got: v.len() });
        }
        Ok(())
    }

    pub fn zero_vector(&self) -> Vec<Q> {
        vec![Q::zero(); self.dim]
    }

    pub fn subspace(&self, vectors: &[Vec<Q>]) -> Subspace {
        Subspace::new(self.clone(), vectors)
    }

    pub fn whole(&self) -> Subspace {
        let basis: Vec<Vec<Q>> = Matrix::identity(self.dim).row_vecs();
        Subspace::new(self.clone(), &basis)
    }
}

/// A linear subspace with its cached orthogonal projection `B(BᵀGB)⁻¹BᵀG`.
#[derive(Clone, Debug)]
pub struct Subspace {
    space: Space,
    basis: Vec<Vec<Q>>,
    proj: Matrix,
}

impl PartialEq for Subspace {
    fn eq(&self, o: &Self) -> bool {
        self.space == o.space && self.basis == o.basis
    }
}
impl Eq for Subspace {}

impl Subspace {
    /// Spanned by `vectors` (not necessarily independent). The stored basis is the RREF.
    pub fn new(space: Space, vectors: &[Vec<Q>]) -> Self {
        let n = space.dim();
        let basis = linalg::rref(vectors, n).0;
        let proj = if basis.is_empty() {
            Matrix::zeros(n, n)
        } else {
            let b = Matrix::from_cols(&basis, n);
            let gb: Vec<Vec<Q>> = basis.iter().map(|v| space.lower(v)).collect();
            let gbm = Matrix::from_rows(&gb, n); // (GB)ᵀ = BᵀG
            let m = gbm.mul(&b);
            let inv = m.inverse().expect("Gram restricted to a subspace is invertible");
            b.mul(&inv).mul(&gbm)
        };
        Subspace { space, basis, proj }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Q>] {
        &self.basis
    }

    pub fn projection_matrix(&self) -> &Matrix {
        &self.proj
    }

    pub fn project(&self, h: &[Q]) -> Vec<Q> {
        if self.basis.is_empty() {
            return vec![Q::zero(); h.len()];
        }
        self.proj.mul_vec(h)
    }

    /// Component in the orthogonal complement.
    pub fn reject(&self, h: &[Q]) -> Vec<Q> {
        linalg::sub(h, &self.project(h))
    }

    pub fn contains(&self, h: &[Q]) -> bool {
        linalg::in_span(&self.basis, h)
    }

    pub fn orthogonal_complement(&self) -> Subspace {
        let rows: Vec<Vec<Q>> = self.basis.iter().map(|b| self.space.lower(b)).collect();
        let ns = linalg::nullspace(&rows, self.space.dim());
        Subspace::new(self.space.clone(), &ns)
    }

    pub fn intersect(&self, o: &Subspace) -> Subspace {
        let n = self.space.dim();
        let mut rows = self.annihilator();
        rows.extend(o.annihilator());
        Subspace::new(self.space.clone(), &linalg::nullspace(&rows, n))
    }

    /// Covectors vanishing on the subspace, as an RREF basis.
    pub fn annihilator(&self) -> Vec<Vec<Q>> {
        let n = self.space.dim();
        linalg::rref(&linalg::nullspace(&self.basis, n), n).0
    }

    pub fn is_subspace_of(&self, o: &Subspace) -> bool {
        self.basis.iter().all(|b| o.contains(b))
    }
}

/// Projection of `h` orthogonally onto the subspace (free function form).
pub fn project(h: &[Q], s: &Subspace) -> Result<Vec<Q>> {
    s.space().check(h)?;
    Ok(s.project(h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{q, qq};
    use crate::linalg::Matrix;

    fn v(x: &[i64]) -> Vec<Q> {
        x.iter().map(|&a| q(a)).collect()
    }

    #[test]
    fn projection_examples() {
        let s = Space::euclidean(2);
        let xaxis = s.subspace(&[v(&[1, 0])]);
        assert_eq!(xaxis.project(&v(&[3, 4])), v(&[3, 0]));
        let all = s.whole();
        assert_eq!(all.project(&v(&[3, 4])), v(&[3, 4]));
        let s3 = Space::euclidean(3);
        let plane = s3.subspace(&[v(&[1, 0, 0]), v(&[0, 1, 0])]);
        let h = vec![qq(1, 2), qq(-1, 2), q(0)];
        assert_eq!(plane.project(&h), h);
    }

    #[test]
    fn projection_idempotent_self_adjoint_with_gram() {
        let g = Matrix::from_rows(&[v(&[2, 1]), v(&[1, 3])], 2);
        let s = Space::with_gram(g).unwrap();
        let line = s.subspace(&[v(&[1, 1])]);
        let p = line.projection_matrix();
        assert_eq!(p.mul(p), *p);
        let h = v(&[3, -7]);
        let hp = line.project(&h);
        let hr = line.reject(&h);
        assert!(s.inner(&hp, &hr).is_zero());
        let perp = line.orthogonal_complement();
        assert_eq!(perp.dim(), 1);
        assert!(perp.contains(&hr));
    }

    #[test]
    fn gram_rejected_when_indefinite() {
        let g = Matrix::from_rows(&[v(&[1, 2]), v(&[2, 1])], 2);
        assert!(Space::with_gram(g).is_err());
    }
}
