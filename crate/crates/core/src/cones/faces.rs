//! Face lattice enumeration and angle cones.

use std::collections::BTreeSet;
use std::sync::Arc;

use super::cone::Cone;
use crate::error::{Error, Result};

/// A face of a cone: the set of facets tight on it and the face as a cone.
#[derive(Clone, Debug)]
pub struct Face {
    /// Bit i set iff facet i of the parent is tight on the face.
    pub active: u128,
    /// Bit j set iff ray j of the parent lies in the face.
    pub ray_mask: u128,
    pub cone: Arc<Cone>,
}

impl Face {
    pub fn dim(&self) -> usize {
        self.cone.dim()
    }

    pub fn active_indices(&self) -> Vec<usize> {
        (0..128).filter(|i| self.active >> i & 1 == 1).collect()
    }

    /// `F ⊆ G` as faces of the same parent.
    pub fn is_subface_of(&self, g: &Face) -> bool {
        self.active & g.active == g.active
    }
}

fn closure(c: &Cone, active: u128) -> (u128, u128) {
    let inc = c.incidence();
    let nr = c.rays().len();
    let mut rays = 0u128;
    for j in 0..nr {
        if (0..inc.len()).all(|i| active >> i & 1 == 0 || inc[i][j]) {
            rays |= 1 << j;
        }
    }
    let mut act = 0u128;
    for (i, row) in inc.iter().enumerate() {
        if (0..nr).all(|j| rays >> j & 1 == 0 || row[j]) {
            act |= 1 << i;
        }
    }
    (act, rays)
}

/// All faces ordered by dimension, then by active set.
pub(crate) fn enumerate(c: &Cone) -> Result<Vec<Face>> {
    let nf = c.facets().len();
    let nr = c.rays().len();
    if nf > 128 || nr > 128 {
        return Err(Error::TooLarge(nf.max(nr)));
    }
    let mut seen: BTreeSet<u128> = BTreeSet::new();
    let mut found: Vec<(u128, u128)> = Vec::new();
    let start = closure(c, 0);
    seen.insert(start.0);
    found.push(start);
    let mut k = 0;
    while k < found.len() {
        let (act, _) = found[k];
        for i in 0..nf {
            if act >> i & 1 == 1 {
                continue;
            }
            let next = closure(c, act | 1 << i);
            if seen.insert(next.0) {
                found.push(next);
            }
        }
        k += 1;
    }
    let mut faces: Vec<Face> = found
        .into_iter()
        .map(|(active, ray_mask)| {
            let mask: Vec<bool> = (0..nr).map(|j| ray_mask >> j & 1 == 1).collect();
            Face { active, ray_mask, cone: Arc::new(c.face_cone(&mask)) }
        })
        .collect();
    faces.sort_by(|a, b| (a.dim(), a.active).cmp(&(b.dim(), b.active)));
    Ok(faces)
}

/// A face together with the cones the indicator calculus needs.
#[derive(Clone, Debug)]
pub struct FaceData {
    pub face: Face,
    /// `A(F, C)`.
    pub angle: Arc<Cone>,
    /// `F^∨`.
    pub dual: Arc<Cone>,
    /// `A(F, C)^∨`.
    pub angle_dual: Arc<Cone>,
}

impl FaceData {
    pub fn cone(&self) -> &Arc<Cone> {
        &self.face.cone
    }

    pub fn dim(&self) -> usize {
        self.face.dim()
    }
}

pub(crate) fn face_data(c: &Cone) -> Result<Vec<FaceData>> {
    Ok(c.faces()?
        .iter()
        .map(|f| {
            let angle = Arc::new(angle_cone(c, f));
            FaceData {
                face: f.clone(),
                angle_dual: angle.dual_arc(),
                angle,
                dual: f.cone.dual_arc(),
            }
        })
        .collect())
}

/// `ε_C^F = (−1)^{dim V_C − dim V_F}`.
pub fn eps(c_dim: usize, f_dim: usize) -> i64 {
    if (c_dim + f_dim) % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `A(F, C)`: the cone cut out by the equalities of `C` and the facets active on `F`.
pub fn angle_cone(c: &Cone, f: &Face) -> Cone {
    let ineqs: Vec<_> = (0..c.facets().len())
        .filter(|&i| f.active >> i & 1 == 1)
        .map(|i| c.facets()[i].clone())
        .collect();
    Cone::from_covectors(c.space(), &ineqs, c.equalities()).expect("angle cone")
}

/// `A(F, C)` for a face given as a cone; errors when `f` is not a face of `c`.
pub fn angle_cone_of(c: &Cone, f: &Cone) -> Result<Cone> {
    let idx = c.face_index(f)?.ok_or(Error::NotAFace)?;
    Ok(angle_cone(c, &c.faces()?[idx]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{q, Q};
    use crate::cones::space::Space;

    fn v(x: &[i64]) -> Vec<Q> {
        x.iter().map(|&a| q(a)).collect()
    }

    fn euler(c: &Cone) -> i64 {
        c.faces().unwrap().iter().map(|f| eps(c.dim(), f.dim())).sum()
    }

    #[test]
    fn quadrant_faces() {
        let s = Space::euclidean(2);
        let c = Cone::from_halfspaces(&s, &[v(&[1, 0]), v(&[0, 1])], &[]).unwrap();
        let f = c.faces().unwrap();
        assert_eq!(f.len(), 4);
        assert_eq!(f[0].dim(), 0);
        assert_eq!(f[3].dim(), 2);
        assert_eq!(euler(&c), 0);
    }

    #[test]
    fn line_and_half_plane_faces() {
        let s = Space::euclidean(2);
        let line = Cone::subspace(&s, &[v(&[1, 0])]).unwrap();
        assert_eq!(line.faces().unwrap().len(), 1);
        assert_eq!(euler(&line), 1);
        let h = Cone::from_halfspaces(&s, &[v(&[1, 0])], &[]).unwrap();
        let f = h.faces().unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(*f[0].cone, Cone::subspace(&s, &[v(&[0, 1])]).unwrap());
    }

    #[test]
    fn angle_cone_extremes() {
        let s = Space::euclidean(2);
        let c = Cone::from_generators(&s, &[v(&[1, 0]), v(&[1, 2])], &[]).unwrap();
        let faces = c.faces().unwrap();
        assert_eq!(angle_cone(&c, &faces[0]), c);
        assert_eq!(angle_cone(&c, faces.last().unwrap()), Cone::full(&s));
        // a ray face gives a half-plane through that ray
        let a = angle_cone(&c, &faces[1]);
        assert_eq!(a.dim(), 2);
        assert_eq!(a.lineality_dim(), 1);
        assert!(a.lineality_space().contains(&faces[1].cone.rays()[0]));
    }

    #[test]
    fn not_a_face() {
        let s = Space::euclidean(2);
        let c = Cone::from_halfspaces(&s, &[v(&[1, 0]), v(&[0, 1])], &[]).unwrap();
        let diag = Cone::from_generators(&s, &[v(&[1, 1])], &[]).unwrap();
        assert!(matches!(angle_cone_of(&c, &diag), Err(Error::NotAFace)));
    }
}
