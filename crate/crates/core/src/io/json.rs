//! JSON forms of cones and fans. Rationals are `"p/q"` strings; bare integers are
//! accepted on input.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::arith::{RatString, Q};
use crate::cones::{Cone, Space};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

type Rows = Vec<Vec<RatString>>;

/// `{"dim": n, "gram"?, "inequalities": [[..]], "equalities": [[..]], "generators"?, "lineality"?}`.
/// Inequalities and equalities are normals: `⟨a, H⟩ ≥ 0`, `⟨e, H⟩ = 0`.
#[derive(Serialize, Deserialize, Default)]
pub struct ConeJson {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gram: Option<Rows>,
    #[serde(default)]
    pub inequalities: Rows,
    #[serde(default)]
    pub equalities: Rows,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Rows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lineality: Option<Rows>,
}

fn unwrap_rows(r: &Rows, n: usize, what: &str) -> Result<Vec<Vec<Q>>> {
    r.iter()
        .map(|row| {
            if row.len() != n {
                return Err(Error::Input(format!("{what}: row of length {} in dimension {n}", row.len())));
            }
            Ok(row.iter().map(|x| x.0.clone()).collect())
        })
        .collect()
}

fn wrap_rows(r: &[Vec<Q>]) -> Rows {
    r.iter().map(|row| row.iter().cloned().map(RatString).collect()).collect()
}

impl ConeJson {
    pub fn to_cone(&self) -> Result<Cone> {
        let n = self.dim;
        let space = match &self.gram {
            Some(g) => Space::with_gram(Matrix::from_rows(&unwrap_rows(g, n, "gram")?, n))?,
            None => Space::euclidean(n),
        };
        let has_h = !self.inequalities.is_empty() || !self.equalities.is_empty();
        let from_v = match (&self.generators, &self.lineality) {
            (None, None) => None,
            (g, l) => {
                let g = g.as_ref().map(|g| unwrap_rows(g, n, "generators")).transpose()?.unwrap_or_default();
                let l = l.as_ref().map(|l| unwrap_rows(l, n, "lineality")).transpose()?.unwrap_or_default();
                Some(Cone::from_generators(&space, &g, &l)?)
            }
        };
        let from_h = (has_h || from_v.is_none())
            .then(|| {
                Cone::from_halfspaces(
                    &space,
                    &unwrap_rows(&self.inequalities, n, "inequalities")?,
                    &unwrap_rows(&self.equalities, n, "equalities")?,
                )
            })
            .transpose()?;
        match (from_h, from_v) {
            (Some(h), Some(v)) if h != v => {
                Err(Error::Input("generators and inequalities describe different cones".into()))
            }
            (Some(h), _) => Ok(h),
            (None, Some(v)) => Ok(v),
            (None, None) => unreachable!("one representation is always built"),
        }
    }

    pub fn from_cone(c: &Cone) -> Self {
        let space = c.space();
        let eq: Vec<Vec<Q>> = c.equalities().iter().map(|e| space.raise(e)).collect();
        ConeJson {
            dim: c.ambient_dim(),
            gram: (!space.is_standard()).then(|| wrap_rows(&space.gram_matrix().row_vecs())),
            inequalities: wrap_rows(c.facet_normals()),
            equalities: wrap_rows(&eq),
            generators: Some(wrap_rows(c.rays())),
            lineality: Some(wrap_rows(c.lineality())),
        }
    }
}

pub fn cone_from_json(s: &str) -> Result<Cone> {
    serde_json::from_str::<ConeJson>(s)?.to_cone()
}

pub fn cone_to_json(c: &Cone) -> String {
    to_pretty(&ConeJson::from_cone(c))
}

/// `{"cells": [cone, ...]}`, or a bare list of cones.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum FanJson {
    Wrapped { cells: Vec<ConeJson> },
    Bare(Vec<ConeJson>),
}

pub fn fan_from_json(s: &str) -> Result<Vec<Arc<Cone>>> {
    let cells = match serde_json::from_str::<FanJson>(s)? {
        FanJson::Wrapped { cells } | FanJson::Bare(cells) => cells,
    };
    cells.iter().map(|c| c.to_cone().map(Arc::new)).collect()
}

pub fn fan_to_json(cells: &[Arc<Cone>]) -> String {
    to_pretty(&FanJson::Wrapped { cells: cells.iter().map(|c| ConeJson::from_cone(c)).collect() })
}

/// Pretty JSON with a trailing newline; key order follows the struct definitions, so
/// output is byte-stable.
pub fn to_pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q;

    #[test]
    fn cone_round_trip() {
        let s = r#"{"dim": 2, "inequalities": [["1", "0"], [0, "1/2"]]}"#;
        let c = cone_from_json(s).unwrap();
        assert_eq!(c.rays().len(), 2);
        let back = cone_from_json(&cone_to_json(&c)).unwrap();
        assert_eq!(back, c);
        let g = r#"{"dim": 2, "gram": [["2","1"],["1","2"]], "generators": [["1","0"]], "lineality": [["0","1"]]}"#;
        let c = cone_from_json(g).unwrap();
        assert_eq!(c.lineality_dim(), 1);
        assert_eq!(cone_from_json(&cone_to_json(&c)).unwrap(), c);
    }

    #[test]
    fn inconsistent_or_malformed() {
        let s = r#"{"dim": 2, "inequalities": [["1","0"]], "generators": [["1","0"]]}"#;
        assert!(matches!(cone_from_json(s), Err(Error::Input(_))));
        assert!(matches!(cone_from_json(r#"{"dim": 2, "inequalities": [["1"]]}"#), Err(Error::Input(_))));
        assert!(matches!(cone_from_json(r#"{"dim": 2, "inequalities": [["x","1"]]}"#), Err(Error::Json(_))));
        assert!(cone_from_json("{").is_err());
    }

    #[test]
    fn fan_round_trip() {
        let s = Space::euclidean(1);
        let cells = vec![
            Arc::new(Cone::from_generators(&s, &[vec![q(1)]], &[]).unwrap()),
            Arc::new(Cone::from_generators(&s, &[vec![q(-1)]], &[]).unwrap()),
        ];
        let back = fan_from_json(&fan_to_json(&cells)).unwrap();
        assert_eq!(back, cells);
        assert_eq!(fan_from_json(r#"[{"dim": 1, "generators": [["1"]]}]"#).unwrap().len(), 1);
    }
}
