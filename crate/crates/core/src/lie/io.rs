//! JSON group-definition files.
//!
//! ```json
//! {"name": "heis", "dim": 3,
//!  "structure_constants": [[0, 1, 2, 1.0]],
//!  "representation": {"size": 3, "matrices": [[[0,1,0],[0,0,0],[0,0,0]], ...]},
//!  "labels": ["e1", "e2", "e3"]}
//! ```
//!
//! Indices are 0-based and only nonzero entries are listed; the loader fills
//! in the antisymmetric partner of each entry. The optional `hamiltonians`,
//! `symmetries` and `semidirect` sections are interpreted by the catalog.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::algebra::{LieAlgebra, MatrixRepresentation};
use crate::error::{Error, Result};

/// An `m × m` matrix given either as nested rows or as a flat row-major list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixJson {
    Rows(Vec<Vec<f64>>),
    Flat(Vec<f64>),
}

impl MatrixJson {
    pub fn from_matrix(m: &DMatrix<f64>) -> Self {
        MatrixJson::Rows(
            (0..m.nrows())
                .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
                .collect(),
        )
    }

    pub fn to_matrix(&self, size: usize, what: &str) -> Result<DMatrix<f64>> {
        match self {
            MatrixJson::Rows(rows) => {
                if rows.len() != size || rows.iter().any(|r| r.len() != size) {
                    return Err(Error::Validation(format!("{what}: expected a {size}x{size} matrix")));
                }
                Ok(DMatrix::from_fn(size, size, |r, c| rows[r][c]))
            }
            MatrixJson::Flat(v) => {
                if v.len() != size * size {
                    return Err(Error::Validation(format!(
                        "{what}: expected {} row-major entries, got {}",
                        size * size,
                        v.len()
                    )));
                }
                Ok(DMatrix::from_row_slice(size, size, v))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepresentationJson {
    pub size: usize,
    pub matrices: Vec<MatrixJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianJson {
    pub name: String,
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub frame: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryJson {
    pub name: String,
    pub matrix: MatrixJson,
    /// `"builtin:<id>"` or `"exp_conjugation"`.
    pub s_map: String,
    /// Conjugating matrix for `"builtin:conjugation"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conjugator: Option<MatrixJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SemidirectJson {
    pub split: Vec<usize>,
    pub b: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupFile {
    pub name: String,
    pub dim: usize,
    pub structure_constants: Vec<(usize, usize, usize, f64)>,
    pub representation: RepresentationJson,
    #[serde(default)]
    pub labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub hamiltonians: Vec<HamiltonianJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub symmetries: Vec<SymmetryJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semidirect: Option<SemidirectJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generic_stabilizer_connected: Option<bool>,
    /// Stratum classifier id (`"se2"` or `"sh2"`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strata: Option<String>,
    /// Defining-variety check id (`"unitriangular"`, `"se2"`, `"sh2"`, `"so3"`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifold: Option<String>,
}

impl GroupFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("group file: {e}")))
    }

    /// Builds and validates the algebra (Jacobi, homomorphism, faithfulness).
    pub fn algebra(&self) -> Result<LieAlgebra> {
        let size = self.representation.size;
        let matrices = self
            .representation
            .matrices
            .iter()
            .enumerate()
            .map(|(i, m)| m.to_matrix(size, &format!("representation matrix {i}")))
            .collect::<Result<Vec<_>>>()?;
        let rep = MatrixRepresentation::new(size, matrices)?;
        LieAlgebra::new(
            self.name.clone(),
            self.dim,
            &self.structure_constants,
            self.labels.clone(),
            rep,
        )
    }

    /// Base section of a file describing `alg`.
    pub fn from_algebra(alg: &LieAlgebra) -> Self {
        GroupFile {
            name: alg.name().to_string(),
            dim: alg.dim(),
            structure_constants: alg.sparse_constants(),
            representation: RepresentationJson {
                size: alg.rep_size(),
                matrices: alg
                    .representation()
                    .matrices()
                    .iter()
                    .map(MatrixJson::from_matrix)
                    .collect(),
            },
            labels: alg.labels().to_vec(),
            hamiltonians: vec![],
            symmetries: vec![],
            semidirect: None,
            generic_stabilizer_connected: None,
            strata: None,
            manifold: None,
        }
    }
}
