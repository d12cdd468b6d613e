use serde::{Deserialize, Serialize};

use super::algebra::LieAlgebra;
use super::types::{AlgebraVector, LinearMapOnAlgebra};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    Automorphism,
    AntiAutomorphism,
    Neither,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub kind: MapKind,
    /// `max |σ[e_i, e_j] − [σe_i, σe_j]|`
    pub automorphism_residual: f64,
    /// `max |σ[e_i, e_j] − [σe_j, σe_i]|`
    pub anti_automorphism_residual: f64,
}

/// Classifies `σ` as an automorphism, anti-automorphism or neither.
///
/// When both hold (abelian algebras) the map is reported as an automorphism.
pub fn classify_map(
    alg: &LieAlgebra,
    sigma: &LinearMapOnAlgebra,
    tol: f64,
) -> Result<Classification> {
    let n = alg.dim();
    if sigma.dim() != n {
        return Err(Error::Argument(format!(
            "map is {0}x{0}, algebra has dimension {n}",
            sigma.dim()
        )));
    }
    if !(sigma.matrix().determinant().abs() > 1e-12) {
        return Err(Error::Argument("map is not invertible".into()));
    }
    let images: Vec<AlgebraVector> = (0..n)
        .map(|i| sigma.apply(&AlgebraVector::basis(n, i)))
        .collect();
    let mut auto_res = 0.0_f64;
    let mut anti_res = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let lhs = sigma.apply(&alg.bracket(&AlgebraVector::basis(n, i), &AlgebraVector::basis(n, j))?);
            let fwd = alg.bracket(&images[i], &images[j])?;
            let rev = alg.bracket(&images[j], &images[i])?;
            auto_res = auto_res.max(lhs.distance(&fwd));
            anti_res = anti_res.max(lhs.distance(&rev));
        }
    }
    let kind = if auto_res <= tol {
        MapKind::Automorphism
    } else if anti_res <= tol {
        MapKind::AntiAutomorphism
    } else {
        MapKind::Neither
    };
    Ok(Classification {
        kind,
        automorphism_residual: auto_res,
        anti_automorphism_residual: anti_res,
    })
}
