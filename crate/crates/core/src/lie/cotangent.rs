use serde::{Deserialize, Serialize};

use super::algebra::LieAlgebra;
use super::types::{Covector, GroupPoint};
use crate::error::{Error, Result};

/// Trivialization in which a cotangent covector is expressed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

/// A point of `T*G` as (group element, covector, trivialization side).
#[derive(Clone, Debug, PartialEq)]
pub struct CotangentPoint {
    g: GroupPoint,
    covector: Covector,
    side: Side,
}

impl CotangentPoint {
    pub fn new(g: GroupPoint, covector: Covector, side: Side) -> Self {
        Self { g, covector, side }
    }

    pub fn at_identity(alg: &LieAlgebra, covector: Covector, side: Side) -> Self {
        Self::new(GroupPoint::identity(alg.rep_size()), covector, side)
    }

    pub fn g(&self) -> &GroupPoint {
        &self.g
    }

    pub fn covector(&self) -> &Covector {
        &self.covector
    }

    pub fn side(&self) -> Side {
        self.side
    }

    /// The same cotangent vector expressed in the other trivialization.
    pub fn transported(&self, alg: &LieAlgebra, side: Side) -> Result<Covector> {
        match (self.side, side) {
            (a, b) if a == b => Ok(self.covector.clone()),
            // right q at g ↦ left p with p(ξ) = q(g ξ g⁻¹)
            (Side::Right, Side::Left) => alg.group_ad_star(&self.g, &self.covector),
            // left p at g ↦ right q with q(η) = p(g⁻¹ η g)
            _ => alg.group_ad_star(&self.g.inverse(), &self.covector),
        }
    }
}

/// Distance between two cotangent points, transporting `b` to `a`'s side.
///
/// The base-point distance always enters the residual; covectors are
/// compared after transport at `b`'s base point.
pub fn compare_cotangent(alg: &LieAlgebra, a: &CotangentPoint, b: &CotangentPoint) -> Result<f64> {
    if a.g.size() != b.g.size() || a.covector.dim() != b.covector.dim() {
        return Err(Error::Argument("cotangent points belong to different groups".into()));
    }
    let base = a.g.distance(&b.g);
    let cov = b.transported(alg, a.side)?;
    Ok(base.max(a.covector.distance(&cov)))
}

/// Momentum maps `(J_L, J_R)` of the left and right actions of `G` on `T*G`.
///
/// For a left-trivialized `(g, p)`: `J_R = p`, `J_L = Ad*_{g⁻¹} p`.
/// For a right-trivialized `(g, q)`: `J_L = q`, `J_R = Ad*_g q`.
pub fn momentum_maps(alg: &LieAlgebra, lambda: &CotangentPoint) -> Result<(Covector, Covector)> {
    match lambda.side {
        Side::Left => Ok((
            lambda.transported(alg, Side::Right)?,
            lambda.covector.clone(),
        )),
        Side::Right => Ok((
            lambda.covector.clone(),
            lambda.transported(alg, Side::Left)?,
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::lie::AlgebraVector;

    fn se2() -> LieAlgebra {
        catalog::builtin("se2").unwrap().algebra().clone()
    }

    #[test]
    fn self_comparison_is_zero() {
        let alg = se2();
        let g = alg.group_exp(&AlgebraVector::new(&[0.3, -1.2, 0.7])).unwrap();
        let x = CotangentPoint::new(g, Covector::new(&[0.1, 0.2, 0.3]), Side::Left);
        assert_eq!(compare_cotangent(&alg, &x, &x).unwrap(), 0.0);
    }

    #[test]
    fn sides_agree_at_identity() {
        let alg = se2();
        let p = Covector::new(&[0.4, -0.1, 2.0]);
        let a = CotangentPoint::at_identity(&alg, p.clone(), Side::Left);
        let b = CotangentPoint::at_identity(&alg, p, Side::Right);
        assert!(compare_cotangent(&alg, &a, &b).unwrap() < 1e-15);
    }

    #[test]
    fn transport_formula_matches() {
        let alg = se2();
        let g = alg.group_exp(&AlgebraVector::new(&[1.1, 0.4, -0.9])).unwrap();
        let p = Covector::new(&[0.5, 0.25, -0.75]);
        // q(η) := p(g⁻¹ η g), built directly from matrices.
        let gi = g.inverse();
        let q: Vec<f64> = (0..3)
            .map(|k| {
                let eta = alg.rep_matrix(&AlgebraVector::basis(3, k));
                let back = gi.matrix() * eta * g.matrix();
                p.pair(&alg.project(&back).unwrap())
            })
            .collect();
        let a = CotangentPoint::new(g.clone(), p, Side::Left);
        let b = CotangentPoint::new(g, Covector::from(q), Side::Right);
        assert!(compare_cotangent(&alg, &a, &b).unwrap() < 1e-12);
        assert!(compare_cotangent(&alg, &b, &a).unwrap() < 1e-12);
    }

    #[test]
    fn momentum_maps_at_identity() {
        let alg = se2();
        let p = Covector::new(&[0.4, -0.1, 2.0]);
        let (jl, jr) = momentum_maps(&alg, &CotangentPoint::at_identity(&alg, p.clone(), Side::Left)).unwrap();
        assert!(jl.distance(&p) < 1e-15 && jr.distance(&p) < 1e-15);
    }

    #[test]
    fn momentum_left_matches_group_ad_star() {
        let alg = se2();
        let g = alg.group_exp(&AlgebraVector::new(&[-0.2, 0.8, 1.3])).unwrap();
        let p = Covector::new(&[0.3, 0.6, -0.2]);
        let (jl, _) = momentum_maps(&alg, &CotangentPoint::new(g.clone(), p.clone(), Side::Left)).unwrap();
        let direct = alg.group_ad_star(&g.inverse(), &p).unwrap();
        assert!(jl.distance(&direct) < 1e-14);
    }
}
