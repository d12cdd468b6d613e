use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::lie::GroupPoint;
use crate::symmetry::{group_s, Case, Direction, VerifiedSymmetry};

use super::GroupBundle;

/// `G = G1 ⋉_b G2` for affine groups `[[B, v], [0, 1]]`: `G1` is the
/// translation subgroup `R^k`, `G2` the linear part, and `b(B)` acts on
/// translations by `v ↦ B v`.
#[derive(Clone, Debug, PartialEq)]
pub struct SemidirectStructure {
    k: usize,
}

impl SemidirectStructure {
    /// Affine structure on `(k + 1) × (k + 1)` matrices.
    pub fn affine(k: usize) -> Self {
        Self { k }
    }

    /// Coordinate dimensions `[dim G1, dim G2]` for a planar affine group.
    pub fn split(&self) -> Vec<usize> {
        vec![self.k, 1]
    }

    pub fn spec(&self) -> &'static str {
        "builtin:affine"
    }

    fn check(&self, g: &GroupPoint) -> Result<()> {
        if g.size() != self.k + 1 {
            return Err(Error::Argument(format!(
                "expected a {0}x{0} affine matrix, got {1}x{1}",
                self.k + 1,
                g.size()
            )));
        }
        Ok(())
    }

    /// `g = g1 · g2` with `g1` a translation and `g2` linear.
    pub fn decompose(&self, g: &GroupPoint) -> Result<(GroupPoint, GroupPoint)> {
        self.check(g)?;
        let k = self.k;
        let m = g.matrix();
        let mut g1 = DMatrix::identity(k + 1, k + 1);
        let mut g2 = DMatrix::identity(k + 1, k + 1);
        for r in 0..k {
            g1[(r, k)] = m[(r, k)];
            for c in 0..k {
                g2[(r, c)] = m[(r, c)];
            }
        }
        Ok((GroupPoint::new(g1)?, GroupPoint::new(g2)?))
    }

    pub fn compose(&self, g1: &GroupPoint, g2: &GroupPoint) -> Result<GroupPoint> {
        self.check(g1)?;
        self.check(g2)?;
        Ok(g1.compose(g2))
    }

    /// `b(g2)`: the linear block of `g2`, acting on translation vectors.
    pub fn b(&self, g2: &GroupPoint) -> Result<DMatrix<f64>> {
        self.check(g2)?;
        Ok(g2.matrix().view((0, 0), (self.k, self.k)).into_owned())
    }

    /// `b(g2)(g1)` as a translation matrix.
    pub fn act(&self, g2: &GroupPoint, g1: &GroupPoint) -> Result<GroupPoint> {
        let b = self.b(g2)?;
        self.check(g1)?;
        let v = g1.matrix().view((0, self.k), (self.k, 1)).into_owned();
        let w = b * v;
        let mut out = DMatrix::identity(self.k + 1, self.k + 1);
        for r in 0..self.k {
            out[(r, self.k)] = w[(r, 0)];
        }
        GroupPoint::new(out)
    }

    /// Max deviation of `g` from the translation subgroup.
    fn translation_defect(&self, g: &GroupPoint) -> f64 {
        let m = g.matrix();
        let mut d = 0.0_f64;
        for r in 0..=self.k {
            for c in 0..self.k {
                let e = if r == c { 1.0 } else { 0.0 };
                d = d.max((m[(r, c)] - e).abs());
            }
        }
        d.max((m[(self.k, self.k)] - 1.0).abs())
    }

    /// Max deviation of `g` from the linear subgroup.
    fn linear_defect(&self, g: &GroupPoint) -> f64 {
        let m = g.matrix();
        let mut d = (m[(self.k, self.k)] - 1.0).abs();
        for i in 0..self.k {
            d = d.max(m[(i, self.k)].abs()).max(m[(self.k, i)].abs());
        }
        d
    }
}

/// `S⁻¹` computed factorwise on `G1 ⋉_b G2`:
/// `(S⁻¹g1, S⁻¹g2)` in case (a) and `(b(S⁻¹g2)(S⁻¹g1), S⁻¹g2)` in case (b).
pub fn semidirect_s_inverse(
    bundle: &GroupBundle,
    v: &VerifiedSymmetry,
    g1: &GroupPoint,
    g2: &GroupPoint,
) -> Result<(GroupPoint, GroupPoint)> {
    let sd = bundle.semidirect().ok_or_else(|| {
        Error::Argument(format!("group `{}` has no semidirect structure", bundle.name()))
    })?;
    let alg = bundle.algebra();
    let h1 = group_s(alg, v, g1, Direction::Inverse)?;
    let h2 = group_s(alg, v, g2, Direction::Inverse)?;
    if sd.translation_defect(&h1) > 1e-12 || sd.linear_defect(&h2) > 1e-12 {
        return Err(Error::Argument(format!(
            "the group map of `{}` does not preserve the factors",
            v.name
        )));
    }
    match v.case {
        Case::A => Ok((h1, h2)),
        Case::B => Ok((sd.act(&h2, &h1)?, h2)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn decompose_compose_round_trip() {
        let b = catalog::builtin("se2").unwrap();
        let sd = b.semidirect().unwrap();
        let g = GroupPoint::new(DMatrix::from_row_slice(
            3,
            3,
            &[0.6, -0.8, 1.5, 0.8, 0.6, -2.0, 0.0, 0.0, 1.0],
        ))
        .unwrap();
        let (g1, g2) = sd.decompose(&g).unwrap();
        assert_eq!(sd.compose(&g1, &g2).unwrap(), g);
        let r = sd.b(&g2).unwrap();
        assert_eq!(r, DMatrix::from_row_slice(2, 2, &[0.6, -0.8, 0.8, 0.6]));
    }

    #[test]
    fn b_is_a_homomorphism() {
        let b = catalog::builtin("sh2").unwrap();
        let sd = b.semidirect().unwrap();
        let alg = b.algebra();
        let x = alg.group_exp(&crate::lie::AlgebraVector::new(&[0.0, 0.0, 0.7])).unwrap();
        let y = alg.group_exp(&crate::lie::AlgebraVector::new(&[0.0, 0.0, -0.3])).unwrap();
        let lhs = sd.b(&x.compose(&y)).unwrap();
        let rhs = sd.b(&x).unwrap() * sd.b(&y).unwrap();
        assert!(crate::linalg::max_abs_diff(&lhs, &rhs) < 1e-12);
    }
}
