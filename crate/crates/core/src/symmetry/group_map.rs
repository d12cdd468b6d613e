use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::lie::{GroupPoint, LieAlgebra, LinearMapOnAlgebra};
use crate::linalg;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Realization of the group map `S` with `d_id S = σ`.
#[derive(Clone, Debug, PartialEq)]
pub enum GroupMap {
    /// `S(g) = M g M⁻¹`, or `S(g) = M g⁻¹ M⁻¹` when `anti` (then `M`
    /// realizes `−σ` on the representation).
    Conjugation {
        m: DMatrix<f64>,
        m_inv: DMatrix<f64>,
        anti: bool,
    },
    /// `S(g) = exp(σ log g)` on the principal-logarithm domain.
    ExpConjugation,
}

impl GroupMap {
    pub fn conjugation(m: DMatrix<f64>, anti: bool) -> Result<Self> {
        let m_inv = linalg::inverse(&m)
            .map_err(|_| Error::Argument("conjugating matrix is singular".into()))?;
        Ok(GroupMap::Conjugation { m, m_inv, anti })
    }

    /// `S(g) = g⁻¹`, the anti-automorphism with `d_id S = −id`.
    pub fn inversion(size: usize) -> Self {
        GroupMap::Conjugation {
            m: DMatrix::identity(size, size),
            m_inv: DMatrix::identity(size, size),
            anti: true,
        }
    }

    /// Identifier used in group files.
    pub fn spec(&self) -> &'static str {
        match self {
            GroupMap::Conjugation { anti: false, .. } => "builtin:conjugation",
            GroupMap::Conjugation { anti: true, .. } => "builtin:anti_conjugation",
            GroupMap::ExpConjugation => "exp_conjugation",
        }
    }

    pub fn conjugator(&self) -> Option<&DMatrix<f64>> {
        match self {
            GroupMap::Conjugation { m, .. } => Some(m),
            GroupMap::ExpConjugation => None,
        }
    }

    pub fn apply(
        &self,
        algebra: &LieAlgebra,
        sigma: &LinearMapOnAlgebra,
        g: &GroupPoint,
        direction: Direction,
    ) -> Result<GroupPoint> {
        if g.size() != algebra.rep_size() {
            return Err(Error::Argument(format!(
                "group point is {0}x{0}, representation is {1}x{1}",
                g.size(),
                algebra.rep_size()
            )));
        }
        match self {
            GroupMap::Conjugation { m, m_inv, anti } => {
                let x = if *anti { g.inverse().into_matrix() } else { g.matrix().clone() };
                let out = match direction {
                    Direction::Forward => m * x * m_inv,
                    Direction::Inverse => m_inv * x * m,
                };
                Ok(GroupPoint::from_matrix_unchecked(out))
            }
            GroupMap::ExpConjugation => {
                let xi = algebra.group_log(g).map_err(|e| match e {
                    Error::Domain(msg) => Error::Domain(format!(
                        "{msg}; the exp-conjugation map only covers the principal-log domain, \
                         register a closed-form catalog map instead"
                    )),
                    other => other,
                })?;
                let s = match direction {
                    Direction::Forward => sigma.clone(),
                    Direction::Inverse => sigma.inverse(),
                };
                algebra.group_exp(&s.apply(&xi))
            }
        }
    }
}
