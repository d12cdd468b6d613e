use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

macro_rules! coordinate_vector {
    ($name:ident, $what:literal) => {
        #[doc = concat!("A ", $what, " in coordinates.")]
        #[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
        #[serde(from = "Vec<f64>", into = "Vec<f64>")]
        pub struct $name(DVector<f64>);

        impl From<Vec<f64>> for $name {
            fn from(v: Vec<f64>) -> Self {
                Self(DVector::from_vec(v))
            }
        }

        impl From<$name> for Vec<f64> {
            fn from(v: $name) -> Self {
                v.0.iter().copied().collect()
            }
        }

        impl $name {
            pub fn new(coords: &[f64]) -> Self {
                Self(DVector::from_column_slice(coords))
            }

            pub fn from_dvector(v: DVector<f64>) -> Self {
                Self(v)
            }

            pub fn zeros(n: usize) -> Self {
                Self(DVector::zeros(n))
            }

            /// The `i`-th (dual) basis element.
            pub fn basis(n: usize, i: usize) -> Self {
                let mut v = DVector::zeros(n);
                v[i] = 1.0;
                Self(v)
            }

            pub fn dim(&self) -> usize {
                self.0.len()
            }

            pub fn coords(&self) -> &DVector<f64> {
                &self.0
            }

            pub fn as_slice(&self) -> &[f64] {
                self.0.as_slice()
            }

            pub fn to_vec(&self) -> Vec<f64> {
                self.0.iter().copied().collect()
            }

            pub fn is_finite(&self) -> bool {
                self.0.iter().all(|x| x.is_finite())
            }

            pub fn norm(&self) -> f64 {
                self.0.norm()
            }

            /// Max-abs distance between coordinate vectors.
            pub fn distance(&self, other: &Self) -> f64 {
                self.0
                    .iter()
                    .zip(other.0.iter())
                    .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
            }
        }

        impl Add for &$name {
            type Output = $name;
            fn add(self, rhs: Self) -> $name {
                $name(&self.0 + &rhs.0)
            }
        }

        impl Sub for &$name {
            type Output = $name;
            fn sub(self, rhs: Self) -> $name {
                $name(&self.0 - &rhs.0)
            }
        }

        impl Mul<f64> for &$name {
            type Output = $name;
            fn mul(self, rhs: f64) -> $name {
                $name(&self.0 * rhs)
            }
        }

        impl Neg for &$name {
            type Output = $name;
            fn neg(self) -> $name {
                $name(-&self.0)
            }
        }
    };
}

coordinate_vector!(AlgebraVector, "Lie algebra element `ξ = Σ ξ_i e_i`");
coordinate_vector!(Covector, "covector `p ∈ g*` in the dual basis");

impl Covector {
    /// The pairing `p(ξ)`.
    pub fn pair(&self, xi: &AlgebraVector) -> f64 {
        self.0.dot(xi.coords())
    }
}

/// An invertible matrix of a matrix Lie group.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupPoint(DMatrix<f64>);

impl GroupPoint {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Argument("group matrix must be square".into()));
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(Error::Argument("group matrix has non-finite entries".into()));
        }
        let det = matrix.determinant();
        if det.abs() <= 1e-300 || !det.is_finite() {
            return Err(Error::Argument("group matrix is not invertible".into()));
        }
        Ok(Self(matrix))
    }

    pub(crate) fn from_matrix_unchecked(matrix: DMatrix<f64>) -> Self {
        Self(matrix)
    }

    pub fn identity(m: usize) -> Self {
        Self(DMatrix::identity(m, m))
    }

    pub fn size(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn inverse(&self) -> GroupPoint {
        Self(
            self.0
                .clone()
                .try_inverse()
                .expect("group points are invertible by construction"),
        )
    }

    pub fn compose(&self, other: &GroupPoint) -> GroupPoint {
        Self(&self.0 * &other.0)
    }

    /// Entrywise max-abs distance.
    pub fn distance(&self, other: &GroupPoint) -> f64 {
        linalg::max_abs_diff(&self.0, &other.0)
    }

    /// Row-major entries.
    pub fn row_major(&self) -> Vec<f64> {
        let m = self.size();
        let mut out = Vec::with_capacity(m * m);
        for r in 0..m {
            for c in 0..m {
                out.push(self.0[(r, c)]);
            }
        }
        out
    }
}

impl Mul for &GroupPoint {
    type Output = GroupPoint;
    fn mul(self, rhs: Self) -> GroupPoint {
        self.compose(rhs)
    }
}

/// An invertible linear map `σ: g → g` acting on algebra coordinates.
///
/// Its dual `σ*` acts on covector coordinates by the transpose.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMapOnAlgebra(DMatrix<f64>);

impl LinearMapOnAlgebra {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Argument("linear map must be square".into()));
        }
        let det = matrix.determinant();
        if !(det.abs() > 1e-12) {
            return Err(Error::Argument(format!(
                "linear map is not invertible (|det| = {:.3e})",
                det.abs()
            )));
        }
        Ok(Self(matrix))
    }

    pub fn from_rows(n: usize, rows: &[f64]) -> Result<Self> {
        if rows.len() != n * n {
            return Err(Error::Argument(format!(
                "expected {} entries for a {n}x{n} map, got {}",
                n * n,
                rows.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(n, n, rows))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn apply(&self, xi: &AlgebraVector) -> AlgebraVector {
        AlgebraVector::from_dvector(&self.0 * xi.coords())
    }

    /// `σ*p = p ∘ σ`, i.e. the transpose acting on covector coordinates.
    pub fn apply_dual(&self, p: &Covector) -> Covector {
        Covector::from_dvector(self.0.transpose() * p.coords())
    }

    pub fn inverse(&self) -> LinearMapOnAlgebra {
        Self(
            self.0
                .clone()
                .try_inverse()
                .expect("linear maps are invertible by construction"),
        )
    }

    pub fn compose(&self, other: &LinearMapOnAlgebra) -> LinearMapOnAlgebra {
        Self(&self.0 * &other.0)
    }

    pub fn row_major(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|r| (0..self.dim()).map(|c| self.0[(r, c)]).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dual_is_transpose() {
        let s = LinearMapOnAlgebra::from_rows(2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let p = Covector::new(&[1.0, -1.0]);
        let xi = AlgebraVector::new(&[0.5, 2.0]);
        // (σ*p)(ξ) = p(σξ)
        assert!((s.apply_dual(&p).pair(&xi) - p.pair(&s.apply(&xi))).abs() < 1e-15);
    }

    #[test]
    fn singular_map_rejected() {
        assert!(LinearMapOnAlgebra::from_rows(2, &[1.0, 2.0, 2.0, 4.0]).is_err());
    }

    #[test]
    fn singular_group_point_rejected() {
        assert!(GroupPoint::new(DMatrix::zeros(2, 2)).is_err());
    }
}
