use nalgebra::{DMatrix, DVector};

use super::types::{AlgebraVector, Covector, GroupPoint};
use crate::error::{Error, Result};
use crate::linalg;

/// Tolerance of the Jacobi and homomorphism validation gates.
pub const GATE_TOL: f64 = 1e-12;
/// Maximum residual allowed when re-expressing a matrix in the basis.
pub const CLOSURE_TOL: f64 = 1e-9;

/// A faithful matrix representation `ρ(e_1), …, ρ(e_n)`, each `m × m`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixRepresentation {
    size: usize,
    matrices: Vec<DMatrix<f64>>,
}

impl MatrixRepresentation {
    pub fn new(size: usize, matrices: Vec<DMatrix<f64>>) -> Result<Self> {
        if size == 0 {
            return Err(Error::Argument("representation size must be positive".into()));
        }
        for (i, m) in matrices.iter().enumerate() {
            if m.shape() != (size, size) {
                return Err(Error::Argument(format!(
                    "representation matrix {i} has shape {:?}, expected {size}x{size}",
                    m.shape()
                )));
            }
        }
        Ok(Self { size, matrices })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn matrices(&self) -> &[DMatrix<f64>] {
        &self.matrices
    }

    /// `m² × n` matrix whose columns are the row-major flattened generators.
    fn stacked(&self) -> DMatrix<f64> {
        let m2 = self.size * self.size;
        let mut a = DMatrix::zeros(m2, self.matrices.len());
        for (j, mat) in self.matrices.iter().enumerate() {
            for r in 0..self.size {
                for c in 0..self.size {
                    a[(r * self.size + c, j)] = mat[(r, c)];
                }
            }
        }
        a
    }
}

/// A finite-dimensional real Lie algebra with structure constants
/// `[e_i, e_j] = Σ_k c[i][j][k] e_k` and a faithful matrix representation.
#[derive(Clone, Debug)]
pub struct LieAlgebra {
    name: String,
    dim: usize,
    // c[(i * n + j) * n + k]
    constants: Vec<f64>,
    labels: Vec<String>,
    rep: MatrixRepresentation,
    // n × m², least-squares re-expression of matrices in the basis.
    rep_pinv: DMatrix<f64>,
    rep_stacked: DMatrix<f64>,
}

impl LieAlgebra {
    /// Builds an algebra from sparse entries `(i, j, k, value)` (0-based).
    ///
    /// Antisymmetric completion is applied: each entry also sets
    /// `c[j][i][k] = -value`. Conflicting duplicates are rejected. All
    /// validation gates run before the value is returned.
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        entries: &[(usize, usize, usize, f64)],
        labels: Vec<String>,
        rep: MatrixRepresentation,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Argument("algebra dimension must be positive".into()));
        }
        let n = dim;
        let mut constants = vec![0.0; n * n * n];
        let mut set = vec![false; n * n * n];
        for &(i, j, k, v) in entries {
            if i >= n || j >= n || k >= n {
                return Err(Error::Validation(format!(
                    "structure constant index ({i}, {j}, {k}) out of range for dim {n}"
                )));
            }
            if !v.is_finite() {
                return Err(Error::Validation(format!(
                    "structure constant ({i}, {j}, {k}) is not finite"
                )));
            }
            if i == j {
                if v != 0.0 {
                    return Err(Error::Validation(format!(
                        "c[{i}][{i}][{k}] = {v} violates antisymmetry"
                    )));
                }
                continue;
            }
            for (a, b, val) in [(i, j, v), (j, i, -v)] {
                let idx = (a * n + b) * n + k;
                if set[idx] && (constants[idx] - val).abs() > GATE_TOL {
                    return Err(Error::Validation(format!(
                        "conflicting structure constants for c[{a}][{b}][{k}]: {} vs {val}",
                        constants[idx]
                    )));
                }
                constants[idx] = val;
                set[idx] = true;
            }
        }
        let labels = if labels.is_empty() {
            (1..=n).map(|i| format!("e{i}")).collect()
        } else {
            labels
        };
        if labels.len() != n {
            return Err(Error::Validation(format!(
                "{} labels for an algebra of dimension {n}",
                labels.len()
            )));
        }
        if rep.matrices.len() != n {
            return Err(Error::Validation(format!(
                "representation has {} matrices, expected {n}",
                rep.matrices.len()
            )));
        }
        let rep_stacked = rep.stacked();
        let svd = rep_stacked.clone().svd(true, true);
        let smax = svd.singular_values.max();
        let rank = svd
            .singular_values
            .iter()
            .filter(|&&s| s > 1e-10 * smax.max(1e-300))
            .count();
        if rank < n {
            return Err(Error::Validation(format!(
                "representation matrices are linearly dependent (rank {rank} < {n})"
            )));
        }
        let rep_pinv = svd
            .pseudo_inverse(1e-12 * smax)
            .map_err(|e| Error::Validation(e.to_string()))?;

        let alg = Self {
            name: name.into(),
            dim: n,
            constants,
            labels,
            rep,
            rep_pinv,
            rep_stacked,
        };
        let (jac, (a, b, c)) = alg.jacobi_residual();
        if jac > GATE_TOL {
            return Err(Error::Validation(format!(
                "Jacobi identity fails: residual {jac:.3e} at triple ({a}, {b}, {c})"
            )));
        }
        let (hom, (a, b)) = alg.homomorphism_residual();
        if hom > GATE_TOL {
            return Err(Error::Validation(format!(
                "representation is not a bracket homomorphism: residual {hom:.3e} at pair ({a}, {b})"
            )));
        }
        Ok(alg)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn representation(&self) -> &MatrixRepresentation {
        &self.rep
    }

    pub fn rep_size(&self) -> usize {
        self.rep.size
    }

    #[inline]
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> f64 {
        self.constants[(i * self.dim + j) * self.dim + k]
    }

    /// Nonzero entries with `i < j`.
    pub fn sparse_constants(&self) -> Vec<(usize, usize, usize, f64)> {
        let n = self.dim;
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..n {
                    let v = self.structure_constant(i, j, k);
                    if v != 0.0 {
                        out.push((i, j, k, v));
                    }
                }
            }
        }
        out
    }

    fn check_dim(&self, got: usize, what: &str) -> Result<()> {
        if got != self.dim {
            return Err(Error::Argument(format!(
                "{what} has dimension {got}, algebra `{}` has dimension {}",
                self.name, self.dim
            )));
        }
        Ok(())
    }

    pub(crate) fn bracket_slices(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        let n = self.dim;
        out.iter_mut().for_each(|o| *o = 0.0);
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                let w = x[i] * y[j];
                if w == 0.0 {
                    continue;
                }
                let base = (i * n + j) * n;
                for k in 0..n {
                    out[k] += w * self.constants[base + k];
                }
            }
        }
    }

    /// `[x, y] = Σ x_i y_j c[i][j][·]`.
    pub fn bracket(&self, x: &AlgebraVector, y: &AlgebraVector) -> Result<AlgebraVector> {
        self.check_dim(x.dim(), "left operand")?;
        self.check_dim(y.dim(), "right operand")?;
        let mut out = vec![0.0; self.dim];
        self.bracket_slices(x.as_slice(), y.as_slice(), &mut out);
        Ok(AlgebraVector::from(out))
    }

    /// `q_k = Σ_{i,j} ξ_i c[i][k][j] p_j`, i.e. `q(η) = p([ξ, η])`.
    pub(crate) fn ad_star_slices(&self, xi: &[f64], p: &[f64], out: &mut [f64]) {
        let n = self.dim;
        out.iter_mut().for_each(|o| *o = 0.0);
        for i in 0..n {
            if xi[i] == 0.0 {
                continue;
            }
            for k in 0..n {
                let base = (i * n + k) * n;
                let mut acc = 0.0;
                for j in 0..n {
                    acc += self.constants[base + j] * p[j];
                }
                out[k] += xi[i] * acc;
            }
        }
    }

    /// Infinitesimal coadjoint action `(ad*_ξ p)(η) = p([ξ, η])`.
    pub fn ad_star(&self, xi: &AlgebraVector, p: &Covector) -> Result<Covector> {
        self.check_dim(xi.dim(), "algebra vector")?;
        self.check_dim(p.dim(), "covector")?;
        let mut out = vec![0.0; self.dim];
        self.ad_star_slices(xi.as_slice(), p.as_slice(), &mut out);
        Ok(Covector::from(out))
    }

    /// Matrix of `η ↦ [ξ, η]` in the basis.
    pub fn ad_matrix(&self, xi: &AlgebraVector) -> DMatrix<f64> {
        let n = self.dim;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    m[(k, j)] += xi[i] * self.structure_constant(i, j, k);
                }
            }
        }
        m
    }

    /// `ρ(ξ) = Σ ξ_i ρ(e_i)`.
    pub fn rep_matrix(&self, xi: &AlgebraVector) -> DMatrix<f64> {
        let m = self.rep.size;
        let mut out = DMatrix::zeros(m, m);
        for (x, r) in xi.iter().zip(&self.rep.matrices) {
            if *x != 0.0 {
                out += r * *x;
            }
        }
        out
    }

    pub(crate) fn rep_matrix_slice(&self, xi: &[f64], out: &mut [f64]) {
        let m = self.rep.size;
        out.iter_mut().for_each(|o| *o = 0.0);
        for (x, r) in xi.iter().zip(&self.rep.matrices) {
            if *x == 0.0 {
                continue;
            }
            for a in 0..m {
                for b in 0..m {
                    out[a * m + b] += x * r[(a, b)];
                }
            }
        }
    }

    /// Re-expresses a matrix in the basis by least squares; fails if the
    /// matrix is farther than [`CLOSURE_TOL`] from the representation image.
    pub fn project(&self, x: &DMatrix<f64>) -> Result<AlgebraVector> {
        let (coords, residual) = self.project_with_residual(x);
        if residual > CLOSURE_TOL * linalg::max_abs(x).max(1.0) {
            return Err(Error::RepresentationClosure(format!(
                "matrix is {residual:.3e} away from the image of the representation"
            )));
        }
        Ok(coords)
    }

    pub fn project_with_residual(&self, x: &DMatrix<f64>) -> (AlgebraVector, f64) {
        let m = self.rep.size;
        let mut flat = DVector::zeros(m * m);
        for r in 0..m {
            for c in 0..m {
                flat[r * m + c] = x[(r, c)];
            }
        }
        let coords = &self.rep_pinv * &flat;
        let back = &self.rep_stacked * &coords;
        let residual = (back - flat).amax();
        (AlgebraVector::from_dvector(coords), residual)
    }

    /// Matrix of `Ad_g` in the basis: column `j` holds `g ρ(e_j) g⁻¹`.
    pub fn adjoint_matrix(&self, g: &GroupPoint) -> Result<DMatrix<f64>> {
        if g.size() != self.rep.size {
            return Err(Error::Argument(format!(
                "group point is {0}x{0}, representation is {1}x{1}",
                g.size(),
                self.rep.size
            )));
        }
        let gm = g.matrix();
        let gi = g.inverse().into_matrix();
        let n = self.dim;
        let mut out = DMatrix::zeros(n, n);
        for (j, r) in self.rep.matrices.iter().enumerate() {
            let conj = gm * r * &gi;
            let col = self.project(&conj).map_err(|_| {
                Error::RepresentationClosure(
                    "Ad_g left the algebra; the matrix is not a group element".into(),
                )
            })?;
            out.set_column(j, col.coords());
        }
        Ok(out)
    }

    /// Coadjoint pullback `(Ad*_g p)(ξ) = p(Ad_g ξ)`.
    pub fn group_ad_star(&self, g: &GroupPoint, p: &Covector) -> Result<Covector> {
        self.check_dim(p.dim(), "covector")?;
        let ad = self.adjoint_matrix(g)?;
        Ok(Covector::from_dvector(ad.transpose() * p.coords()))
    }

    /// Group exponential `exp(ρ(ξ))`.
    pub fn group_exp(&self, xi: &AlgebraVector) -> Result<GroupPoint> {
        self.check_dim(xi.dim(), "algebra vector")?;
        Ok(GroupPoint::from_matrix_unchecked(linalg::expm(
            &self.rep_matrix(xi),
        )))
    }

    /// Principal logarithm re-expressed in the basis.
    pub fn group_log(&self, g: &GroupPoint) -> Result<AlgebraVector> {
        if g.size() != self.rep.size {
            return Err(Error::Argument("group point has the wrong size".into()));
        }
        let l = linalg::logm(g.matrix())?;
        self.project(&l)
    }

    /// Max over basis triples of the cyclic Jacobi sum, and the worst triple.
    pub fn jacobi_residual(&self) -> (f64, (usize, usize, usize)) {
        let n = self.dim;
        let e = |i| AlgebraVector::basis(n, i);
        let mut worst = (0.0, (0, 0, 0));
        let mut t1 = vec![0.0; n];
        let mut t2 = vec![0.0; n];
        let mut acc = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    acc.iter_mut().for_each(|a| *a = 0.0);
                    for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
                        self.bracket_slices(e(b).as_slice(), e(c).as_slice(), &mut t1);
                        self.bracket_slices(e(a).as_slice(), &t1, &mut t2);
                        acc.iter_mut().zip(&t2).for_each(|(x, y)| *x += y);
                    }
                    let r = acc.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
                    if r > worst.0 {
                        worst = (r, (i, j, k));
                    }
                }
            }
        }
        worst
    }

    /// Max over basis pairs of `|ρ([e_i, e_j]) − [ρ(e_i), ρ(e_j)]|`.
    pub fn homomorphism_residual(&self) -> (f64, (usize, usize)) {
        let n = self.dim;
        let mut worst = (0.0, (0, 0));
        for i in 0..n {
            for j in 0..n {
                let br = {
                    let mut out = vec![0.0; n];
                    self.bracket_slices(
                        AlgebraVector::basis(n, i).as_slice(),
                        AlgebraVector::basis(n, j).as_slice(),
                        &mut out,
                    );
                    AlgebraVector::from(out)
                };
                let lhs = self.rep_matrix(&br);
                let (a, b) = (&self.rep.matrices[i], &self.rep.matrices[j]);
                let rhs = a * b - b * a;
                let r = linalg::max_abs_diff(&lhs, &rhs);
                if r > worst.0 {
                    worst = (r, (i, j));
                }
            }
        }
        worst
    }

    /// Trace form `K_ij = tr(ad_{e_i} ad_{e_j})`.
    pub fn killing_form(&self) -> DMatrix<f64> {
        let n = self.dim;
        let ads: Vec<DMatrix<f64>> = (0..n)
            .map(|i| self.ad_matrix(&AlgebraVector::basis(n, i)))
            .collect();
        DMatrix::from_fn(n, n, |i, j| (&ads[i] * &ads[j]).trace())
    }
}

impl std::ops::Index<usize> for AlgebraVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.coords()[i]
    }
}

impl std::ops::Index<usize> for Covector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.coords()[i]
    }
}

impl AlgebraVector {
    pub fn iter(&self) -> impl Iterator<Item = &f64> {
        self.coords().iter()
    }
}
