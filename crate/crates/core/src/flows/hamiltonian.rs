use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::lie::{AlgebraVector, Covector, LieAlgebra, LinearMapOnAlgebra};
use crate::sampling;

/// Relative tolerance of the differential validation gate.
pub const DIFFERENTIAL_GATE_TOL: f64 = 1e-6;
const GATE_SAMPLES: usize = 100;
const GATE_SEED: u64 = 0x5eed_0d1f;

pub type ValueFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type DifferentialFn = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;

#[derive(Clone, Debug, PartialEq)]
pub enum HamiltonianKind {
    /// `½ Σ w_i p(X_i)²`.
    SubRiemannian {
        frame: Vec<AlgebraVector>,
        weights: Vec<f64>,
    },
    /// `½ p(K⁻¹ p)` for the sign-normalized Killing form.
    Killing,
    /// A generic quadratic form, e.g. a pulled-back Hamiltonian.
    Quadratic,
    Custom,
}

#[derive(Clone)]
enum Repr {
    /// `H = ½ pᵀ Q p`, `d_pH = Q p`.
    Quadratic(DMatrix<f64>),
    Custom {
        value: ValueFn,
        differential: Option<DifferentialFn>,
    },
    /// `p ↦ H(σᵀ p)`.
    Pullback {
        inner: Box<HamiltonianSpec>,
        sigma: DMatrix<f64>,
    },
}

/// A left-invariant Hamiltonian on `g*` with its differential `d_pH ∈ g`.
#[derive(Clone)]
pub struct HamiltonianSpec {
    label: String,
    dim: usize,
    kind: HamiltonianKind,
    repr: Repr,
}

impl fmt::Debug for HamiltonianSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HamiltonianSpec")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("kind", &self.kind)
            .finish_non_exhaustive()
    }
}

/// Sub-Riemannian Hamiltonian `H(p) = ½ Σ p(X_i)²` for a frame `X_i`.
pub fn sr_hamiltonian(algebra: &LieAlgebra, frame: &[AlgebraVector]) -> Result<HamiltonianSpec> {
    sr_hamiltonian_weighted(algebra, frame, &vec![1.0; frame.len()])
}

/// `H(p) = ½ Σ w_i p(X_i)²` with positive weights.
pub fn sr_hamiltonian_weighted(
    algebra: &LieAlgebra,
    frame: &[AlgebraVector],
    weights: &[f64],
) -> Result<HamiltonianSpec> {
    let n = algebra.dim();
    if frame.is_empty() {
        return Err(Error::Argument("frame must contain at least one vector".into()));
    }
    if weights.len() != frame.len() {
        return Err(Error::Argument(format!(
            "{} weights for {} frame vectors",
            weights.len(),
            frame.len()
        )));
    }
    if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
        return Err(Error::Argument("frame weights must be positive".into()));
    }
    let mut x = DMatrix::zeros(n, frame.len());
    for (j, v) in frame.iter().enumerate() {
        if v.dim() != n {
            return Err(Error::Argument(format!(
                "frame vector {j} has dimension {}, expected {n}",
                v.dim()
            )));
        }
        x.set_column(j, v.coords());
    }
    let rank = x.clone().svd(false, false).rank(1e-10 * x.amax().max(1e-300));
    if rank < frame.len() {
        return Err(Error::Argument("frame vectors are linearly dependent".into()));
    }
    let w = DMatrix::from_diagonal(&DVector::from_column_slice(weights));
    let q = &x * w * x.transpose();
    Ok(HamiltonianSpec {
        label: "sr".into(),
        dim: n,
        kind: HamiltonianKind::SubRiemannian {
            frame: frame.to_vec(),
            weights: weights.to_vec(),
        },
        repr: Repr::Quadratic(q),
    })
}

/// Riemannian Hamiltonian of the bi-invariant Killing metric.
///
/// Requires a negative definite Killing form.
pub fn killing_hamiltonian(algebra: &LieAlgebra) -> Result<HamiltonianSpec> {
    let k = algebra.killing_form();
    let eig = k.clone().symmetric_eigen();
    let scale = k.amax().max(1.0);
    for &lam in eig.eigenvalues.iter() {
        if lam >= -1e-12 * scale {
            return Err(Error::Domain(format!(
                "Killing form of `{}` is not negative definite: eigenvalue {lam:.6e}",
                algebra.name()
            )));
        }
    }
    let k_pos = -k;
    let q = k_pos
        .try_inverse()
        .ok_or_else(|| Error::Domain("Killing form is singular".into()))?;
    let q = (&q + q.transpose()) * 0.5;
    Ok(HamiltonianSpec {
        label: "killing".into(),
        dim: algebra.dim(),
        kind: HamiltonianKind::Killing,
        repr: Repr::Quadratic(q),
    })
}

impl HamiltonianSpec {
    /// `H(p) = ½ pᵀ Q p` for a symmetric `Q`.
    pub fn quadratic(label: impl Into<String>, q: DMatrix<f64>) -> Result<Self> {
        if !q.is_square() {
            return Err(Error::Argument("quadratic form must be square".into()));
        }
        let sym = (&q + q.transpose()) * 0.5;
        Ok(Self {
            label: label.into(),
            dim: q.nrows(),
            kind: HamiltonianKind::Quadratic,
            repr: Repr::Quadratic(sym),
        })
    }

    /// A custom Hamiltonian. Without an analytic differential, central
    /// differences with step `1e-6·max(1, |p|)` are used. The differential
    /// is validated against finite differences of the value at 100 seeded
    /// points.
    pub fn custom(
        label: impl Into<String>,
        dim: usize,
        value: ValueFn,
        differential: Option<DifferentialFn>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Argument("dimension must be positive".into()));
        }
        let h = Self {
            label: label.into(),
            dim,
            kind: HamiltonianKind::Custom,
            repr: Repr::Custom {
                value,
                differential,
            },
        };
        h.validate_differential()?;
        Ok(h)
    }

    fn validate_differential(&self) -> Result<()> {
        let mut rng = sampling::rng(GATE_SEED);
        let n = self.dim;
        let mut d = vec![0.0; n];
        for _ in 0..GATE_SAMPLES {
            let p: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            self.differential_slice(&p, &mut d);
            let fd = central_difference(|x| self.value_slice(x), &p, 1e-5);
            for i in 0..n {
                let err = (fd[i] - d[i]).abs();
                if !(err <= DIFFERENTIAL_GATE_TOL * d[i].abs().max(1.0)) {
                    return Err(Error::Validation(format!(
                        "differential of `{}` disagrees with finite differences at p = {p:?}, \
                         component {i}: {} vs {}",
                        self.label, d[i], fd[i]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &HamiltonianKind {
        &self.kind
    }

    /// Matrix `Q` when `H = ½ pᵀ Q p`.
    pub fn quadratic_form(&self) -> Option<DMatrix<f64>> {
        match &self.repr {
            Repr::Quadratic(q) => Some(q.clone()),
            Repr::Pullback { inner, sigma } => inner
                .quadratic_form()
                .map(|q| sigma * q * sigma.transpose()),
            Repr::Custom { .. } => None,
        }
    }

    pub(crate) fn value_slice(&self, p: &[f64]) -> f64 {
        match &self.repr {
            Repr::Quadratic(q) => {
                let n = self.dim;
                let mut acc = 0.0;
                for i in 0..n {
                    let mut row = 0.0;
                    for j in 0..n {
                        row += q[(i, j)] * p[j];
                    }
                    acc += p[i] * row;
                }
                0.5 * acc
            }
            Repr::Custom { value, .. } => value(p),
            Repr::Pullback { inner, sigma } => {
                let q = pull(sigma, p);
                inner.value_slice(&q)
            }
        }
    }

    pub(crate) fn differential_slice(&self, p: &[f64], out: &mut [f64]) {
        match &self.repr {
            Repr::Quadratic(q) => {
                let n = self.dim;
                for i in 0..n {
                    let mut acc = 0.0;
                    for j in 0..n {
                        acc += q[(i, j)] * p[j];
                    }
                    out[i] = acc;
                }
            }
            Repr::Custom {
                differential: Some(d),
                ..
            } => d(p, out),
            Repr::Custom {
                value,
                differential: None,
            } => {
                let scale = p.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
                let fd = central_difference(|x| value(x), p, 1e-6 * scale);
                out.copy_from_slice(&fd);
            }
            Repr::Pullback { inner, sigma } => {
                // d/dp H(σᵀp) = σ · dH(σᵀp)
                let q = pull(sigma, p);
                let mut d = vec![0.0; self.dim];
                inner.differential_slice(&q, &mut d);
                for i in 0..self.dim {
                    out[i] = (0..self.dim).map(|j| sigma[(i, j)] * d[j]).sum();
                }
            }
        }
    }

    pub fn value(&self, p: &Covector) -> Result<f64> {
        self.check_dim(p.dim())?;
        Ok(self.value_slice(p.as_slice()))
    }

    pub fn differential(&self, p: &Covector) -> Result<AlgebraVector> {
        self.check_dim(p.dim())?;
        let mut out = vec![0.0; self.dim];
        self.differential_slice(p.as_slice(), &mut out);
        Ok(AlgebraVector::from(out))
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim {
            return Err(Error::Argument(format!(
                "covector has dimension {got}, Hamiltonian `{}` expects {}",
                self.label, self.dim
            )));
        }
        Ok(())
    }

    /// `H ∘ σ*`, i.e. `p ↦ H(σᵀ p)`.
    pub fn compose_dual(&self, sigma: &LinearMapOnAlgebra) -> Result<HamiltonianSpec> {
        if sigma.dim() != self.dim {
            return Err(Error::Argument("map and Hamiltonian dimensions differ".into()));
        }
        let label = format!("{}∘σ*", self.label);
        let s = sigma.matrix();
        Ok(match self.quadratic_form() {
            Some(q) => HamiltonianSpec {
                label,
                dim: self.dim,
                kind: HamiltonianKind::Quadratic,
                repr: Repr::Quadratic(s * q * s.transpose()),
            },
            None => HamiltonianSpec {
                label,
                dim: self.dim,
                kind: HamiltonianKind::Custom,
                repr: Repr::Pullback {
                    inner: Box::new(self.clone()),
                    sigma: s.clone(),
                },
            },
        })
    }
}

fn pull(sigma: &DMatrix<f64>, p: &[f64]) -> Vec<f64> {
    let n = p.len();
    (0..n)
        .map(|i| (0..n).map(|j| sigma[(j, i)] * p[j]).sum())
        .collect()
}

fn central_difference(f: impl Fn(&[f64]) -> f64, p: &[f64], h: f64) -> Vec<f64> {
    let mut x = p.to_vec();
    (0..p.len())
        .map(|i| {
            x[i] = p[i] + h;
            let fp = f(&x);
            x[i] = p[i] - h;
            let fm = f(&x);
            x[i] = p[i];
            (fp - fm) / (2.0 * h)
        })
        .collect()
}
