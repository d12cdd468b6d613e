//! Left-invariant Hamiltonian flows.
//!
//! In left trivialization a point of `T*G` is `(g, p)` and the flow of `H` is
//!
//! ```text
//! ġ = g · ρ(d_pH),    ṗ = ad*_{d_pH} p.
//! ```
//!
//! The covector equation is closed on its own (the vertical part). In right
//! trivialization the flow of `h` reads `ġ = ρ(d_qh) · g`, `q̇ = −ad*_{d_qh} q`.
//! States are packed as `[p (n) | g row-major (m²)]`.

mod hamiltonian;
mod integrator;
mod trajectory;

pub use hamiltonian::{
    killing_hamiltonian, sr_hamiltonian, sr_hamiltonian_weighted, DifferentialFn,
    HamiltonianKind, HamiltonianSpec, ValueFn, DIFFERENTIAL_GATE_TOL,
};
pub use integrator::{integrate, FlowConfig, Method, Solution};
pub use trajectory::{fmt17, DenseFlow, Trajectory};

use crate::error::{Error, Result};
use crate::lie::{CotangentPoint, Covector, GroupPoint, LieAlgebra, Side};

/// `Hv(p) = ad*_{d_pH} p`.
pub fn vertical_field(algebra: &LieAlgebra, h: &HamiltonianSpec, p: &Covector) -> Result<Covector> {
    check(algebra, h, p)?;
    let n = algebra.dim();
    let mut d = vec![0.0; n];
    let mut out = vec![0.0; n];
    h.differential_slice(p.as_slice(), &mut d);
    algebra.ad_star_slices(&d, p.as_slice(), &mut out);
    Ok(Covector::from(out))
}

fn check(algebra: &LieAlgebra, h: &HamiltonianSpec, p: &Covector) -> Result<()> {
    if h.dim() != algebra.dim() || p.dim() != algebra.dim() {
        return Err(Error::Argument(format!(
            "dimension mismatch: algebra {}, Hamiltonian {}, covector {}",
            algebra.dim(),
            h.dim(),
            p.dim()
        )));
    }
    if !p.is_finite() {
        return Err(Error::Argument("covector has non-finite entries".into()));
    }
    Ok(())
}

/// Time-`t` map of the vertical system `ṗ = Hv(p)`.
pub fn vertical_flow(
    algebra: &LieAlgebra,
    h: &HamiltonianSpec,
    p0: &Covector,
    t: f64,
    cfg: &FlowConfig,
) -> Result<Covector> {
    check(algebra, h, p0)?;
    check_size(algebra)?;
    let n = algebra.dim();
    let rhs = |y: &[f64], dy: &mut [f64]| {
        let mut d = [0.0; 16];
        h.differential_slice(y, &mut d[..n]);
        algebra.ad_star_slices(&d[..n], y, dy);
    };
    let sol = integrate(rhs, p0.as_slice(), 0.0, t, cfg)?;
    Ok(Covector::new(sol.final_state()))
}

pub(crate) fn pack(p: &Covector, g: &GroupPoint) -> Vec<f64> {
    let mut y = p.to_vec();
    y.extend(g.row_major());
    y
}

pub(crate) fn unpack(algebra: &LieAlgebra, y: &[f64], side: Side) -> Result<CotangentPoint> {
    let n = algebra.dim();
    let m = algebra.rep_size();
    let g = GroupPoint::new(nalgebra::DMatrix::from_row_slice(m, m, &y[n..n + m * m]))?;
    Ok(CotangentPoint::new(g, Covector::new(&y[..n]), side))
}

/// Right-hand side of the coupled system on `[p | g]`.
pub(crate) fn coupled_rhs<'a>(
    algebra: &'a LieAlgebra,
    h: &'a HamiltonianSpec,
    side: Side,
) -> impl Fn(&[f64], &mut [f64]) + 'a {
    let n = algebra.dim();
    let m = algebra.rep_size();
    move |y: &[f64], dy: &mut [f64]| {
        let mut d = [0.0; 16];
        let mut r = [0.0; 64];
        let (d, r) = (&mut d[..n], &mut r[..m * m]);
        let (p, g) = y.split_at(n);
        let (dp, dg) = dy.split_at_mut(n);
        h.differential_slice(p, d);
        algebra.ad_star_slices(d, p, dp);
        algebra.rep_matrix_slice(d, r);
        match side {
            Side::Left => {
                // ġ = g ρ(ξ)
                for a in 0..m {
                    for b in 0..m {
                        let mut acc = 0.0;
                        for c in 0..m {
                            acc += g[a * m + c] * r[c * m + b];
                        }
                        dg[a * m + b] = acc;
                    }
                }
            }
            Side::Right => {
                dp.iter_mut().for_each(|x| *x = -*x);
                // ġ = ρ(ξ) g
                for a in 0..m {
                    for b in 0..m {
                        let mut acc = 0.0;
                        for c in 0..m {
                            acc += r[a * m + c] * g[c * m + b];
                        }
                        dg[a * m + b] = acc;
                    }
                }
            }
        }
    }
}

fn check_size(algebra: &LieAlgebra) -> Result<()> {
    if algebra.dim() > 16 || algebra.rep_size() > 8 {
        return Err(Error::Argument(
            "flows support algebras of dimension ≤ 16 with representations of size ≤ 8".into(),
        ));
    }
    Ok(())
}

/// Integrates a flow from an arbitrary starting point, keeping its side.
fn flow_from(
    algebra: &LieAlgebra,
    h: &HamiltonianSpec,
    start: &CotangentPoint,
    t: f64,
    cfg: &FlowConfig,
) -> Result<CotangentPoint> {
    check(algebra, h, start.covector())?;
    check_size(algebra)?;
    let side = start.side();
    let y0 = pack(start.covector(), start.g());
    let sol = integrate(coupled_rhs(algebra, h, side), &y0, 0.0, t, cfg)?;
    unpack(algebra, sol.final_state(), side)
}

/// Left-trivialized flow of `H` from `(id, p0)`.
pub fn left_flow(
    algebra: &LieAlgebra,
    h: &HamiltonianSpec,
    p0: &Covector,
    t: f64,
    cfg: &FlowConfig,
) -> Result<CotangentPoint> {
    let start = CotangentPoint::at_identity(algebra, p0.clone(), Side::Left);
    flow_from(algebra, h, &start, t, cfg)
}

/// Left-trivialized flow from a left point `(g, p)`.
pub fn left_flow_from(
    algebra: &LieAlgebra,
    h: &HamiltonianSpec,
    start: &CotangentPoint,
    t: f64,
    cfg: &FlowConfig,
) -> Result<CotangentPoint> {
    if start.side() != Side::Left {
        return Err(Error::Argument("left_flow_from needs a left-trivialized point".into()));
    }
    flow_from(algebra, h, start, t, cfg)
}

/// Right-trivialized flow of `h` from `(id, q0)`.
pub fn right_flow(
    algebra: &LieAlgebra,
    h: &HamiltonianSpec,
    q0: &Covector,
    t: f64,
    cfg: &FlowConfig,
) -> Result<CotangentPoint> {
    let start = CotangentPoint::at_identity(algebra, q0.clone(), Side::Right);
    flow_from(algebra, h, &start, t, cfg)
}

/// Right-trivialized flow from a right point `(g, q)`.
pub fn right_flow_from(
    algebra: &LieAlgebra,
    h: &HamiltonianSpec,
    start: &CotangentPoint,
    t: f64,
    cfg: &FlowConfig,
) -> Result<CotangentPoint> {
    if start.side() != Side::Right {
        return Err(Error::Argument("right_flow_from needs a right-trivialized point".into()));
    }
    flow_from(algebra, h, start, t, cfg)
}

/// `Exp(p, t)`: the group component of the left flow from `(id, p)`, `t > 0`.
pub fn exp_map(
    algebra: &LieAlgebra,
    h: &HamiltonianSpec,
    p: &Covector,
    t: f64,
    cfg: &FlowConfig,
) -> Result<GroupPoint> {
    if !(t > 0.0) {
        return Err(Error::Argument(format!("exp_map needs t > 0, got {t}")));
    }
    Ok(left_flow(algebra, h, p, t, cfg)?.g().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::lie::{momentum_maps, AlgebraVector};
    use std::f64::consts::PI;

    fn heis() -> (LieAlgebra, HamiltonianSpec) {
        let b = catalog::builtin("heisenberg3").unwrap();
        (b.algebra().clone(), b.hamiltonian("sr").unwrap().clone())
    }

    #[test]
    fn heisenberg_vertical_field() {
        let (a, h) = heis();
        let v = vertical_field(&a, &h, &Covector::new(&[1.0, 0.0, 1.0])).unwrap();
        assert_eq!(v, Covector::new(&[0.0, 1.0, 0.0]));
        assert_eq!(vertical_field(&a, &h, &Covector::zeros(3)).unwrap(), Covector::zeros(3));
    }

    #[test]
    fn heisenberg_vertical_rotation() {
        let (a, h) = heis();
        let cfg = FlowConfig::default();
        let p = vertical_flow(&a, &h, &Covector::new(&[1.0, 0.0, 1.0]), PI / 2.0, &cfg).unwrap();
        assert!(p.distance(&Covector::new(&[0.0, 1.0, 1.0])) < 1e-9);
        let p0 = Covector::new(&[0.3, 0.4, 0.5]);
        assert_eq!(vertical_flow(&a, &h, &p0, 0.0, &cfg).unwrap(), p0);
    }

    #[test]
    fn heisenberg_straight_line() {
        let (a, h) = heis();
        let g = exp_map(&a, &h, &Covector::new(&[1.0, 0.0, 0.0]), 2.0, &FlowConfig::default()).unwrap();
        let e = a.group_exp(&AlgebraVector::new(&[2.0, 0.0, 0.0])).unwrap();
        assert!(g.distance(&e) < 1e-12);
    }

    #[test]
    fn exp_map_rejects_nonpositive_time() {
        let (a, h) = heis();
        let r = exp_map(&a, &h, &Covector::new(&[1.0, 0.0, 0.0]), 0.0, &FlowConfig::default());
        assert!(matches!(r, Err(Error::Argument(_))));
    }

    #[test]
    fn heisenberg_full_circle_against_fine_rk4() {
        let (a, h) = heis();
        let p = Covector::new(&[1.0, 0.0, 1.0]);
        let g = exp_map(&a, &h, &p, 2.0 * PI, &FlowConfig::default()).unwrap();
        let fine = exp_map(&a, &h, &p, 2.0 * PI, &FlowConfig::rk4(1e-3)).unwrap();
        assert!(g.distance(&fine) < 1e-8);
        // The planar projection closes up and the enclosed area is π.
        let m = g.matrix();
        assert!(m[(0, 1)].abs() < 1e-8 && m[(1, 2)].abs() < 1e-8);
        assert!((m[(0, 2)] - PI).abs() < 1e-8);
    }

    #[test]
    fn left_momentum_is_conserved() {
        let b = catalog::builtin("se2").unwrap();
        let (a, h) = (b.algebra(), b.hamiltonian("sr").unwrap());
        let p0 = Covector::new(&[0.6, -0.3, 0.8]);
        let lam = left_flow(a, h, &p0, 4.0, &FlowConfig::default()).unwrap();
        let (jl, _) = momentum_maps(a, &lam).unwrap();
        assert!(jl.distance(&p0) < 1e-8);
    }

    #[test]
    fn right_flow_at_zero_is_start() {
        let (a, h) = heis();
        let q = Covector::new(&[0.1, 0.2, 0.3]);
        let r = right_flow(&a, &h, &q, 0.0, &FlowConfig::default()).unwrap();
        assert_eq!(r.side(), Side::Right);
        assert_eq!(r.covector(), &q);
        assert_eq!(r.g(), &GroupPoint::identity(3));
    }
}
