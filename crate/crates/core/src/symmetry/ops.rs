use super::{Case, Direction, VerifiedSymmetry};
use crate::error::{Error, Result};
use crate::flows::{
    exp_map, killing_hamiltonian, left_flow, right_flow, vertical_flow, FlowConfig,
    HamiltonianSpec,
};
use crate::lie::{
    compare_cotangent, orbit_report, AlgebraVector, Covector, GroupPoint, LieAlgebra,
    OrbitReport, DEFAULT_RANK_TOL,
};

/// Tolerance for two group points to count as the same meeting point.
pub const MEET_TOL: f64 = 1e-6;

/// Returns the orbit report of `p`, or a generic-set error.
pub fn require_generic(algebra: &LieAlgebra, p: &Covector) -> Result<OrbitReport> {
    let report = orbit_report(algebra, p, DEFAULT_RANK_TOL);
    if !report.in_generic_set {
        return Err(Error::GenericSet {
            message: format!(
                "orbit codimension {}, stabilizer pairing {:?}",
                report.codim, report.pairing
            ),
            report: Box::new(report),
        });
    }
    Ok(report)
}

/// `s(p, t)`: `(σ*p, t)` in case (a), `(σ* e^{tHv} p, t)` in case (b).
pub fn apply_s(
    algebra: &LieAlgebra,
    v: &VerifiedSymmetry,
    h: &HamiltonianSpec,
    p: &Covector,
    t: f64,
    cfg: &FlowConfig,
) -> Result<(Covector, f64)> {
    if !(t > 0.0) {
        return Err(Error::Argument(format!("s is defined for t > 0, got {t}")));
    }
    match v.case {
        Case::A => Ok((v.sigma.apply_dual(p), t)),
        Case::B => {
            require_generic(algebra, p)?;
            let pt = vertical_flow(algebra, h, p, t, cfg)?;
            Ok((v.sigma.apply_dual(&pt), t))
        }
    }
}

/// `S(g)` or `S⁻¹(g)`.
pub fn group_s(
    algebra: &LieAlgebra,
    v: &VerifiedSymmetry,
    g: &GroupPoint,
    direction: Direction,
) -> Result<GroupPoint> {
    v.map.apply(algebra, &v.sigma, g, direction)
}

/// `‖Exp(s(p, t)) − S⁻¹(Exp(p, t))‖`, entrywise max.
pub fn theorem_residual(
    algebra: &LieAlgebra,
    v: &VerifiedSymmetry,
    h: &HamiltonianSpec,
    p: &Covector,
    t: f64,
    cfg: &FlowConfig,
) -> Result<f64> {
    let (ps, ts) = apply_s(algebra, v, h, p, t, cfg)?;
    let lhs = exp_map(algebra, h, &ps, ts, cfg)?;
    let rhs = group_s(algebra, v, &exp_map(algebra, h, p, t, cfg)?, Direction::Inverse)?;
    Ok(lhs.distance(&rhs))
}

/// Distance between the right flow of `H ∘ σ*` from `(id, e^{tHv} p0)` and the
/// left flow of `H` from `(id, p0)`, both at time `t`.
pub fn proposition1_residual(
    algebra: &LieAlgebra,
    v: &VerifiedSymmetry,
    h: &HamiltonianSpec,
    p0: &Covector,
    t: f64,
    cfg: &FlowConfig,
) -> Result<f64> {
    if v.case != Case::B {
        return Err(Error::Argument(format!(
            "`{}` is a case-(a) symmetry; the right-flow identity concerns case (b)",
            v.name
        )));
    }
    require_generic(algebra, p0)?;
    let hr = h.compose_dual(&v.sigma)?;
    let q0 = vertical_flow(algebra, h, p0, t, cfg)?;
    let right = right_flow(algebra, &hr, &q0, t, cfg)?;
    let left = left_flow(algebra, h, p0, t, cfg)?;
    compare_cotangent(algebra, &left, &right)
}

/// Symmetric meetings of two extremals of different Hamiltonians sharing `σ`.
///
/// Requires `Exp₁(p1, t) = Exp₂(p2, t)` within `1e-8` and returns the
/// distance between `Exp₁(s(p1, t))` and `Exp₂(s(p2, t))`.
#[allow(clippy::too_many_arguments)]
pub fn corollary1_residual(
    algebra: &LieAlgebra,
    v: &VerifiedSymmetry,
    h1: &HamiltonianSpec,
    p1: &Covector,
    h2: &HamiltonianSpec,
    p2: &Covector,
    t: f64,
    cfg: &FlowConfig,
) -> Result<f64> {
    let g1 = exp_map(algebra, h1, p1, t, cfg)?;
    let g2 = exp_map(algebra, h2, p2, t, cfg)?;
    let gap = g1.distance(&g2);
    if gap > 1e-8 {
        return Err(Error::Argument(format!(
            "the two extremals do not meet at t = {t}: distance {gap:.3e}"
        )));
    }
    let (q1, _) = apply_s(algebra, v, h1, p1, t, cfg)?;
    let (q2, _) = apply_s(algebra, v, h2, p2, t, cfg)?;
    Ok(exp_map(algebra, h1, &q1, t, cfg)?.distance(&exp_map(algebra, h2, &q2, t, cfg)?))
}

/// Given a meeting `Exp(p, t) = exp(tξ)` of a normal extremal with a Killing
/// geodesic, checks that the symmetric extremal meets the symmetric geodesic,
/// and that the latter is again the one-parameter subgroup of `σ⁻¹ξ`.
#[allow(clippy::too_many_arguments)]
pub fn corollary2_check(
    algebra: &LieAlgebra,
    h: &HamiltonianSpec,
    v: &VerifiedSymmetry,
    p: &Covector,
    xi: &AlgebraVector,
    t: f64,
    cfg: &FlowConfig,
) -> Result<bool> {
    killing_hamiltonian(algebra).map_err(|e| {
        Error::Argument(format!("a compact group with a Killing metric is required: {e}"))
    })?;
    let geodesic_end = algebra.group_exp(&(xi * t))?;
    let gap = exp_map(algebra, h, p, t, cfg)?.distance(&geodesic_end);
    if gap > MEET_TOL {
        return Err(Error::Argument(format!(
            "extremal and geodesic do not meet at t = {t}: distance {gap:.3e}"
        )));
    }
    let (ps, _) = apply_s(algebra, v, h, p, t, cfg)?;
    let symmetric_extremal = exp_map(algebra, h, &ps, t, cfg)?;
    let symmetric_geodesic = group_s(algebra, v, &geodesic_end, Direction::Inverse)?;
    let subgroup = algebra.group_exp(&(&v.sigma.inverse().apply(xi) * t))?;
    Ok(symmetric_extremal.distance(&symmetric_geodesic) <= MEET_TOL
        && symmetric_geodesic.distance(&subgroup) <= MEET_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::symmetry::{verify_candidate, Verdict};

    fn verified(group: &str, sym: &str) -> (catalog::GroupBundle, VerifiedSymmetry) {
        let b = catalog::builtin(group).unwrap();
        let (v, _) = verify_candidate(
            b.algebra(),
            b.symmetry(sym).unwrap(),
            b.hamiltonian("sr").unwrap(),
            200,
            42,
        )
        .unwrap();
        match v {
            Verdict::Verified(v) => (b, v),
            Verdict::Rejected => panic!("{group}/{sym} rejected"),
        }
    }

    #[test]
    fn heisenberg_case_b_apply_s_at_pi() {
        let (b, v) = verified("heisenberg3", "reflect_b");
        assert_eq!(v.case, Case::B);
        let (p, t) = apply_s(
            b.algebra(),
            &v,
            b.hamiltonian("sr").unwrap(),
            &Covector::new(&[1.0, 0.0, 1.0]),
            std::f64::consts::PI,
            &FlowConfig::default(),
        )
        .unwrap();
        assert_eq!(t, std::f64::consts::PI);
        let expected = v.sigma.apply_dual(&Covector::new(&[-1.0, 0.0, 1.0]));
        assert!(p.distance(&expected) < 1e-9);
    }

    #[test]
    fn case_b_outside_generic_set_errors() {
        let (b, v) = verified("heisenberg3", "reflect_b");
        let r = apply_s(
            b.algebra(),
            &v,
            b.hamiltonian("sr").unwrap(),
            &Covector::new(&[1.0, 0.0, 0.0]),
            1.0,
            &FlowConfig::default(),
        );
        assert!(matches!(r, Err(Error::GenericSet { .. })));
    }

    #[test]
    fn theorem_residual_se2_case_a() {
        let (b, v) = verified("se2", "sigma1");
        let r = theorem_residual(
            b.algebra(),
            &v,
            b.hamiltonian("sr").unwrap(),
            &Covector::new(&[0.7, 0.0, 0.4]),
            3.0,
            &FlowConfig::default(),
        )
        .unwrap();
        assert!(r <= 1e-6, "{r}");
    }

    #[test]
    fn theorem_residual_heisenberg_case_b() {
        let (b, v) = verified("heisenberg3", "reflect_b");
        let r = theorem_residual(
            b.algebra(),
            &v,
            b.hamiltonian("sr").unwrap(),
            &Covector::new(&[1.0, 0.0, 0.5]),
            2.0,
            &FlowConfig::default(),
        )
        .unwrap();
        assert!(r <= 1e-6, "{r}");
    }

    #[test]
    fn proposition1_at_zero_and_positive_time() {
        let (b, v) = verified("se2", "eps_central");
        let (a, h) = (b.algebra(), b.hamiltonian("sr").unwrap());
        let p0 = Covector::new(&[1.0, 0.2, 0.3]);
        let cfg = FlowConfig::default();
        assert!(proposition1_residual(a, &v, h, &p0, 0.0, &cfg).unwrap() < 1e-15);
        let r = proposition1_residual(a, &v, h, &p0, 1.5, &cfg).unwrap();
        assert!(r <= 1e-6, "{r}");
    }

    #[test]
    fn proposition1_rejects_case_a() {
        let (b, v) = verified("se2", "identity");
        let r = proposition1_residual(
            b.algebra(),
            &v,
            b.hamiltonian("sr").unwrap(),
            &Covector::new(&[1.0, 0.2, 0.3]),
            1.0,
            &FlowConfig::default(),
        );
        assert!(matches!(r, Err(Error::Argument(_))));
    }

    #[test]
    fn corollary2_on_a_subgroup_extremal() {
        // p = f1: the vertical field vanishes and Exp(p, t) = exp(t e1).
        let (b, v) = verified("so3", "flip_e1");
        let xi = AlgebraVector::basis(3, 0);
        let ok = corollary2_check(
            b.algebra(),
            b.hamiltonian("sr").unwrap(),
            &v,
            &Covector::basis(3, 0),
            &xi,
            1.3,
            &FlowConfig::default(),
        )
        .unwrap();
        assert!(ok);
    }

    #[test]
    fn corollary2_requires_compact_group() {
        let (b, v) = verified("se2", "identity");
        let r = corollary2_check(
            b.algebra(),
            b.hamiltonian("sr").unwrap(),
            &v,
            &Covector::basis(3, 0),
            &AlgebraVector::basis(3, 0),
            1.0,
            &FlowConfig::default(),
        );
        assert!(matches!(r, Err(Error::Argument(_))));
    }
}
