//! Maxwell points produced by a symmetry of the exponential map.
//!
//! A time `t` is a Maxwell time for `p` when `Exp(p, t) = Exp(s(p, t))` and
//! the two extremals are distinct. Since `Exp ∘ s = S⁻¹ ∘ Exp`, the endpoint
//! then lies in the fixed-point set of `S`, so roots of
//! `t ↦ |S(Exp(p, t)) − Exp(p, t)|` are the candidates.

mod strata;
mod sweep;

pub use strata::{
    classify, se2_coordinates, se2_stratum_classify, sh2_coordinates, sh2_stratum_classify, Axis,
    Stratum, ANGLE_TOL, LINE_TOL,
};
pub use sweep::{
    gnuplot_script, parse_p_grid, run_sweep, stratum_histogram, sweep_csv, SweepRow,
};

use nalgebra::DMatrix;
use serde_json::{json, Value};

use crate::catalog::StratumKind;
use crate::error::{Error, Result};
use crate::flows::{exp_map, DenseFlow, FlowConfig, HamiltonianSpec};
use crate::lie::{Covector, GroupPoint, LieAlgebra};
use crate::symmetry::{apply_s, group_s, require_generic, Case, Direction, VerifiedSymmetry, MEET_TOL};

/// Separation above which two extremals count as distinct.
pub const DISTINCT_TOL: f64 = 1e-5;
pub const DISTINCT_SAMPLES: usize = 64;
/// Residual below which consecutive grid points are treated as one
/// degenerate candidate.
const DEGENERATE_TOL: f64 = 1e-10;

/// `|S(g) − g|`, entrywise max.
pub fn fixed_point_residual(algebra: &LieAlgebra, v: &VerifiedSymmetry, g: &GroupPoint) -> Result<f64> {
    Ok(group_s(algebra, v, g, Direction::Forward)?.distance(g))
}

fn frobenius_sq(algebra: &LieAlgebra, v: &VerifiedSymmetry, g: &GroupPoint) -> Result<f64> {
    let d: DMatrix<f64> = group_s(algebra, v, g, Direction::Forward)?.matrix() - g.matrix();
    Ok(d.norm_squared())
}

/// `|Exp(p, t) − Exp(s(p, t))|`, entrywise max.
pub fn maxwell_meet_residual(
    algebra: &LieAlgebra,
    v: &VerifiedSymmetry,
    h: &HamiltonianSpec,
    p: &Covector,
    t: f64,
    cfg: &FlowConfig,
) -> Result<f64> {
    let (ps, ts) = apply_s(algebra, v, h, p, t, cfg)?;
    Ok(exp_map(algebra, h, p, t, cfg)?.distance(&exp_map(algebra, h, &ps, ts, cfg)?))
}

/// Largest separation of `Exp(p, τ)` and `Exp(p', τ)` over `samples`
/// equispaced `τ ∈ [0, t]`, where `(p', t) = s(p, t)`.
pub fn separation(
    algebra: &LieAlgebra,
    v: &VerifiedSymmetry,
    h: &HamiltonianSpec,
    p: &Covector,
    t: f64,
    samples: usize,
    cfg: &FlowConfig,
) -> Result<f64> {
    if samples < 2 {
        return Err(Error::Argument("distinctness needs at least 2 samples".into()));
    }
    let (ps, _) = apply_s(algebra, v, h, p, t, cfg)?;
    let a = DenseFlow::left(algebra, h, p, t, cfg)?;
    let b = DenseFlow::left(algebra, h, &ps, t, cfg)?;
    let mut worst = 0.0_f64;
    for k in 0..samples {
        let tau = if k + 1 == samples { t } else { t * k as f64 / (samples - 1) as f64 };
        worst = worst.max(a.eval_group(tau)?.distance(&b.eval_group(tau)?));
    }
    Ok(worst)
}

/// Whether the extremal of `p` and its image under `s` differ on `[0, t]`.
pub fn distinctness(
    algebra: &LieAlgebra,
    v: &VerifiedSymmetry,
    h: &HamiltonianSpec,
    p: &Covector,
    t: f64,
    samples: usize,
    cfg: &FlowConfig,
) -> Result<bool> {
    Ok(separation(algebra, v, h, p, t, samples, cfg)? > DISTINCT_TOL)
}

#[derive(Clone, Debug)]
pub struct MaxwellQuery {
    pub symmetry: VerifiedSymmetry,
    pub hamiltonian: HamiltonianSpec,
    pub p: Covector,
    pub t_max_search: f64,
    pub grid_step: f64,
    pub root_tol: f64,
    /// Classifier for the endpoint, if the group registers one.
    pub strata: Option<StratumKind>,
}

impl MaxwellQuery {
    pub fn new(symmetry: VerifiedSymmetry, hamiltonian: HamiltonianSpec, p: Covector, t_max_search: f64) -> Self {
        Self {
            symmetry,
            hamiltonian,
            p,
            t_max_search,
            grid_step: 1e-2,
            root_tol: 1e-9,
            strata: None,
        }
    }

    pub fn with_grid_step(mut self, step: f64) -> Self {
        self.grid_step = step;
        self
    }

    pub fn with_strata(mut self, strata: Option<StratumKind>) -> Self {
        self.strata = strata;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.grid_step > 0.0) || !self.grid_step.is_finite() {
            return Err(Error::Argument(format!("grid step must be positive, got {}", self.grid_step)));
        }
        if !(self.t_max_search > self.grid_step) || !self.t_max_search.is_finite() {
            return Err(Error::Argument(format!(
                "search horizon {} must exceed the grid step {}",
                self.t_max_search, self.grid_step
            )));
        }
        if !(self.root_tol > 0.0) {
            return Err(Error::Argument("root tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// A refined root of the fixed-point residual that was not reported.
#[derive(Clone, Debug, PartialEq)]
pub struct SkippedRoot {
    pub time: f64,
    pub fixed_point_residual: f64,
    pub meet_residual: f64,
    pub distinct: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaxwellResult {
    /// `f64::INFINITY` when no Maxwell point was found before the horizon.
    pub time: f64,
    /// `Exp(p, time)`, or the endpoint at the grid's smallest residual.
    pub endpoint: GroupPoint,
    pub fixed_point_residual: f64,
    pub meet_residual: f64,
    pub distinct: bool,
    pub stratum: Option<Stratum>,
    pub skipped_roots: Vec<SkippedRoot>,
}

/// JSON number, with non-finite values as the strings `inf`, `-inf`, `nan`.
pub(crate) fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::String(crate::flows::fmt17(x))
    }
}

impl MaxwellResult {
    pub fn is_finite(&self) -> bool {
        self.time.is_finite()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "time": num(self.time),
            "endpoint": self.endpoint.matrix().row_iter()
                .map(|r| r.iter().map(|x| num(*x)).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "fixed_point_residual": num(self.fixed_point_residual),
            "meet_residual": num(self.meet_residual),
            "distinct": self.distinct,
            "stratum": self.stratum.map(|s| s.label()),
            "skipped_roots": self.skipped_roots.iter().map(|r| json!({
                "time": num(r.time),
                "fixed_point_residual": num(r.fixed_point_residual),
                "meet_residual": num(r.meet_residual),
                "distinct": r.distinct,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Golden-section minimization of `f` on `[a, b]` down to width `tol`.
fn golden_section(mut a: f64, mut b: f64, tol: f64, f: &mut impl FnMut(f64) -> Result<f64>) -> Result<(f64, f64)> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

/// Vertex of the parabola through `(t − δ, a)`, `(t, b)`, `(t + δ, c)`.
fn parabola_vertex(t: f64, delta: f64, a: f64, b: f64, c: f64) -> Option<f64> {
    let curvature = a - 2.0 * b + c;
    (curvature > 0.0).then(|| t + 0.5 * delta * (a - c) / curvature)
}

/// Scans `(0, t_max_search]`, refines each dip of the fixed-point residual,
/// and returns the first refined root where the extremals meet and are
/// distinct. Non-distinct roots are kept in `skipped_roots`.
pub fn first_maxwell_time(algebra: &LieAlgebra, q: &MaxwellQuery, cfg: &FlowConfig) -> Result<MaxwellResult> {
    q.validate()?;
    let (v, h, p) = (&q.symmetry, &q.hamiltonian, &q.p);
    if v.case == Case::B {
        require_generic(algebra, p)?;
    }
    let flow = DenseFlow::left(algebra, h, p, q.t_max_search, cfg).map_err(|e| match e {
        Error::Integration { last_time, reason } => Error::Integration {
            last_time,
            reason: format!("{reason}; Maxwell scan covered [0, {last_time}] only"),
        },
        other => other,
    })?;
    let classify_end = |g: &GroupPoint| -> Result<Option<Stratum>> {
        q.strata.map(|k| classify(k, g)).transpose()
    };

    // Case (a) with σ*p = p: s is the identity on this extremal.
    if v.case == Case::A && v.sigma.apply_dual(p).distance(p) <= 1e-12 * (1.0 + p.norm()) {
        let endpoint = flow.eval_group(q.t_max_search)?;
        return Ok(MaxwellResult {
            time: f64::INFINITY,
            fixed_point_residual: fixed_point_residual(algebra, v, &endpoint)?,
            meet_residual: 0.0,
            distinct: false,
            stratum: None,
            endpoint,
            skipped_roots: vec![],
        });
    }

    let count = (q.t_max_search / q.grid_step).floor() as usize;
    let mut times = Vec::with_capacity(count);
    let mut res = Vec::with_capacity(count);
    for k in 1..=count {
        let t = k as f64 * q.grid_step;
        times.push(t);
        res.push(frobenius_sq(algebra, v, &flow.eval_group(t)?)?.sqrt());
    }

    // Candidate brackets: strict-enough local minima whose squared residual
    // extrapolates to zero, and the start of each degenerate run.
    let mut candidates: Vec<(usize, bool)> = Vec::new();
    let mut k = 0;
    while k < res.len() {
        if res[k] <= DEGENERATE_TOL {
            candidates.push((k, true));
            while k < res.len() && res[k] <= DEGENERATE_TOL {
                k += 1;
            }
            continue;
        }
        if k > 0 && k + 1 < res.len() && res[k] <= res[k - 1] && res[k] < res[k + 1] {
            let (a, b, c) = (res[k - 1].powi(2), res[k].powi(2), res[k + 1].powi(2));
            let predicted = match parabola_vertex(0.0, 1.0, a, b, c) {
                Some(x) => b - 0.25 * (a - c) * x,
                None => b,
            };
            if predicted <= 0.05 * a.max(c) {
                candidates.push((k, false));
            }
        }
        k += 1;
    }

    let mut skipped = Vec::new();
    let exact = |t: f64| -> Result<GroupPoint> { Ok(flow.exact_at(algebra, h, t, cfg)?.g().clone()) };
    for (k, degenerate) in candidates {
        let t_root = if degenerate {
            times[k]
        } else {
            let lo = if k == 0 { times[k] } else { times[k - 1] };
            let hi = times[(k + 1).min(times.len() - 1)];
            let mut f = |t: f64| Ok(frobenius_sq(algebra, v, &exact(t)?)?.sqrt());
            let (t0, r0) = golden_section(lo, hi, q.root_tol, &mut f)?;
            // The squared residual is smooth and locally quadratic at a root.
            let delta = 1e-6_f64.min(0.25 * (hi - lo));
            let (a, c) = (f(t0 - delta)?.powi(2), f(t0 + delta)?.powi(2));
            match parabola_vertex(t0, delta, a, r0 * r0, c) {
                Some(t1) if t1 > lo && t1 < hi && f(t1)? < r0 => t1,
                _ => t0,
            }
        };
        let endpoint = exact(t_root)?;
        let fp = fixed_point_residual(algebra, v, &endpoint)?;
        if fp > MEET_TOL {
            continue;
        }
        let meet = maxwell_meet_residual(algebra, v, h, p, t_root, cfg)?;
        let distinct = distinctness(algebra, v, h, p, t_root, DISTINCT_SAMPLES, cfg)?;
        if meet <= MEET_TOL && distinct {
            return Ok(MaxwellResult {
                time: t_root,
                stratum: classify_end(&endpoint)?,
                endpoint,
                fixed_point_residual: fp,
                meet_residual: meet,
                distinct,
                skipped_roots: skipped,
            });
        }
        skipped.push(SkippedRoot {
            time: t_root,
            fixed_point_residual: fp,
            meet_residual: meet,
            distinct,
        });
    }

    let (kmin, _) = res
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bv), (i, &r)| if r < bv { (i, r) } else { (bi, bv) });
    let endpoint = exact(times[kmin])?;
    Ok(MaxwellResult {
        time: f64::INFINITY,
        fixed_point_residual: fixed_point_residual(algebra, v, &endpoint)?,
        meet_residual: maxwell_meet_residual(algebra, v, h, p, times[kmin], cfg)?,
        distinct: false,
        stratum: None,
        endpoint,
        skipped_roots: skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::symmetry::{verify_candidate, Verdict};
    use std::f64::consts::PI;

    fn setup(group: &str, sym: &str) -> (catalog::GroupBundle, VerifiedSymmetry, HamiltonianSpec) {
        let b = catalog::builtin(group).unwrap();
        let h = b.hamiltonian("sr").unwrap().clone();
        let Verdict::Verified(v) = verify_candidate(b.algebra(), b.symmetry(sym).unwrap(), &h, 100, 3).unwrap().0 else {
            panic!("{group}/{sym} rejected")
        };
        (b, v, h)
    }

    #[test]
    fn identity_is_fixed() {
        let (b, v, _) = setup("se2", "eps_central");
        assert_eq!(fixed_point_residual(b.algebra(), &v, &GroupPoint::identity(3)).unwrap(), 0.0);
    }

    #[test]
    fn translations_fixed_by_translation_symmetry() {
        let (b, v, _) = setup("se2", "eps_translation");
        let t = GroupPoint::new(DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 1.5, 0.0, 1.0, -0.4, 0.0, 0.0, 1.0])).unwrap();
        assert!(fixed_point_residual(b.algebra(), &v, &t).unwrap() < 1e-15);
        let r = GroupPoint::new(DMatrix::from_row_slice(3, 3, &[0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0])).unwrap();
        assert!(fixed_point_residual(b.algebra(), &v, &r).unwrap() > 0.5);
    }

    #[test]
    fn heisenberg_meet_residual() {
        let (b, v, h) = setup("heisenberg3", "rot90");
        let p = Covector::new(&[1.0, 0.0, 1.0]);
        let cfg = FlowConfig::default();
        assert!(maxwell_meet_residual(b.algebra(), &v, &h, &p, 2.0 * PI, &cfg).unwrap() <= 1e-6);
        assert!(maxwell_meet_residual(b.algebra(), &v, &h, &p, 1.0, &cfg).unwrap() > 1e-3);
    }

    #[test]
    fn heisenberg_first_maxwell_time_is_full_circle() {
        let (b, v, h) = setup("heisenberg3", "rot90");
        let q = MaxwellQuery::new(v, h, Covector::new(&[1.0, 0.0, 1.0]), 10.0);
        let r = first_maxwell_time(b.algebra(), &q, &FlowConfig::default()).unwrap();
        assert!((r.time - 2.0 * PI).abs() < 1e-6, "{}", r.time);
        assert!(r.distinct && r.meet_residual <= 1e-6 && r.fixed_point_residual <= 1e-6);
        // endpoint (0, 0, π)
        assert!((r.endpoint.matrix()[(0, 2)] - PI).abs() < 1e-6);
    }

    #[test]
    fn straight_line_has_no_maxwell_point() {
        let (b, v, h) = setup("heisenberg3", "rot90");
        let q = MaxwellQuery::new(v, h, Covector::new(&[1.0, 0.0, 0.0]), 20.0);
        let r = first_maxwell_time(b.algebra(), &q, &FlowConfig::default()).unwrap();
        assert!(r.time.is_infinite());
        assert!(r.fixed_point_residual > 1e-3);
    }

    #[test]
    fn identity_symmetry_gives_infinity() {
        let (b, v, h) = setup("se2", "identity");
        let q = MaxwellQuery::new(v, h, Covector::new(&[0.8, 0.3, 0.6]), 5.0);
        assert!(first_maxwell_time(b.algebra(), &q, &FlowConfig::default()).unwrap().time.is_infinite());
    }

    #[test]
    fn identity_is_never_distinct() {
        let (b, v, h) = setup("heisenberg3", "identity");
        let p = Covector::new(&[1.0, 0.0, 1.0]);
        assert!(!distinctness(b.algebra(), &v, &h, &p, 3.0, 64, &FlowConfig::default()).unwrap());
    }

    #[test]
    fn engel_case_b_is_refused() {
        let (b, v, h) = setup("engel4", "reflect_b");
        let q = MaxwellQuery::new(v, h, Covector::new(&[0.3, -0.7, 0.2, 0.9]), 5.0);
        assert!(matches!(
            first_maxwell_time(b.algebra(), &q, &FlowConfig::default()),
            Err(Error::GenericSet { .. })
        ));
    }

    #[test]
    fn bad_grid_is_rejected() {
        let (b, v, h) = setup("se2", "identity");
        let q = MaxwellQuery::new(v, h, Covector::new(&[1.0, 0.0, 0.0]), 1e-3);
        assert!(matches!(first_maxwell_time(b.algebra(), &q, &FlowConfig::default()), Err(Error::Argument(_))));
    }

    #[test]
    fn no_earlier_grid_point_meets() {
        let (b, v, h) = setup("se2", "eps_central");
        let p = Covector::new(&[0.6, 0.5, 0.8]);
        let cfg = FlowConfig::default();
        let q = MaxwellQuery::new(v.clone(), h.clone(), p.clone(), 15.0).with_grid_step(0.05);
        let r = first_maxwell_time(b.algebra(), &q, &cfg).unwrap();
        assert!(r.is_finite(), "{r:?}");
        let mut t = 0.05;
        while t < r.time - 0.05 {
            let meets = maxwell_meet_residual(b.algebra(), &v, &h, &p, t, &cfg).unwrap() <= MEET_TOL;
            assert!(!(meets && distinctness(b.algebra(), &v, &h, &p, t, 64, &cfg).unwrap()), "{t}");
            t += 0.05;
        }
    }

    #[test]
    fn json_encodes_infinity() {
        let (b, v, h) = setup("heisenberg3", "rot90");
        let q = MaxwellQuery::new(v, h, Covector::new(&[1.0, 0.0, 0.0]), 2.0);
        let j = first_maxwell_time(b.algebra(), &q, &FlowConfig::default()).unwrap().to_json();
        assert_eq!(j["time"], "inf");
    }
}
