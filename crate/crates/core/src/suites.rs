//! Property suites over the group catalog, reported as TAP.
//!
//! Every check carries the largest residual it observed and the tolerance it
//! was held to. Seeds are derived from the suite seed and the check name, so
//! a report depends only on the seed and the catalog.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::Rng;

use crate::catalog::{semidirect_s_inverse, GroupBundle};
use crate::error::{Error, Result};
use crate::flows::{
    exp_map, fmt17, killing_hamiltonian, left_flow, right_flow, sr_hamiltonian_weighted, vertical_field,
    vertical_flow, FlowConfig, HamiltonianKind, HamiltonianSpec,
};
use crate::lie::{momentum_maps, AlgebraVector, Covector};
use crate::sampling;
use crate::symmetry::{
    apply_s, corollary1_residual, corollary2_check, group_s, proposition1_residual, theorem_residual,
    verify_candidate, Case, Direction, Verdict, VerifiedSymmetry,
};

pub const THEOREM_TOL: f64 = 1e-6;
pub const PROP1_TOL: f64 = 1e-6;
pub const JACOBI_TOL: f64 = 1e-12;
pub const HOMOMORPHISM_TOL: f64 = 1e-12;
pub const SYMMETRY_GATE_TOL: f64 = 1e-8;
pub const ENERGY_TOL: f64 = 1e-8;
pub const MOMENTUM_TOL: f64 = 1e-7;
pub const TRANSPORT_TOL: f64 = 1e-6;
pub const SEMIDIRECT_TOL: f64 = 1e-10;
pub const KILLING_VERTICAL_TOL: f64 = 1e-14;
pub const MEETING_TOL: f64 = 1e-6;

/// Random `(p, t)` draws per fixture.
pub const DRAWS: usize = 20;
/// Covectors used by the symmetry gate (ball plus sphere).
const GATE_SAMPLES: usize = 1000;
const T_MAX: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Invariants,
    Theorem,
    Prop1,
    Corollaries,
    All,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "invariants" => Suite::Invariants,
            "theorem" => Suite::Theorem,
            "prop1" => Suite::Prop1,
            "corollaries" => Suite::Corollaries,
            "all" => Suite::All,
            other => {
                return Err(Error::Argument(format!(
                    "unknown suite `{other}`; available: invariants, theorem, prop1, corollaries, all"
                )))
            }
        })
    }
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Invariants => "invariants",
            Suite::Theorem => "theorem",
            Suite::Prop1 => "prop1",
            Suite::Corollaries => "corollaries",
            Suite::All => "all",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    /// Largest residual, to be at most `tol`.
    AtMost { max: f64, tol: f64 },
    /// Smallest value, to exceed `bound`.
    Above { min: f64, bound: f64 },
    Failed(String),
    Skipped(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub group: String,
    pub name: String,
    pub outcome: Outcome,
}

impl Check {
    pub fn passed(&self) -> bool {
        match &self.outcome {
            Outcome::AtMost { max, tol } => *max <= *tol,
            Outcome::Above { min, bound } => *min > *bound,
            Outcome::Failed(_) => false,
            Outcome::Skipped(_) => true,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SuiteReport {
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    /// TAP version 13, then per-group maxima of the tolerance checks.
    pub fn to_tap(&self) -> String {
        let mut s = String::from("TAP version 13\n");
        for w in &self.warnings {
            let _ = writeln!(s, "# warning: {w}");
        }
        if self.checks.is_empty() {
            s.push_str("1..0 # SKIP no checks to run\n");
            return s;
        }
        let _ = writeln!(s, "1..{}", self.checks.len());
        for (i, c) in self.checks.iter().enumerate() {
            let status = if c.passed() { "ok" } else { "not ok" };
            let _ = write!(s, "{status} {} - {}/{}/{}", i + 1, c.suite, c.group, c.name);
            let _ = match &c.outcome {
                Outcome::AtMost { max, tol } => writeln!(s, " max {} tol {}", fmt17(*max), fmt17(*tol)),
                Outcome::Above { min, bound } => writeln!(s, " min {} bound {}", fmt17(*min), fmt17(*bound)),
                Outcome::Failed(msg) => writeln!(s, " # {}", msg.replace('\n', " ")),
                Outcome::Skipped(msg) => writeln!(s, " # SKIP {}", msg.replace('\n', " ")),
            };
        }
        let mut maxima: BTreeMap<(&str, &str), f64> = BTreeMap::new();
        for c in &self.checks {
            if let Outcome::AtMost { max, .. } = c.outcome {
                let e = maxima.entry((c.group.as_str(), c.suite)).or_insert(0.0);
                *e = e.max(max);
            }
        }
        for ((group, suite), max) in maxima {
            let _ = writeln!(s, "# {group} {suite} max_residual {}", fmt17(max));
        }
        s
    }
}

/// 64-bit FNV-1a of `name`, mixed with `seed`.
fn derive_seed(seed: u64, name: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ seed.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    for b in name.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

struct Ctx<'a> {
    report: &'a mut SuiteReport,
    suite: &'static str,
    seed: u64,
    cfg: FlowConfig,
}

impl Ctx<'_> {
    fn push(&mut self, group: &str, name: String, outcome: Outcome) {
        self.report.checks.push(Check {
            suite: self.suite,
            group: group.to_string(),
            name,
            outcome,
        });
    }

    /// Records `f`'s largest residual, or its error as a failure.
    fn at_most(&mut self, group: &str, name: String, tol: f64, f: impl FnOnce() -> Result<f64>) {
        let outcome = match f() {
            Ok(max) if max.is_nan() => Outcome::Failed("residual is NaN".into()),
            Ok(max) => Outcome::AtMost { max, tol },
            Err(e) => Outcome::Failed(e.to_string()),
        };
        self.push(group, name, outcome);
    }

    fn seed(&self, name: &str) -> u64 {
        derive_seed(self.seed, name)
    }
}

/// Every candidate of `bundle` that verifies for `h`.
pub fn verified_symmetries(bundle: &GroupBundle, h: &HamiltonianSpec, seed: u64) -> Result<Vec<VerifiedSymmetry>> {
    let mut out = Vec::new();
    for c in bundle.symmetries() {
        if let (Verdict::Verified(v), _) = verify_candidate(bundle.algebra(), c, h, GATE_SAMPLES, seed)? {
            out.push(v);
        }
    }
    Ok(out)
}

/// Seeded `t ∈ (0, T_MAX]`.
fn times(seed: u64, count: usize) -> Vec<f64> {
    let mut r = sampling::rng(seed);
    (0..count).map(|_| T_MAX - r.random_range(0.0..T_MAX)).collect()
}

/// Covectors for a fixture: the unit ball in case (a), the generic set in case (b).
fn fixture_covectors(bundle: &GroupBundle, case: Case, seed: u64) -> Vec<Covector> {
    match case {
        Case::A => {
            let mut r = sampling::rng(seed);
            (0..DRAWS).map(|_| sampling::covector_in_ball(&mut r, bundle.algebra().dim())).collect()
        }
        Case::B => sampling::generic_covectors(bundle.algebra(), DRAWS, seed, 1e-3),
    }
}

fn invariants(ctx: &mut Ctx, bundle: &GroupBundle) {
    let g = bundle.name();
    let alg = bundle.algebra();
    ctx.at_most(g, "jacobi".into(), JACOBI_TOL, || Ok(alg.jacobi_residual().0));
    ctx.at_most(g, "representation_homomorphism".into(), HOMOMORPHISM_TOL, || Ok(alg.homomorphism_residual().0));
    for (hname, h) in bundle.hamiltonians() {
        let seed = ctx.seed(&format!("{g}/{hname}/gate"));
        let verified = match verified_symmetries(bundle, h, seed) {
            Ok(v) => v,
            Err(e) => {
                ctx.push(g, format!("{hname}/verify"), Outcome::Failed(e.to_string()));
                continue;
            }
        };
        for v in &verified {
            let c = &v.classification;
            let algebraic = match v.case {
                Case::A => c.automorphism_residual,
                Case::B => c.anti_automorphism_residual,
            };
            ctx.at_most(g, format!("{hname}/{}/homomorphism", v.name), SYMMETRY_GATE_TOL, || Ok(algebraic));
            ctx.at_most(g, format!("{hname}/{}/preserves_H", v.name), SYMMETRY_GATE_TOL, || Ok(v.residual_h));
        }
        conservation(ctx, bundle, hname, h);
    }
}

fn conservation(ctx: &mut Ctx, bundle: &GroupBundle, hname: &str, h: &HamiltonianSpec) {
    let g = bundle.name();
    let alg = bundle.algebra();
    let seed = ctx.seed(&format!("{g}/{hname}/conservation"));
    let mut r = sampling::rng(seed);
    let draws: Vec<(Covector, f64)> = (0..DRAWS)
        .map(|_| (sampling::covector_in_ball(&mut r, alg.dim()), T_MAX - r.random_range(0.0..T_MAX)))
        .collect();
    let cfg = ctx.cfg;
    let (mut energy, mut jl, mut jr, mut transport) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    let mut failure = None;
    for (p, t) in &draws {
        let run = || -> Result<(f64, f64, f64, f64)> {
            let h0 = h.value(p)?;
            let left = left_flow(alg, h, p, *t, &cfg)?;
            let (jl0, _) = momentum_maps(alg, &crate::lie::CotangentPoint::at_identity(alg, p.clone(), crate::lie::Side::Left))?;
            let (jl1, _) = momentum_maps(alg, &left)?;
            let right = right_flow(alg, h, p, *t, &cfg)?;
            let (_, jr0) = momentum_maps(alg, &crate::lie::CotangentPoint::at_identity(alg, p.clone(), crate::lie::Side::Right))?;
            let (_, jr1) = momentum_maps(alg, &right)?;
            let de = (h.value(left.covector())? - h0).abs().max((h.value(right.covector())? - h0).abs());
            let tr = alg.group_ad_star(left.g(), p)?.distance(left.covector());
            Ok((de / (1.0 + h0.abs()), jl1.distance(&jl0), jr1.distance(&jr0), tr))
        };
        match run() {
            Ok((e, a, b, c)) => {
                energy = energy.max(e);
                jl = jl.max(a);
                jr = jr.max(b);
                transport = transport.max(c);
            }
            Err(e) => {
                failure = Some(e.to_string());
                break;
            }
        }
    }
    if let Some(msg) = failure {
        ctx.push(g, format!("{hname}/conservation"), Outcome::Failed(msg));
        return;
    }
    ctx.push(g, format!("{hname}/energy"), Outcome::AtMost { max: energy, tol: ENERGY_TOL });
    ctx.push(g, format!("{hname}/J_L_left_flow"), Outcome::AtMost { max: jl, tol: MOMENTUM_TOL });
    ctx.push(g, format!("{hname}/J_R_right_flow"), Outcome::AtMost { max: jr, tol: MOMENTUM_TOL });
    ctx.push(g, format!("{hname}/coadjoint_transport"), Outcome::AtMost { max: transport, tol: TRANSPORT_TOL });
}

fn for_each_fixture(
    ctx: &mut Ctx,
    bundle: &GroupBundle,
    only_case_b: bool,
    mut body: impl FnMut(&mut Ctx, &str, &HamiltonianSpec, &VerifiedSymmetry),
) {
    let g = bundle.name();
    for (hname, h) in bundle.hamiltonians() {
        let seed = ctx.seed(&format!("{g}/{hname}/gate"));
        match verified_symmetries(bundle, h, seed) {
            Ok(vs) => {
                for v in vs.iter().filter(|v| !only_case_b || v.case == Case::B) {
                    body(ctx, hname, h, v);
                }
            }
            Err(e) => ctx.push(g, format!("{hname}/verify"), Outcome::Failed(e.to_string())),
        }
    }
}

fn theorem(ctx: &mut Ctx, bundle: &GroupBundle) {
    let g = bundle.name().to_string();
    let alg = bundle.algebra();
    for_each_fixture(ctx, bundle, false, |ctx, hname, h, v| {
        let name = format!("{hname}/{}", v.name);
        let seed = ctx.seed(&format!("{g}/{name}/theorem"));
        let ps = fixture_covectors(bundle, v.case, seed);
        if ps.is_empty() {
            ctx.push(&g, name, Outcome::Skipped("no covectors in the generic set".into()));
            return;
        }
        let ts = times(seed ^ 1, ps.len());
        let cfg = ctx.cfg;
        ctx.at_most(&g, name, THEOREM_TOL, || {
            let mut worst = 0.0_f64;
            for (p, t) in ps.iter().zip(&ts) {
                worst = worst.max(theorem_residual(alg, v, h, p, *t, &cfg)?);
            }
            Ok(worst)
        });
    });
}

fn prop1(ctx: &mut Ctx, bundle: &GroupBundle) {
    let g = bundle.name().to_string();
    let alg = bundle.algebra();
    for_each_fixture(ctx, bundle, true, |ctx, hname, h, v| {
        let name = format!("{hname}/{}", v.name);
        let seed = ctx.seed(&format!("{g}/{name}/prop1"));
        let ps = fixture_covectors(bundle, Case::B, seed);
        if ps.is_empty() {
            ctx.push(&g, name, Outcome::Skipped("no covectors in the generic set".into()));
            return;
        }
        let ts = times(seed ^ 1, ps.len());
        let cfg = ctx.cfg;
        ctx.at_most(&g, name, PROP1_TOL, || {
            let mut worst = 0.0_f64;
            for (p, t) in ps.iter().zip(&ts) {
                worst = worst.max(proposition1_residual(alg, v, h, p, *t, &cfg)?);
            }
            Ok(worst)
        });
    });
}

/// SR Hamiltonian with all weights scaled by `c`, so that `H₂ = c·H₁`.
fn scaled(bundle: &GroupBundle, h: &HamiltonianSpec, c: f64) -> Option<HamiltonianSpec> {
    match h.kind() {
        HamiltonianKind::SubRiemannian { frame, weights } => {
            let w: Vec<f64> = weights.iter().map(|x| x * c).collect();
            sr_hamiltonian_weighted(bundle.algebra(), frame, &w).ok()
        }
        _ => None,
    }
}

fn corollaries(ctx: &mut Ctx, bundle: &GroupBundle) {
    let g = bundle.name().to_string();
    let alg = bundle.algebra();
    let cfg = ctx.cfg;

    // Two problems H₂ = c·H₁ share σ; p₂ = p₁/c reaches the same points.
    const C: f64 = 2.5;
    for_each_fixture(ctx, bundle, false, |ctx, hname, h1, v| {
        let Some(h2) = scaled(bundle, h1, C) else { return };
        let name = format!("{hname}/{}/symmetric_meeting", v.name);
        let seed = ctx.seed(&format!("{g}/{name}"));
        let ps = fixture_covectors(bundle, v.case, seed);
        if ps.is_empty() {
            ctx.push(&g, name, Outcome::Skipped("no covectors in the generic set".into()));
            return;
        }
        let ts = times(seed ^ 1, ps.len());
        ctx.at_most(&g, name, MEETING_TOL, || {
            let mut worst = 0.0_f64;
            for (p1, t) in ps.iter().zip(&ts) {
                let p2 = p1 * (1.0 / C);
                worst = worst.max(corollary1_residual(alg, v, h1, p1, &h2, &p2, *t, &cfg)?);
            }
            Ok(worst)
        });
    });

    if let Some(sd) = bundle.semidirect() {
        for_each_fixture(ctx, bundle, false, |ctx, hname, _, v| {
            if hname != "sr" {
                return;
            }
            let name = format!("{}/semidirect_inverse", v.name);
            let mut r = sampling::rng(ctx.seed(&format!("{g}/{name}")));
            ctx.at_most(&g, name, SEMIDIRECT_TOL, || {
                let mut worst = 0.0_f64;
                for _ in 0..100 {
                    let radius = 2.0 * r.random::<f64>();
                    let xi = AlgebraVector::from(sampling::sphere(&mut r, alg.dim(), radius));
                    let x = alg.group_exp(&xi)?;
                    let (g1, g2) = sd.decompose(&x)?;
                    let (h1, h2) = semidirect_s_inverse(bundle, v, &g1, &g2)?;
                    let direct = group_s(alg, v, &x, Direction::Inverse)?;
                    worst = worst.max(sd.compose(&h1, &h2)?.distance(&direct));
                }
                Ok(worst)
            });
        });
    }

    if let Ok(killing) = killing_hamiltonian(alg) {
        let mut r = sampling::rng(ctx.seed(&format!("{g}/killing_vertical")));
        ctx.at_most(&g, "killing/vertical_field".into(), KILLING_VERTICAL_TOL, || {
            let mut worst = 0.0_f64;
            for _ in 0..100 {
                let p = sampling::covector_in_ball(&mut r, alg.dim());
                worst = worst.max(vertical_field(alg, &killing, &p)?.norm());
            }
            Ok(worst)
        });
        if let Ok(h) = bundle.hamiltonian("sr") {
            geodesic_meetings(ctx, bundle, h, &killing);
        }
    }

    image_is_not_extremal_check(ctx, bundle);
}

/// SR extremals meeting Killing geodesics: `Exp(p, t) = exp(tξ)` with
/// `ξ = log(Exp(p, t))/t`, checked for the symmetric meeting.
fn geodesic_meetings(ctx: &mut Ctx, bundle: &GroupBundle, h: &HamiltonianSpec, killing: &HamiltonianSpec) {
    let g = bundle.name().to_string();
    let alg = bundle.algebra();
    let cfg = ctx.cfg;
    let Some(q) = killing.quadratic_form() else { return };
    let Some(q_inv) = q.try_inverse() else { return };
    for_each_fixture(ctx, bundle, false, |ctx, hname, _, v| {
        if hname != "sr" {
            return;
        }
        let name = format!("{}/geodesic_meeting", v.name);
        let seed = ctx.seed(&format!("{g}/{name}"));
        let mut r = sampling::rng(seed);
        let mut found = 0;
        let mut worst_geodesic = 0.0_f64;
        let mut all = true;
        let mut failure = None;
        for _ in 0..1000 {
            if found == 10 {
                break;
            }
            let candidates = sampling::generic_covectors(alg, 1, r.random(), 1e-3);
            let Some(p) = candidates.first() else { continue };
            let t = 0.2 + 2.8 * r.random::<f64>();
            let step = || -> Result<Option<(f64, bool)>> {
                let end = exp_map(alg, h, p, t, &cfg)?;
                // principal logarithm only: rotation angle below π
                let trace = end.matrix().trace();
                if (trace - 1.0) / 2.0 < -0.99 {
                    return Ok(None);
                }
                let xi = &alg.group_log(&end)? * (1.0 / t);
                let pk = Covector::from_dvector(&q_inv * xi.coords());
                let geodesic = exp_map(alg, killing, &pk, t, &cfg)?.distance(&end);
                Ok(Some((geodesic, corollary2_check(alg, h, v, p, &xi, t, &cfg)?)))
            };
            match step() {
                Ok(Some((d, ok))) => {
                    found += 1;
                    worst_geodesic = worst_geodesic.max(d);
                    all &= ok;
                }
                Ok(None) => {}
                Err(e) => {
                    failure = Some(e.to_string());
                    break;
                }
            }
        }
        let outcome = if let Some(msg) = failure {
            Outcome::Failed(msg)
        } else if found < 10 {
            Outcome::Failed(format!("found only {found} meetings"))
        } else if !all {
            Outcome::Failed("a symmetric meeting exceeded the tolerance".into())
        } else {
            Outcome::AtMost { max: worst_geodesic, tol: MEETING_TOL }
        };
        ctx.push(&g, name, outcome);
    });
}

/// The endpoints `τ ↦ Exp(s(p, τ))` do not trace the extremal of
/// `σ* e^{tHv} p` in case (b); the largest gap over `τ ∈ (0, t]` must be
/// visible.
fn image_is_not_extremal_check(ctx: &mut Ctx, bundle: &GroupBundle) {
    let g = bundle.name().to_string();
    let alg = bundle.algebra();
    let cfg = ctx.cfg;
    for_each_fixture(ctx, bundle, true, |ctx, hname, h, v| {
        if hname != "sr" {
            return;
        }
        let name = format!("{}/image_is_not_extremal", v.name);
        let seed = ctx.seed(&format!("{g}/{name}"));
        let Some(p) = sampling::generic_covectors(alg, 1, seed, 1e-1).pop() else {
            ctx.push(&g, name, Outcome::Skipped("no covectors in the generic set".into()));
            return;
        };
        let t = 3.0;
        let run = || -> Result<f64> {
            let (pt, _) = apply_s(alg, v, h, &p, t, &cfg)?;
            let mut gap = 0.0_f64;
            for k in 1..=30 {
                let tau = t * k as f64 / 30.0;
                let image = exp_map(alg, h, &v.sigma.apply_dual(&vertical_flow(alg, h, &p, tau, &cfg)?), tau, &cfg)?;
                gap = gap.max(image.distance(&exp_map(alg, h, &pt, tau, &cfg)?));
            }
            Ok(gap)
        };
        let outcome = match run() {
            Ok(gap) => Outcome::Above { min: gap, bound: 1e-3 },
            Err(e) => Outcome::Failed(e.to_string()),
        };
        ctx.push(&g, name, outcome);
    });
}

/// Runs `suite` over `groups` with integrator tolerance `1e-10`.
pub fn run_suite(suite: Suite, groups: &[GroupBundle], seed: u64) -> SuiteReport {
    let mut report = SuiteReport::default();
    if groups.is_empty() {
        report.warnings.push("the catalog is empty; nothing was checked".into());
        return report;
    }
    let suites: Vec<Suite> = match suite {
        Suite::All => vec![Suite::Invariants, Suite::Theorem, Suite::Prop1, Suite::Corollaries],
        s => vec![s],
    };
    for s in suites {
        let mut ctx = Ctx {
            report: &mut report,
            suite: s.name(),
            seed,
            cfg: FlowConfig::default(),
        };
        for bundle in groups {
            match s {
                Suite::Invariants => invariants(&mut ctx, bundle),
                Suite::Theorem => theorem(&mut ctx, bundle),
                Suite::Prop1 => prop1(&mut ctx, bundle),
                Suite::Corollaries => corollaries(&mut ctx, bundle),
                Suite::All => unreachable!(),
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn empty_catalog_is_a_vacuous_pass() {
        let r = run_suite(Suite::All, &[], 7);
        assert!(r.passed());
        assert!(r.to_tap().contains("1..0 # SKIP"));
        assert!(r.to_tap().contains("warning"));
    }

    #[test]
    fn suite_names_parse() {
        assert_eq!("prop1".parse::<Suite>().unwrap(), Suite::Prop1);
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn heisenberg_invariants_pass() {
        let r = run_suite(Suite::Invariants, &[catalog::builtin("heisenberg3").unwrap()], 1);
        assert!(r.passed(), "{}", r.to_tap());
        assert!(r.to_tap().contains("# heisenberg3 invariants max_residual"));
    }

    #[test]
    fn failing_check_prints_not_ok() {
        let report = SuiteReport {
            checks: vec![Check {
                suite: "theorem",
                group: "g".into(),
                name: "x".into(),
                outcome: Outcome::AtMost { max: 2.0, tol: 1.0 },
            }],
            warnings: vec![],
        };
        assert!(!report.passed());
        assert!(report.to_tap().contains("not ok 1 - theorem/g/x"));
    }
}
