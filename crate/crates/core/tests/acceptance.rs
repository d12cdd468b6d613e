//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use liemax::catalog::{self, GroupBundle};
use liemax::exec::Execution;
use liemax::flows::FlowConfig;
use liemax::lie::Covector;
use liemax::maxwell::{self, first_maxwell_time, MaxwellQuery, Stratum};
use liemax::sampling;
use liemax::suites::{run_suite, Check, Outcome, Suite, SuiteReport};
use liemax::symmetry::{verify_candidate, Case, Verdict, VerifiedSymmetry};
use rand::Rng;

const SEED: u64 = 7;

struct Verdicts {
    lines: Vec<(bool, String)>,
}

impl Verdicts {
    fn record(&mut self, id: usize, title: &str, ok: bool, detail: String, started: Instant) {
        let status = if ok { "PASS" } else { "FAIL" };
        let line = format!("{status} [{id}] {title}: {detail} ({:.1}s)", started.elapsed().as_secs_f64());
        println!("{line}");
        self.lines.push((ok, line));
    }
}

fn builtins() -> Vec<GroupBundle> {
    catalog::builtin_names().iter().map(|n| catalog::builtin(n).unwrap()).collect()
}

/// Largest `AtMost` residual among checks matching `keep`, and whether all passed.
fn summarize<'a>(checks: impl Iterator<Item = &'a Check>) -> (bool, f64, usize, Vec<String>) {
    let (mut ok, mut worst, mut count, mut failures) = (true, 0.0_f64, 0, Vec::new());
    for c in checks {
        count += 1;
        if let Outcome::AtMost { max, .. } = c.outcome {
            worst = worst.max(max);
        }
        if !c.passed() {
            ok = false;
            failures.push(format!("{}/{}: {:?}", c.group, c.name, c.outcome));
        }
    }
    (ok, worst, count, failures)
}

fn suite_criterion(v: &mut Verdicts, id: usize, title: &str, report: &SuiteReport, keep: impl Fn(&Check) -> bool) {
    let started = Instant::now();
    let (ok, worst, count, failures) = summarize(report.checks.iter().filter(|c| keep(c)));
    let ok = ok && count > 0;
    let mut detail = format!("{count} checks, worst residual {worst:.3e}");
    if !failures.is_empty() {
        detail.push_str(&format!("; failures: {}", failures.join("; ")));
    }
    v.record(id, title, ok, detail, started);
}

/// Closed-form Heisenberg extremal of `p = (1, 0, 1)`:
/// `a = sin t`, `b = 1 − cos t`, `c = t/2 − sin(2t)/4`.
fn heisenberg_closed_form(t: f64) -> (f64, f64, f64) {
    (t.sin(), 1.0 - t.cos(), 0.5 * t - 0.25 * (2.0 * t).sin())
}

/// Squared Frobenius residual of the quarter turn `(a, b, c) ↦ (−b, a, c − ab)`.
fn quarter_turn_residual_sq(t: f64) -> f64 {
    let (a, b, _) = heisenberg_closed_form(t);
    (a + b).powi(2) + (a - b).powi(2) + (a * b).powi(2)
}

/// First root of the closed-form residual: scan at step 1e-4 on (0, 10],
/// then the vertex of the parabola through the three grid points around the
/// first dip.
fn heisenberg_oracle() -> Option<f64> {
    let step = 1e-4;
    let n = (10.0 / step) as usize;
    let r: Vec<f64> = (1..=n).map(|k| quarter_turn_residual_sq(k as f64 * step)).collect();
    for k in 1..n - 1 {
        if r[k] <= r[k - 1] && r[k] < r[k + 1] && r[k] < 1e-6 {
            let t = (k + 1) as f64 * step;
            let curvature = r[k - 1] - 2.0 * r[k] + r[k + 1];
            return Some(t + 0.5 * step * (r[k - 1] - r[k + 1]) / curvature);
        }
    }
    None
}

fn verified(b: &GroupBundle, sym: &str) -> VerifiedSymmetry {
    match verify_candidate(b.algebra(), b.symmetry(sym).unwrap(), b.hamiltonian("sr").unwrap(), 100, 0).unwrap().0 {
        Verdict::Verified(v) => v,
        Verdict::Rejected => panic!("{sym} rejected"),
    }
}

/// Unit-speed SE(2) covectors `(cos θ, p₂, sin θ)` in the generic set.
fn se2_sweep_covectors(b: &GroupBundle, count: usize) -> Vec<Covector> {
    let mut r = sampling::rng(SEED);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let th: f64 = r.random_range(0.0..2.0 * PI);
        let p = Covector::new(&[th.cos(), r.random_range(-2.0..2.0), th.sin()]);
        if liemax::lie::orbit_report(b.algebra(), &p, 1e-9).in_generic_set {
            out.push(p);
        }
    }
    out
}

fn maxwell_criterion(v: &mut Verdicts) {
    let started = Instant::now();
    let cfg = FlowConfig::default();
    let heis = catalog::builtin("heisenberg3").unwrap();
    let rot = verified(&heis, "rot90");
    let h = heis.hamiltonian("sr").unwrap().clone();
    let mut notes = Vec::new();
    let mut ok = true;

    let q = MaxwellQuery::new(rot.clone(), h.clone(), Covector::new(&[1.0, 0.0, 1.0]), 10.0);
    match (first_maxwell_time(heis.algebra(), &q, &cfg), heisenberg_oracle()) {
        (Ok(r), Some(oracle)) => {
            let gap = (r.time - oracle).abs();
            ok &= gap <= 1e-6;
            notes.push(format!("heisenberg t = {:.12} vs oracle {oracle:.12} (gap {gap:.2e})", r.time));
        }
        (r, o) => {
            ok = false;
            notes.push(format!("heisenberg fixture: solver {:?}, oracle {o:?}", r.map(|x| x.time)));
        }
    }
    let q = MaxwellQuery::new(rot, h, Covector::new(&[1.0, 0.0, 0.0]), 20.0);
    match first_maxwell_time(heis.algebra(), &q, &cfg) {
        Ok(r) if r.time.is_infinite() => notes.push("straight line: inf".into()),
        other => {
            ok = false;
            notes.push(format!("straight line: {:?}", other.map(|r| r.time)));
        }
    }

    let se2 = catalog::builtin("se2").unwrap();
    let h = se2.hamiltonian("sr").unwrap();
    let ps = se2_sweep_covectors(&se2, 200);
    for c in se2.symmetries() {
        let Verdict::Verified(sym) = verify_candidate(se2.algebra(), c, h, 100, 0).unwrap().0 else { continue };
        if sym.case != Case::B {
            continue;
        }
        let rows = maxwell::run_sweep(se2.algebra(), &sym, h, &ps, 20.0, 1e-2, se2.strata(), &cfg, Execution::default())
            .unwrap();
        let (mut finite, mut errors, mut unlabeled, mut worst) = (0, 0, 0, 0.0_f64);
        for row in &rows {
            match &row.result {
                Ok(r) if r.is_finite() => {
                    finite += 1;
                    worst = worst.max(r.fixed_point_residual);
                    if matches!(r.stratum, None | Some(Stratum::None)) {
                        unlabeled += 1;
                    }
                }
                Ok(_) => {}
                Err(_) => errors += 1,
            }
        }
        ok &= errors == 0 && unlabeled == 0 && worst <= 1e-6;
        notes.push(format!(
            "se2/{}: {finite}/200 finite, worst residual {worst:.2e}, {unlabeled} none, {errors} errors",
            sym.name
        ));
    }
    v.record(7, "Maxwell suite", ok, notes.join("; "), started);
}

fn determinism_criterion(v: &mut Verdicts, first: &SuiteReport) {
    let started = Instant::now();
    let second = run_suite(Suite::All, &builtins(), SEED);
    let same_check = first.to_tap() == second.to_tap();

    let se2 = catalog::builtin("se2").unwrap();
    let sym = verified(&se2, "eps_central");
    let h = se2.hamiltonian("sr").unwrap();
    let ps = maxwell::parse_p_grid("0.6:0.6:1,-1.5:1.5:12,0.8:0.8:1", 3).unwrap();
    let sweep = |jobs| {
        let rows = maxwell::run_sweep(
            se2.algebra(),
            &sym,
            h,
            &ps,
            20.0,
            1e-2,
            se2.strata(),
            &FlowConfig::default(),
            Execution::with_jobs(jobs),
        )
        .unwrap();
        maxwell::sweep_csv(&rows, 3)
    };
    let same_sweep = sweep(1) == sweep(8);
    v.record(
        8,
        "Determinism",
        same_check && same_sweep,
        format!("check --suite all --seed 7 identical: {same_check}; sweep jobs 1 vs 8 identical: {same_sweep}"),
        started,
    );
}

fn main() -> ExitCode {
    let mut v = Verdicts { lines: Vec::new() };
    let started = Instant::now();
    let report = run_suite(Suite::All, &builtins(), SEED);
    println!("suite run (seed {SEED}) took {:.1}s", started.elapsed().as_secs_f64());

    suite_criterion(&mut v, 1, "Theorem suite", &report, |c| c.suite == "theorem");
    suite_criterion(&mut v, 2, "Proposition suite (right-flow identity)", &report, |c| c.suite == "prop1");
    suite_criterion(&mut v, 3, "Conservation suite", &report, |c| {
        c.suite == "invariants"
            && ["energy", "J_L_left_flow", "J_R_right_flow", "coadjoint_transport", "conservation"]
                .iter()
                .any(|k| c.name.ends_with(k))
    });
    suite_criterion(&mut v, 4, "Algebraic gates", &report, |c| {
        c.suite == "invariants"
            && ["jacobi", "representation_homomorphism", "homomorphism", "preserves_H", "verify"]
                .iter()
                .any(|k| c.name.ends_with(k))
    });
    suite_criterion(&mut v, 5, "Semidirect inverse suite", &report, |c| {
        c.suite == "corollaries" && c.name.ends_with("semidirect_inverse")
    });
    suite_criterion(&mut v, 6, "Killing geodesic suite", &report, |c| {
        c.suite == "corollaries" && (c.name == "killing/vertical_field" || c.name.ends_with("geodesic_meeting"))
    });
    maxwell_criterion(&mut v);
    determinism_criterion(&mut v, &report);

    let failed = v.lines.iter().filter(|(ok, _)| !ok).count();
    println!("acceptance: {} passed, {failed} failed", v.lines.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
