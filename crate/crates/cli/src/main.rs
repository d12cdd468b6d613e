//! `liemax`: verify exponential-map symmetries, integrate extremals, locate
//! Maxwell times and run the property suites.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use liemax::catalog::{self, GroupBundle};
use liemax::exec::Execution;
use liemax::flows::{DenseFlow, FlowConfig, HamiltonianSpec};
use liemax::lie::Covector;
use liemax::maxwell::{self, MaxwellQuery};
use liemax::suites::{self, Suite};
use liemax::symmetry::{verify_candidate, Verdict, VerificationReport, VerifiedSymmetry};
use liemax::Error;

use output::{write_output, Manifest};

const EXIT_REJECTED: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_DOMAIN: u8 = 65;
const EXIT_INTEGRATION: u8 = 70;

#[derive(Parser)]
#[command(name = "liemax", version, about = "Exponential-map symmetries and Maxwell times of left-invariant Hamiltonian systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check whether a catalog symmetry induces a symmetry of the exponential map.
    Verify(VerifyArgs),
    /// Integrate the extremal `Exp(p, ·)` on `[0, t]` and write it as CSV.
    Trajectory(TrajectoryArgs),
    /// First Maxwell time of one covector for a symmetry.
    Maxwell(MaxwellArgs),
    /// First Maxwell times over a grid of covectors.
    Sweep(SweepArgs),
    /// Run a property suite over the catalog and print a TAP report.
    Check(CheckArgs),
}

#[derive(Args)]
struct Target {
    /// Builtin name, user group name, or path to a group JSON file.
    #[arg(long)]
    group: String,
    #[arg(long, default_value = "sr")]
    hamiltonian: String,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    target: Target,
    #[arg(long)]
    symmetry: String,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TrajectoryArgs {
    #[command(flatten)]
    target: Target,
    /// Initial covector, comma-separated.
    #[arg(long, allow_hyphen_values = true)]
    p: String,
    #[arg(long, allow_hyphen_values = true)]
    t: f64,
    #[arg(long, default_value_t = 0.1)]
    step_out: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    symmetry: String,
    #[arg(long, default_value_t = 20.0)]
    horizon: f64,
    #[arg(long, default_value_t = 1e-2)]
    grid: f64,
    /// Seed of the symmetry verification.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct MaxwellArgs {
    #[command(flatten)]
    target: Target,
    #[command(flatten)]
    search: SearchArgs,
    #[arg(long, allow_hyphen_values = true)]
    p: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    target: Target,
    #[command(flatten)]
    search: SearchArgs,
    /// `start:stop:count` per coordinate, comma-separated.
    #[arg(long, allow_hyphen_values = true)]
    p_grid: String,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Only groups from LIEMAX_CATALOG_DIR.
    #[arg(long)]
    no_builtins: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Argument(_) | Error::Parse(_) | Error::Catalog { .. } | Error::Io(_) => EXIT_USAGE,
            Error::Domain(_)
            | Error::GenericSet { .. }
            | Error::Validation(_)
            | Error::RepresentationClosure(_) => EXIT_DOMAIN,
            Error::Integration { .. } => EXIT_INTEGRATION,
        };
        let message = match &e {
            Error::GenericSet { report, .. } => format!(
                "{e}\norbit report: {}",
                serde_json::to_string(report.as_ref()).unwrap_or_default()
            ),
            _ => e.to_string(),
        };
        Failure { code, message }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

type CliResult = Result<ExitCode, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Verify(a) => verify(a),
        Command::Trajectory(a) => trajectory(a),
        Command::Maxwell(a) => maxwell_cmd(a),
        Command::Sweep(a) => sweep(a),
        Command::Check(a) => check(a),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("liemax: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load(target: &Target) -> Result<(GroupBundle, HamiltonianSpec), Failure> {
    let bundle = catalog::resolve(&target.group)?;
    let h = bundle.hamiltonian(&target.hamiltonian)?.clone();
    Ok((bundle, h))
}

fn parse_covector(s: &str, n: usize) -> Result<Covector, Failure> {
    let coords: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| usage(format!("--p `{s}` is not a comma-separated list of numbers")))?;
    if coords.len() != n {
        return Err(usage(format!("--p has {} entries, the algebra has dimension {n}", coords.len())));
    }
    if coords.iter().any(|x| !x.is_finite()) {
        return Err(usage("--p must be finite"));
    }
    Ok(Covector::from(coords))
}

fn run_verification(
    bundle: &GroupBundle,
    h: &HamiltonianSpec,
    symmetry: &str,
    samples: usize,
    seed: u64,
) -> Result<(Verdict, VerificationReport), Failure> {
    let candidate = bundle.symmetry(symmetry)?;
    Ok(verify_candidate(bundle.algebra(), candidate, h, samples, seed)?)
}

fn require_verified(bundle: &GroupBundle, h: &HamiltonianSpec, search: &SearchArgs) -> Result<VerifiedSymmetry, Failure> {
    match run_verification(bundle, h, &search.symmetry, 100, search.seed)? {
        (Verdict::Verified(v), _) => Ok(v),
        (Verdict::Rejected, report) => Err(Failure {
            code: EXIT_REJECTED,
            message: format!(
                "symmetry `{}` was rejected: {}",
                search.symmetry,
                report.reason.unwrap_or_default()
            ),
        }),
    }
}

fn json_text(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize") + "\n"
}

fn verify(a: VerifyArgs) -> CliResult {
    let (bundle, h) = load(&a.target)?;
    let (verdict, report) = run_verification(&bundle, &h, &a.symmetry, a.samples, a.seed)?;
    let manifest = Manifest::new("verify", bundle.name(), a.seed, None);
    write_output(a.out.as_deref(), &json_text(&report), &manifest)?;
    match verdict {
        Verdict::Verified(v) => {
            eprintln!(
                "{}: case {} (residual_H {:.3e}, residual_vertical {:.3e})",
                v.name, v.case, v.residual_h, v.residual_vertical
            );
            Ok(ExitCode::SUCCESS)
        }
        Verdict::Rejected => {
            eprintln!("{}: rejected: {}", a.symmetry, report.reason.unwrap_or_default());
            Ok(ExitCode::from(EXIT_REJECTED))
        }
    }
}

fn trajectory(a: TrajectoryArgs) -> CliResult {
    let (bundle, h) = load(&a.target)?;
    let alg = bundle.algebra();
    let p = parse_covector(&a.p, alg.dim())?;
    if !(a.t > 0.0) || !a.t.is_finite() {
        return Err(usage(format!("--t must be positive, got {}", a.t)));
    }
    if !(a.step_out > 0.0) {
        return Err(usage("--step-out must be positive"));
    }
    let cfg = FlowConfig::default();
    let manifest = Manifest::new("trajectory", bundle.name(), 0, Some(cfg));
    match DenseFlow::left(alg, &h, &p, a.t, &cfg) {
        Ok(flow) => {
            let csv = flow.sample(alg, a.step_out)?.to_csv();
            write_output(a.out.as_deref(), &csv, &manifest)?;
            Ok(ExitCode::SUCCESS)
        }
        Err(Error::Integration { last_time, reason }) => {
            let mut text = format!("# PARTIAL: integration failed at t = {last_time}: {reason}\n");
            let reach = last_time * (1.0 - 1e-9);
            if reach > 0.0 {
                if let Ok(flow) = DenseFlow::left(alg, &h, &p, reach, &cfg) {
                    text.push_str(&flow.sample(alg, a.step_out)?.to_csv());
                }
            }
            write_output(a.out.as_deref(), &text, &manifest)?;
            Err(Error::Integration { last_time, reason }.into())
        }
        Err(e) => Err(e.into()),
    }
}

fn maxwell_cmd(a: MaxwellArgs) -> CliResult {
    let (bundle, h) = load(&a.target)?;
    let alg = bundle.algebra();
    let p = parse_covector(&a.p, alg.dim())?;
    let v = require_verified(&bundle, &h, &a.search)?;
    let q = MaxwellQuery::new(v, h, p, a.search.horizon)
        .with_grid_step(a.search.grid)
        .with_strata(bundle.strata());
    let cfg = FlowConfig::default();
    let result = maxwell::first_maxwell_time(alg, &q, &cfg)?;
    let manifest = Manifest::new("maxwell", bundle.name(), a.search.seed, Some(cfg));
    write_output(a.out.as_deref(), &json_text(&result.to_json()), &manifest)?;
    Ok(ExitCode::SUCCESS)
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

fn sweep(a: SweepArgs) -> CliResult {
    let (bundle, h) = load(&a.target)?;
    let alg = bundle.algebra();
    let ps = maxwell::parse_p_grid(&a.p_grid, alg.dim())?;
    if a.jobs == 0 {
        return Err(usage("--jobs must be at least 1"));
    }
    let v = require_verified(&bundle, &h, &a.search)?;
    let cfg = FlowConfig::default();
    let rows = maxwell::run_sweep(
        alg,
        &v,
        &h,
        &ps,
        a.search.horizon,
        a.search.grid,
        bundle.strata(),
        &cfg,
        Execution::with_jobs(a.jobs),
    )?;
    let manifest = Manifest::new("sweep", bundle.name(), a.search.seed, Some(cfg));
    write_output(Some(&a.out), &maxwell::sweep_csv(&rows, alg.dim()), &manifest)?;
    if bundle.strata().is_some() {
        let hist = maxwell::stratum_histogram(&rows);
        output::write_file(&sibling(&a.out, ".strata.json"), &json_text(&hist))?;
    }
    let csv_name = a.out.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    output::write_file(&sibling(&a.out, ".gp"), &maxwell::gnuplot_script(&csv_name, alg.dim()))?;
    let failed: Vec<&Error> = rows.iter().filter_map(|r| r.result.as_ref().err()).collect();
    match failed.first() {
        None => Ok(ExitCode::SUCCESS),
        Some(&first) => {
            eprintln!("liemax: {} of {} rows failed; first: {first}", failed.len(), rows.len());
            Ok(ExitCode::from(Failure::from(first.clone()).code))
        }
    }
}

fn check(a: CheckArgs) -> CliResult {
    let suite: Suite = a.suite.parse()?;
    let mut groups = Vec::new();
    if !a.no_builtins {
        for name in catalog::builtin_names() {
            groups.push(catalog::builtin(name)?);
        }
    }
    for file in catalog::user_group_files() {
        groups.push(catalog::load_group(&file)?);
    }
    let report = suites::run_suite(suite, &groups, a.seed);
    let manifest = Manifest::new("check", "catalog", a.seed, Some(FlowConfig::default()));
    write_output(a.out.as_deref(), &report.to_tap(), &manifest)?;
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
