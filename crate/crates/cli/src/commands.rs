//! One function per subcommand, all returning the same envelope.

use euclid_orbits::checks::{self, SuiteReport};
use euclid_orbits::flags::{classify_adjoint, classify_coadjoint};
use euclid_orbits::orbit::{bijection_pair, normal_form_adjoint, normal_form_coadjoint};
use euclid_orbits::spectral::youla_decompose;
use euclid_orbits::symplectic::{kks_eval, line_from_coadjoint};
use euclid_orbits::{AlgebraElement, DualElement, GroupSpec, ToleranceConfig};
use serde_json::{json, Value};

use crate::args::{Cli, Command, Kind};
use crate::io::{self, Failure, SpectrumInput, SpectrumView, Status};

/// Environment override for `--seed`, so wrapper scripts can pin runs
/// without threading a flag through.
const SEED_ENV: &str = "EUCLID_ORBITS_SEED";

pub fn dispatch(cli: &Cli) -> io::CommandResult {
    match run(cli) {
        Ok((status, payload, diagnostics)) => io::CommandResult::new(status, payload, diagnostics),
        Err(failure) => io::CommandResult::new(failure.status, Value::Null, vec![failure.message]),
    }
}

fn run(cli: &Cli) -> Result<(Status, Value, Vec<String>), Failure> {
    match &cli.command {
        Command::Classify { kind, input } => ok(cmd_classify(cli, *kind, input)?),
        Command::NormalForm { kind, input } => ok(cmd_normal_form(cli, *kind, input)?),
        Command::Pair { input } => ok(cmd_pair(cli, input)?),
        Command::Check { suite, trials } => cmd_check(cli, *suite, *trials),
        Command::Spectrum { input } => ok(cmd_spectrum(cli, input)?),
        Command::Kks { input } => ok(cmd_kks(cli, input)?),
        Command::Line { input } => ok(cmd_line(cli, input)?),
    }
}

fn ok(payload: Value) -> Result<(Status, Value, Vec<String>), Failure> {
    Ok((Status::Ok, payload, Vec::new()))
}

fn cmd_classify(cli: &Cli, kind: Kind, input: &str) -> Result<Value, Failure> {
    match kind {
        Kind::Adjoint => {
            let x: AlgebraElement = io::load(input)?;
            let spec = spec_for(cli, x.dim())?;
            to_value(&classify_adjoint(&spec, &x)?)
        }
        Kind::Coadjoint => {
            let m: DualElement = io::load(input)?;
            let spec = spec_for(cli, m.dim())?;
            to_value(&classify_coadjoint(&spec, &m)?)
        }
    }
}

fn cmd_normal_form(cli: &Cli, kind: Kind, input: &str) -> Result<Value, Failure> {
    match kind {
        Kind::Adjoint => {
            let x: AlgebraElement = io::load(input)?;
            let spec = spec_for(cli, x.dim())?;
            to_value(&normal_form_adjoint(&spec, &x)?)
        }
        Kind::Coadjoint => {
            let m: DualElement = io::load(input)?;
            let spec = spec_for(cli, m.dim())?;
            to_value(&normal_form_coadjoint(&spec, &m)?)
        }
    }
}

fn cmd_pair(cli: &Cli, input: &str) -> Result<Value, Failure> {
    let x: AlgebraElement = io::load(input)?;
    let spec = spec_for(cli, x.dim())?;
    to_value(&bijection_pair(&spec, &x)?)
}

fn cmd_check(
    cli: &Cli,
    suite: checks::Suite,
    trials: usize,
) -> Result<(Status, Value, Vec<String>), Failure> {
    let n = match cli.n {
        Some(n) if n >= 2 => n,
        Some(n) => {
            return Err(Failure::input(format!(
                "the property suites need --n of at least 2, got {n}"
            )))
        }
        None => 3,
    };
    if trials == 0 {
        return Err(Failure::input("--trials must be at least 1"));
    }
    let report = checks::run_suite(suite, n, trials, effective_seed(cli)?)?;
    let (status, diagnostics) = summarize(&report);
    Ok((status, to_value(&report)?, diagnostics))
}

fn summarize(report: &SuiteReport) -> (Status, Vec<String>) {
    if report.all_passed() {
        return (
            Status::Ok,
            vec![format!("{} properties passed", report.properties.len())],
        );
    }
    let mut diagnostics = Vec::new();
    for p in report.properties.iter().filter(|p| !p.passed) {
        match &p.error {
            Some(err) => diagnostics.push(format!("property `{}` errored: {err}", p.name)),
            None => diagnostics.push(format!(
                "property `{}` failed: max residual {:.3e} exceeds {:.3e}",
                p.name, p.max_residual, p.tolerance
            )),
        }
    }
    (Status::InvariantViolation, diagnostics)
}

fn cmd_spectrum(cli: &Cli, input: &str) -> Result<Value, Failure> {
    let doc: SpectrumInput = io::load(input)?;
    let omega = io::square_matrix(&doc.omega, "omega")?;
    check_n(cli, omega.nrows())?;
    let spectrum = youla_decompose(&omega, &tolerances(cli)?)?;
    to_value(&SpectrumView::from_spectrum(&spectrum))
}

fn cmd_kks(cli: &Cli, input: &str) -> Result<Value, Failure> {
    let doc: io::KksInput = io::load(input)?;
    let spec = spec_for(cli, doc.m.dim())?;
    let value = kks_eval(&spec, &doc.m, &doc.xi, &doc.eta)?;
    Ok(json!({ "value": value }))
}

fn cmd_line(cli: &Cli, input: &str) -> Result<Value, Failure> {
    let m: DualElement = io::load(input)?;
    let spec = spec_for(cli, m.dim())?;
    to_value(&line_from_coadjoint(&spec, &m)?)
}

// ----- shared plumbing ---------------------------------------------------

/// Builds the group from `--group`, the input's own dimension and `--tol`,
/// insisting that an explicit `--n` agrees with the data.
fn spec_for(cli: &Cli, inferred: usize) -> Result<GroupSpec, Failure> {
    let n = check_n(cli, inferred)?;
    let spec = cli.group.spec(n);
    match cli.tol {
        Some(_) => Ok(spec.with_tolerances(tolerances(cli)?)?),
        None => Ok(spec),
    }
}

fn check_n(cli: &Cli, inferred: usize) -> Result<usize, Failure> {
    if inferred == 0 {
        return Err(Failure::input("the input point is zero-dimensional"));
    }
    if let Some(n) = cli.n {
        if n != inferred {
            return Err(Failure::input(format!(
                "--n {n} disagrees with the input, which lives in dimension {inferred}"
            )));
        }
    }
    Ok(inferred)
}

/// `--tol` rescales the whole ladder: the absolute and rank cutoffs take the
/// given value and the eigenvalue-clustering cutoff keeps its default ratio
/// of one hundred times the absolute one.
fn tolerances(cli: &Cli) -> Result<ToleranceConfig, Failure> {
    let config = match cli.tol {
        None => ToleranceConfig::default(),
        Some(t) => ToleranceConfig {
            abs: t,
            rank_rel: t,
            eig_cluster_rel: t * 100.0,
        },
    };
    config.validate()?;
    Ok(config)
}

fn effective_seed(cli: &Cli) -> Result<u64, Failure> {
    if let Ok(text) = std::env::var(SEED_ENV) {
        return text.trim().parse().map_err(|_| {
            Failure::input(format!(
                "{SEED_ENV} must be an unsigned integer, got `{text}`"
            ))
        });
    }
    Ok(cli.seed.unwrap_or(0))
}

fn to_value<T: serde::Serialize>(value: &T) -> Result<Value, Failure> {
    serde_json::to_value(value)
        .map_err(|e| Failure::input(format!("failed to serialize the result: {e}")))
}
