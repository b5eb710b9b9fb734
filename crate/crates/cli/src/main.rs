//! `hetlab`: load a model spec, run one scenario, write its results.

mod args;
mod output;

use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use hetlab_core::model::validate_spec;
use hetlab_core::scenarios::{
    census_c_negative, census_case2_positive, census_v0_case1, elliptic_search,
    heteroclinic_web_positive, loop_parameters, tangency_sequence_negative,
    tangency_sequence_positive, Report, ScanResult, SCHEMA_VERSION,
};
use hetlab_core::{HetError, InvolutionCase, Model, SystemSpec};
use serde_json::json;

use args::{Cli, Command, Side};

const EXIT_CERTIFIED: u8 = 0;
const EXIT_SCENARIO: u8 = 1;
const EXIT_UNCERTIFIED: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_VALIDATION: u8 = 4;
const EXIT_USAGE: u8 = 64;

enum Failure {
    Io(String),
    Validation(String),
    Scenario(HetError),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => EXIT_IO,
            Failure::Validation(_) => EXIT_VALIDATION,
            Failure::Scenario(_) => EXIT_SCENARIO,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Io(s) => write!(f, "i/o error: {s}"),
            Failure::Validation(s) => write!(f, "invalid spec: {s}"),
            Failure::Scenario(e) => write!(f, "scenario failed: {e}"),
        }
    }
}

impl From<HetError> for Failure {
    fn from(e: HetError) -> Self {
        match e {
            HetError::InvalidSpec(s) => Failure::Validation(s),
            e => Failure::Scenario(e),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    if let Err(e) = configure_threads(cli.threads) {
        eprintln!("{e}");
        return ExitCode::from(EXIT_USAGE);
    }
    match run(&cli) {
        Ok(certified) => ExitCode::from(if certified {
            EXIT_CERTIFIED
        } else {
            EXIT_UNCERTIFIED
        }),
        Err(e) => {
            eprintln!("hetlab: {e}");
            ExitCode::from(e.code())
        }
    }
}

/// --threads wins over HETLAB_THREADS; neither means rayon's default.
fn configure_threads(flag: Option<usize>) -> Result<(), String> {
    let n =
        match flag {
            Some(n) => Some(n),
            None => match std::env::var("HETLAB_THREADS") {
                Ok(s) if !s.trim().is_empty() => Some(s.trim().parse::<usize>().map_err(|_| {
                    format!("HETLAB_THREADS must be a positive integer, got `{s}`")
                })?),
                _ => None,
            },
        };
    if let Some(n) = n {
        if n == 0 {
            return Err("thread count must be positive".into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn read_spec(path: &Path) -> Result<SystemSpec, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    SystemSpec::from_json(&text).map_err(Failure::from)
}

fn load_model(path: &Path, cli: &Cli) -> Result<Model, Failure> {
    let m = Model::new(read_spec(path)?)?;
    let mut tol = m.tol.clone();
    for (k, v) in &cli.tol {
        tol.set(k, v).map_err(Failure::Scenario)?;
    }
    Ok(m.with_tolerances(tol))
}

fn finish<R: Report>(
    cli: &Cli,
    m: &Model,
    inputs: serde_json::Value,
    report: &R,
    t0: Instant,
) -> Result<bool, Failure> {
    let mut result = ScanResult::from_report(m, &inputs, report);
    result.wall_time_s = t0.elapsed().as_secs_f64();
    output::write_all(&cli.out, &result)?;
    summarize(&result);
    Ok(result.certified)
}

fn summarize(r: &ScanResult) {
    println!(
        "{}: {} ({} table(s), {} curve(s)) -> certified = {}",
        r.scenario,
        r.spec_digest.get(..12).unwrap_or(&r.spec_digest),
        r.tables.len(),
        r.curves.len(),
        r.certified
    );
    for n in &r.notes {
        println!("  note: {n}");
    }
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    let t0 = Instant::now();
    match &cli.command {
        Command::Validate { spec } => validate(cli, spec, t0),
        Command::Census {
            spec,
            level,
            v0,
            tau_min,
            tau_max,
        } => {
            let m = load_model(spec, cli)?;
            if *v0 {
                let (lo, hi) = (tau_min.unwrap_or(1e-6), tau_max.unwrap_or(1e-2));
                let r = census_v0_case1(&m, lo, hi)?;
                return finish(
                    cli,
                    &m,
                    json!({"v0": true, "tau_min": lo, "tau_max": hi}),
                    &r,
                    t0,
                );
            }
            let c = level.expect("clap enforces --level or --v0");
            let s_min = tau_min.unwrap_or(m.tau_floor());
            if m.spec.involution_case == InvolutionCase::Case2 {
                let r = census_case2_positive(&m, c, s_min, None)?;
                return finish(cli, &m, json!({"level": c, "tau_min": s_min}), &r, t0);
            }
            if c >= 0.0 {
                return Err(Failure::Scenario(HetError::InvalidInput(
                    "a case-1 census at c >= 0 is part of `web` (c > 0) or `census --v0` (c = 0)"
                        .into(),
                )));
            }
            let s_max = tau_max.unwrap_or(m.spec.eps);
            let r = census_c_negative(&m, c, s_min, s_max)?;
            finish(
                cli,
                &m,
                json!({"level": c, "tau_min": s_min, "tau_max": s_max}),
                &r,
                t0,
            )
        }
        Command::Tangencies {
            spec,
            side,
            count,
            n_range,
            c_start,
            c,
        } => {
            let m = load_model(spec, cli)?;
            match side {
                Side::Neg => {
                    let start = c_start.unwrap_or(-m.limits.c_max);
                    let n = count.unwrap_or(4);
                    let r = tangency_sequence_negative(&m, start, n)?;
                    finish(
                        cli,
                        &m,
                        json!({"side": "neg", "c_start": start, "count": n}),
                        &r,
                        t0,
                    )
                }
                Side::Pos => {
                    let (a, b) = n_range.unwrap_or((1, 8));
                    let r = tangency_sequence_positive(&m, a, b, None)?;
                    finish(
                        cli,
                        &m,
                        json!({"side": "pos", "n_range": [a, b], "window": r.window}),
                        &r,
                        t0,
                    )
                }
                Side::Case2 => {
                    let (a, b) = n_range.unwrap_or((1, 4));
                    let level = c.unwrap_or(1e-4);
                    let s_min = m.tau_floor();
                    let r = census_case2_positive(&m, level, s_min, Some((a, b)))?;
                    finish(
                        cli,
                        &m,
                        json!({"side": "case2", "level": level, "tau_min": s_min, "n_range": [a, b]}),
                        &r,
                        t0,
                    )
                }
            }
        }
        Command::Web { spec, c } => {
            let m = load_model(spec, cli)?;
            let r = heteroclinic_web_positive(&m, *c)?;
            finish(cli, &m, json!({"c": c}), &r, t0)
        }
        Command::Loops {
            spec,
            n_range,
            mu_max,
        } => {
            let m = load_model(spec, cli)?;
            let r = loop_parameters(&m, n_range.0, n_range.1, *mu_max)?;
            finish(
                cli,
                &m,
                json!({"n_range": [n_range.0, n_range.1], "mu_max": mu_max}),
                &r,
                t0,
            )
        }
        Command::Elliptic {
            spec,
            c_window,
            k_range,
        } => {
            let m = load_model(spec, cli)?;
            let r = elliptic_search(&m, c_window.0, c_window.1, k_range.0, k_range.1)?;
            finish(
                cli,
                &m,
                json!({"c_window": [c_window.0, c_window.1], "k_range": [k_range.0, k_range.1]}),
                &r,
                t0,
            )
        }
    }
}

/// Writes the validation report as a scan result; an invalid spec still
/// produces result.json before exiting with the validation code.
fn validate(cli: &Cli, path: &Path, t0: Instant) -> Result<bool, Failure> {
    let spec = read_spec(path)?;
    let report = validate_spec(&spec);
    let mut tol = spec.tolerances.clone().unwrap_or_default();
    for (k, v) in &cli.tol {
        tol.set(k, v).map_err(Failure::Scenario)?;
    }
    let mut table = hetlab_core::scenarios::Table::new(&["rule", "detail"]);
    for v in &report.violations {
        table.push(vec![v.rule.clone(), v.detail.clone()]);
    }
    let result = ScanResult {
        schema_version: SCHEMA_VERSION,
        scenario: "validate".into(),
        spec_digest: spec.digest(),
        inputs: json!({"spec": path.file_name().map(|s| s.to_string_lossy().into_owned())}),
        tolerances: tol,
        outputs: serde_json::to_value(&report).expect("validation report serializes"),
        certified: report.passed(),
        notes: report.warnings.clone(),
        wall_time_s: t0.elapsed().as_secs_f64(),
        tables: vec![("result".into(), table)],
        curves: Vec::new(),
    };
    output::write_all(&cli.out, &result)?;
    summarize(&result);
    for v in &report.violations {
        eprintln!("  violation {}: {}", v.rule, v.detail);
    }
    if report.passed() {
        Ok(true)
    } else {
        Err(Failure::Validation(format!(
            "{} violation(s)",
            report.violations.len()
        )))
    }
}
