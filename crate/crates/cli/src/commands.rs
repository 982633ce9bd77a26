use serde::Serialize;
use serde_json::Value;

use infopower_core::duality::{dual_ensemble, duality_gap, ensemble_round_trip_deviation, povm_round_trip_deviation};
use infopower_core::quantum::{povm_diagnostics, random_density_matrix, random_povm, tensor_povm, validate_povm};
use infopower_core::{DensityMatrix, Error as CoreError, Povm, DEFAULT_TOL};

use crate::args::{Cli, Command, FamilyArgs, Format, OptimizerArgs};
use crate::document::{read_json, EnsembleDocument, MatrixDocument, PovmDocument};
use crate::error::{CliError, Result};
use crate::power::{compute_power, resolve_source, Source};
use crate::sweep::{format_float, run_sweep, write_csv, Grid, SweepSpec};

/// Differences below this count as additive.
pub const ADDITIVITY_TOL: f64 = 5e-3;

/// Deviations below this pass the duality check.
pub const DUALITY_TOL: f64 = 1e-8;

/// Rendered command output and the process exit code it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub body: String,
    pub exit_code: i32,
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Validate { path, tol } => validate(path, *tol, cli.format),
        Command::Power { source, family, optimizer } => power(source, family, optimizer, cli.format),
        Command::Sweep { family, spec, param, start, stop, count, family_args, optimizer } => {
            let spec = match spec {
                Some(path) => read_json::<SweepSpec>(path)?,
                None => SweepSpec {
                    family: family.clone().ok_or_else(|| CliError::InvalidSpec("missing family".into()))?,
                    parameter: param.clone().ok_or_else(|| CliError::InvalidSpec("missing --param".into()))?,
                    grid: Grid {
                        start: start.ok_or_else(|| CliError::InvalidSpec("missing --start".into()))?,
                        stop: stop.ok_or_else(|| CliError::InvalidSpec("missing --stop".into()))?,
                        count: count.ok_or_else(|| CliError::InvalidSpec("missing --count".into()))?,
                    },
                    fixed: Default::default(),
                    config: Default::default(),
                },
            };
            sweep(&spec, family_args, optimizer, cli.format)
        }
        Command::Dualcheck { source, sigma, seed, outcomes, family } => {
            dualcheck(source, sigma, *seed, *outcomes, family, cli.format)
        }
        Command::Additivity { source, copies, dim_limit, family, optimizer } => {
            additivity(source, *copies, *dim_limit, family, optimizer, cli.format)
        }
    }
}

fn render<T: Serialize>(report: &T, format: Option<Format>) -> Result<String> {
    match format.unwrap_or(Format::Json) {
        Format::Json => Ok(serde_json::to_string_pretty(report)? + "\n"),
        Format::Csv => flat_csv(&serde_json::to_value(report)?),
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some(String::new()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => u.to_string(),
            (_, Some(i)) => i.to_string(),
            _ => format_float(n.as_f64().unwrap_or(f64::NAN)),
        }),
        Value::String(s) => Some(s.clone()),
        Value::Array(items) => items.iter().map(scalar).collect::<Option<Vec<_>>>().map(|v| v.join(";")),
        Value::Object(_) => None,
    }
}

/// `field,value` rows for the scalar fields of a report.
fn flat_csv(value: &Value) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["field", "value"])?;
    if let Value::Object(map) = value {
        for (key, v) in map {
            if let Some(s) = scalar(v) {
                writer.write_record([key.as_str(), s.as_str()])?;
            }
        }
    }
    let bytes = writer.into_inner().map_err(|e| CliError::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Parse(e.to_string()))
}

#[derive(Debug, Serialize)]
pub struct ValidateReport {
    pub dim: usize,
    pub outcomes: usize,
    pub tolerance: f64,
    pub completeness_deviation: f64,
    pub hermiticity_deviation: f64,
    pub min_eigenvalues: Vec<f64>,
    pub valid: bool,
    pub error: Option<String>,
}

fn validate(path: &str, tol: Option<f64>, format: Option<Format>) -> Result<Outcome> {
    let doc: PovmDocument = read_json(path)?;
    let matrices = doc.matrices()?;
    let tolerance = tol.unwrap_or_else(|| doc.tolerance());
    let diag = povm_diagnostics(&matrices)?;
    let verdict = validate_povm(matrices, tolerance);
    let report = ValidateReport {
        dim: diag.dim,
        outcomes: diag.min_eigenvalues.len(),
        tolerance,
        completeness_deviation: diag.completeness_deviation,
        hermiticity_deviation: diag.hermiticity_deviation,
        min_eigenvalues: diag.min_eigenvalues,
        valid: verdict.is_ok(),
        error: verdict.err().map(|e| e.to_string()),
    };
    let exit_code = if report.valid { 0 } else { 1 };
    Ok(Outcome { body: render(&report, format)?, exit_code })
}

#[derive(Debug, Serialize)]
pub struct PowerReport {
    pub source: String,
    pub dim: usize,
    pub outcomes: usize,
    pub method: String,
    pub power_bits: f64,
    pub known_power_bits: Option<f64>,
    pub commuting_power_bits: Option<f64>,
    pub iterations: usize,
    pub stationarity_residual: f64,
    pub corollary_gap: f64,
    pub converged: bool,
    pub stop: Option<String>,
    pub restart_index_of_best: Option<usize>,
    pub ensemble: EnsembleDocument,
}

pub fn power_report(source: &Source, optimizer: &OptimizerArgs) -> Result<PowerReport> {
    let cfg = optimizer.config();
    cfg.validate()?;
    let result = compute_power(&source.povm, &cfg, optimizer.force_general)?;
    Ok(PowerReport {
        source: source.label.clone(),
        dim: source.povm.dim(),
        outcomes: source.povm.len(),
        method: result.method.as_str().to_string(),
        power_bits: result.power,
        known_power_bits: source.known_power,
        commuting_power_bits: result.commuting_power,
        iterations: result.iterations,
        stationarity_residual: result.stationarity_residual,
        corollary_gap: result.corollary_gap,
        converged: result.converged,
        stop: result.stop.map(|s| format!("{s:?}")),
        restart_index_of_best: result.restart_index_of_best,
        ensemble: EnsembleDocument::from_pure(&result.ensemble),
    })
}

fn power(source: &str, family: &FamilyArgs, optimizer: &OptimizerArgs, format: Option<Format>) -> Result<Outcome> {
    let source = resolve_source(source, &family.params())?;
    let report = power_report(&source, optimizer)?;
    let exit_code = if report.converged { 0 } else { 2 };
    let body = match format.unwrap_or(Format::Json) {
        Format::Json => serde_json::to_string_pretty(&report)? + "\n",
        Format::Csv => {
            let mut writer = csv::Writer::from_writer(Vec::new());
            writer.write_record(["source", "power_bits", "method", "iterations", "residual", "corollary_gap", "converged"])?;
            writer.write_record([
                report.source.clone(),
                format_float(report.power_bits),
                report.method.clone(),
                report.iterations.to_string(),
                format_float(report.stationarity_residual),
                format_float(report.corollary_gap),
                report.converged.to_string(),
            ])?;
            String::from_utf8(writer.into_inner().map_err(|e| CliError::Parse(e.to_string()))?)
                .map_err(|e| CliError::Parse(e.to_string()))?
        }
    };
    Ok(Outcome { body, exit_code })
}

fn sweep(spec: &SweepSpec, family: &FamilyArgs, optimizer: &OptimizerArgs, format: Option<Format>) -> Result<Outcome> {
    let tol = spec.config.apply(optimizer).tol;
    let rows = run_sweep(spec, &family.params(), optimizer)?;
    let exit_code = if rows.iter().all(|r| r.residual < tol) { 0 } else { 2 };
    let body = match format.unwrap_or(Format::Csv) {
        Format::Csv => write_csv(&rows)?,
        Format::Json => serde_json::to_string_pretty(&rows)? + "\n",
    };
    Ok(Outcome { body, exit_code })
}

#[derive(Debug, Serialize)]
pub struct DualcheckReport {
    pub source: String,
    pub dim: usize,
    pub sigma: String,
    pub duality_gap: f64,
    pub povm_round_trip: f64,
    pub ensemble_round_trip: f64,
    pub tolerance: f64,
    pub passed: bool,
}

fn reference_state(sigma: &str, dim: usize, seed: u64) -> Result<DensityMatrix> {
    let rho = match sigma {
        "maximally-mixed" => DensityMatrix::maximally_mixed(dim),
        "random" => random_density_matrix(dim, seed),
        path => read_json::<MatrixDocument>(path)?.to_density_matrix(DEFAULT_TOL)?,
    };
    if rho.dim() != dim {
        return Err(CoreError::DimensionMismatch { expected: dim, found: rho.dim() }.into());
    }
    Ok(rho)
}

pub fn dualcheck_report(povm: &Povm, label: &str, sigma_name: &str, sigma: &DensityMatrix) -> Result<DualcheckReport> {
    let dual = dual_ensemble(povm, sigma)?;
    if dual.has_dropped() {
        return Err(CoreError::InvalidArguments(format!(
            "outcomes {:?} have zero probability under the reference state",
            dual.dropped
        ))
        .into());
    }
    let gap = duality_gap(&dual.ensemble, povm)?;
    let povm_rt = povm_round_trip_deviation(povm, sigma)?;
    let ens_rt = ensemble_round_trip_deviation(&dual.ensemble)?;
    Ok(DualcheckReport {
        source: label.to_string(),
        dim: povm.dim(),
        sigma: sigma_name.to_string(),
        duality_gap: gap,
        povm_round_trip: povm_rt,
        ensemble_round_trip: ens_rt,
        tolerance: DUALITY_TOL,
        passed: gap < DUALITY_TOL && povm_rt < DUALITY_TOL && ens_rt < DUALITY_TOL,
    })
}

fn dualcheck(
    source: &str,
    sigma: &str,
    seed: u64,
    outcomes: Option<usize>,
    family: &FamilyArgs,
    format: Option<Format>,
) -> Result<Outcome> {
    let (label, povm) = if source == "random" {
        let count = outcomes.unwrap_or(2 * family.dim);
        (format!("random(d={}, outcomes={count}, seed={seed})", family.dim), random_povm(family.dim, count, 1, seed)?)
    } else {
        let s = resolve_source(source, &family.params())?;
        (s.label, s.povm)
    };
    let rho = reference_state(sigma, povm.dim(), seed.wrapping_add(1))?;
    let report = dualcheck_report(&povm, &label, sigma, &rho)?;
    let exit_code = if report.passed { 0 } else { 2 };
    Ok(Outcome { body: render(&report, format)?, exit_code })
}

#[derive(Debug, Serialize)]
pub struct AdditivityReport {
    pub source: String,
    pub copies: u32,
    pub dim: usize,
    pub single_power_bits: f64,
    pub single_method: String,
    pub tensor_power_bits: f64,
    pub tensor_method: String,
    pub tensor_converged: bool,
    pub scaled_single_bits: f64,
    pub difference: f64,
    pub tolerance: f64,
    pub additive: bool,
}

pub fn additivity_report(source: &Source, copies: u32, dim_limit: usize, optimizer: &OptimizerArgs) -> Result<AdditivityReport> {
    if copies < 2 {
        return Err(CoreError::InvalidArguments(format!("copies must be at least 2, got {copies}")).into());
    }
    let dim = source
        .povm
        .dim()
        .checked_pow(copies)
        .filter(|&d| d <= dim_limit)
        .ok_or(CliError::DimensionLimitExceeded { dim: source.povm.dim().saturating_pow(copies), limit: dim_limit })?;
    let cfg = optimizer.config();
    cfg.validate()?;
    let single = compute_power(&source.povm, &cfg, optimizer.force_general)?;
    let mut tensor = source.povm.clone();
    for _ in 1..copies {
        tensor = tensor_povm(&tensor, &source.povm);
    }
    let joint = compute_power(&tensor, &cfg, optimizer.force_general)?;
    let scaled = copies as f64 * single.power;
    let difference = joint.power - scaled;
    Ok(AdditivityReport {
        source: source.label.clone(),
        copies,
        dim,
        single_power_bits: single.power,
        single_method: single.method.as_str().to_string(),
        tensor_power_bits: joint.power,
        tensor_method: joint.method.as_str().to_string(),
        tensor_converged: joint.converged,
        scaled_single_bits: scaled,
        difference,
        tolerance: ADDITIVITY_TOL,
        additive: difference.abs() < ADDITIVITY_TOL,
    })
}

fn additivity(
    source: &str,
    copies: u32,
    dim_limit: usize,
    family: &FamilyArgs,
    optimizer: &OptimizerArgs,
    format: Option<Format>,
) -> Result<Outcome> {
    let source = resolve_source(source, &family.params())?;
    let report = additivity_report(&source, copies, dim_limit, optimizer)?;
    let exit_code = if report.additive { 0 } else { 2 };
    Ok(Outcome { body: render(&report, format)?, exit_code })
}
