//! One-parameter sweeps over catalog families and their CSV schema.

use serde::{Deserialize, Serialize};

use infopower_core::catalog::{self, FamilyParams};
use infopower_core::optimizer::OptimizerConfig;

use crate::args::OptimizerArgs;
use crate::error::{CliError, Result};
use crate::power::compute_power;

pub const CSV_HEADER: [&str; 5] = ["param", "power_bits", "method", "iterations", "residual"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    /// Evenly spaced points with both endpoints included exactly.
    pub fn points(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|k| if k + 1 == self.count { self.stop } else { self.start + (self.stop - self.start) * k as f64 / last })
            .collect()
    }
}

/// Optional optimizer settings carried by a sweep file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ConfigOverrides {
    pub seed: Option<u64>,
    pub restarts: Option<usize>,
    pub alpha0: Option<f64>,
    pub tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub ensemble_size: Option<usize>,
    pub real: Option<bool>,
    pub force_general: Option<bool>,
}

impl ConfigOverrides {
    pub fn apply(&self, base: &OptimizerArgs) -> OptimizerArgs {
        OptimizerArgs {
            seed: self.seed.unwrap_or(base.seed),
            restarts: self.restarts.unwrap_or(base.restarts),
            alpha0: self.alpha0.unwrap_or(base.alpha0),
            tol: self.tol.unwrap_or(base.tol),
            max_iters: self.max_iters.unwrap_or(base.max_iters),
            ensemble_size: self.ensemble_size.or(base.ensemble_size),
            real: self.real.unwrap_or(base.real),
            force_general: self.force_general.unwrap_or(base.force_general),
        }
    }
}

/// Values of the family parameters that stay fixed during a sweep.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FixedParams {
    pub d: Option<usize>,
    pub eta: Option<f64>,
    pub n: Option<usize>,
    pub theta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub family: String,
    pub parameter: String,
    pub grid: Grid,
    #[serde(default)]
    pub fixed: FixedParams,
    #[serde(default)]
    pub config: ConfigOverrides,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: f64,
    pub power_bits: f64,
    pub method: String,
    pub iterations: usize,
    pub residual: f64,
}

fn as_integer(value: f64, name: &str) -> Result<usize> {
    let rounded = value.round();
    if (value - rounded).abs() > 1e-9 || rounded < 0.0 {
        return Err(CliError::InvalidSpec(format!("{name} must be a non-negative integer, got {value}")));
    }
    Ok(rounded as usize)
}

fn allowed_parameters(family: &str) -> &'static [&'static str] {
    match family {
        "projective" => &["d"],
        "noisy-projective" => &["d", "eta"],
        "zn" => &["n"],
        "mirror-y" => &["theta"],
        _ => &[],
    }
}

impl SweepSpec {
    fn base_params(&self, defaults: &FamilyParams) -> FamilyParams {
        FamilyParams {
            dim: self.fixed.d.unwrap_or(defaults.dim),
            eta: self.fixed.eta.unwrap_or(defaults.eta),
            n: self.fixed.n.unwrap_or(defaults.n),
            theta: self.fixed.theta.unwrap_or(defaults.theta),
        }
    }

    /// Family parameters at every grid point, validated before any computation.
    pub fn resolve(&self, defaults: &FamilyParams) -> Result<Vec<(f64, FamilyParams)>> {
        if !catalog::FAMILIES.contains(&self.family.as_str()) {
            return Err(CliError::InvalidSpec(format!("unknown family '{}'", self.family)));
        }
        if !allowed_parameters(&self.family).contains(&self.parameter.as_str()) {
            return Err(CliError::InvalidSpec(format!(
                "family '{}' has no parameter '{}' to sweep",
                self.family, self.parameter
            )));
        }
        let g = self.grid;
        if g.count < 2 {
            return Err(CliError::InvalidSpec(format!("grid needs at least 2 points, got {}", g.count)));
        }
        if !(g.start.is_finite() && g.stop.is_finite()) {
            return Err(CliError::InvalidSpec("grid bounds must be finite".into()));
        }
        let base = self.base_params(defaults);
        let mut out = Vec::with_capacity(g.count);
        for x in g.points() {
            let mut p = base;
            match self.parameter.as_str() {
                "d" => p.dim = as_integer(x, "d")?,
                "n" => p.n = as_integer(x, "n")?,
                "eta" => p.eta = x,
                _ => p.theta = x,
            }
            catalog::by_name(&self.family, &p)
                .map_err(|e| CliError::InvalidSpec(format!("{} = {x}: {e}", self.parameter)))?;
            out.push((x, p));
        }
        Ok(out)
    }
}

/// Runs every grid point in order.
pub fn run_sweep(spec: &SweepSpec, defaults: &FamilyParams, base: &OptimizerArgs) -> Result<Vec<SweepRow>> {
    let args = spec.config.apply(base);
    let cfg: OptimizerConfig = args.config();
    cfg.validate()?;
    spec.resolve(defaults)?
        .into_iter()
        .map(|(x, params)| {
            let entry = catalog::by_name(&spec.family, &params)?;
            let result = compute_power(&entry.povm, &cfg, args.force_general)?;
            Ok(SweepRow {
                param: x,
                power_bits: result.power,
                method: result.method.as_str().to_string(),
                iterations: result.iterations,
                residual: result.stationarity_residual,
            })
        })
        .collect()
}

/// A float with 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv(rows: &[SweepRow]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(CSV_HEADER)?;
    for r in rows {
        writer.write_record([
            format_float(r.param),
            format_float(r.power_bits),
            r.method.clone(),
            r.iterations.to_string(),
            format_float(r.residual),
        ])?;
    }
    let bytes = writer.into_inner().map_err(|e| CliError::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Parse(e.to_string()))
}

pub fn parse_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(CliError::Parse(format!("unexpected header {header:?}")));
    }
    reader.deserialize().map(|row| row.map_err(CliError::from)).collect()
}
