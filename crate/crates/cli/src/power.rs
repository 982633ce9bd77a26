//! Routing between the commuting solver and the general optimizer.

use serde::Serialize;

use infopower_core::catalog::{self, FamilyParams, FAMILIES};
use infopower_core::commuting::{common_eigenbasis, commuting_power, DEFAULT_COMMUTATOR_TOL};
use infopower_core::optimizer::{diagnostics, maximize_informational_power, OptimizerConfig, StopReason};
use infopower_core::{Povm, PureEnsemble};

use crate::document::{read_json, PovmDocument};
use crate::error::{CliError, Result};

/// A measurement resolved from the command line.
#[derive(Debug, Clone)]
pub struct Source {
    pub label: String,
    pub povm: Povm,
    pub known_power: Option<f64>,
}

/// Resolves a catalog family name or a path to a POVM document.
pub fn resolve_source(source: &str, params: &FamilyParams) -> Result<Source> {
    if FAMILIES.contains(&source) {
        let entry = catalog::by_name(source, params)?;
        return Ok(Source { label: entry.name, povm: entry.povm, known_power: entry.known_power });
    }
    if std::path::Path::new(source).is_file() {
        let doc: PovmDocument = read_json(source)?;
        let label = doc.name.clone().unwrap_or_else(|| source.to_string());
        return Ok(Source { label, povm: doc.to_povm()?, known_power: None });
    }
    Err(CliError::UnknownSource(source.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Commuting,
    General,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Commuting => "commuting",
            Method::General => "general",
        }
    }
}

#[derive(Debug, Clone)]
pub struct PowerResult {
    pub method: Method,
    pub power: f64,
    pub ensemble: PureEnsemble,
    pub iterations: usize,
    pub stationarity_residual: f64,
    pub corollary_gap: f64,
    pub converged: bool,
    pub stop: Option<StopReason>,
    pub restart_index_of_best: Option<usize>,
    /// Value from the commuting solver whenever the elements commute.
    pub commuting_power: Option<f64>,
}

/// Computes the power, preferring the commuting solver unless `force_general`.
pub fn compute_power(povm: &Povm, cfg: &OptimizerConfig, force_general: bool) -> Result<PowerResult> {
    let commuting = match common_eigenbasis(povm, DEFAULT_COMMUTATOR_TOL).common() {
        Some(_) => Some(commuting_power(povm)?),
        None => None,
    };
    let commuting_value = commuting.as_ref().map(|s| s.power);
    match commuting {
        Some(solution) if !force_general => {
            let d = diagnostics(&solution.ensemble, povm)?;
            Ok(PowerResult {
                method: Method::Commuting,
                power: solution.power,
                iterations: solution.iterations,
                stationarity_residual: d.stationarity_residual,
                corollary_gap: d.corollary_gap,
                converged: d.stationarity_residual < cfg.tol_stationarity && d.corollary_gap < cfg.tol_stationarity,
                stop: None,
                restart_index_of_best: None,
                ensemble: solution.ensemble,
                commuting_power: commuting_value,
            })
        }
        _ => {
            let report = maximize_informational_power(povm, cfg)?;
            Ok(PowerResult {
                method: Method::General,
                power: report.power_estimate,
                iterations: report.iterations_used,
                stationarity_residual: report.stationarity_residual,
                corollary_gap: report.corollary_gap,
                converged: report.converged,
                stop: Some(report.stop),
                restart_index_of_best: Some(report.restart_index_of_best),
                ensemble: report.ensemble,
                commuting_power: commuting_value,
            })
        }
    }
}
