//! JSON documents for measurements, ensembles and single matrices.
//!
//! Every matrix is a list of rows, each entry an `[re, im]` pair.

use serde::{Deserialize, Serialize};

use infopower_core::linalg::c;
use infopower_core::quantum::{validate_povm, DEFAULT_TOL};
use infopower_core::{CMatrix, DensityMatrix, Ensemble, Povm, PureEnsemble};

use crate::error::{CliError, Result};

pub type Entry = [f64; 2];
pub type MatrixEntries = Vec<Vec<Entry>>;

pub fn encode_matrix(m: &CMatrix) -> MatrixEntries {
    (0..m.nrows()).map(|r| (0..m.ncols()).map(|k| [m[(r, k)].re, m[(r, k)].im]).collect()).collect()
}

pub fn decode_matrix(entries: &MatrixEntries, dim: usize) -> Result<CMatrix> {
    if entries.len() != dim || entries.iter().any(|row| row.len() != dim) {
        return Err(CliError::Parse(format!("expected a {dim}x{dim} matrix")));
    }
    Ok(CMatrix::from_fn(dim, dim, |r, k| c(entries[r][k][0], entries[r][k][1])))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PovmDocument {
    pub dim: usize,
    pub elements: Vec<MatrixEntries>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<serde_json::Value>,
}

impl PovmDocument {
    pub fn from_povm(povm: &Povm, name: Option<String>) -> Self {
        Self {
            dim: povm.dim(),
            elements: povm.elements().iter().map(encode_matrix).collect(),
            name,
            tolerance: None,
            metadata: None,
        }
    }

    pub fn matrices(&self) -> Result<Vec<CMatrix>> {
        self.elements.iter().map(|e| decode_matrix(e, self.dim)).collect()
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance.unwrap_or(DEFAULT_TOL)
    }

    pub fn to_povm(&self) -> Result<Povm> {
        Ok(validate_povm(self.matrices()?, self.tolerance())?)
    }
}

/// An ensemble as priors and density matrices; pure members also list their unit vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleDocument {
    pub dim: usize,
    pub priors: Vec<f64>,
    pub states: Vec<MatrixEntries>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vectors: Option<Vec<Vec<Entry>>>,
}

impl EnsembleDocument {
    pub fn from_pure(ensemble: &PureEnsemble) -> Self {
        let total = ensemble.total_weight();
        let directions: Vec<_> = (0..ensemble.len()).map(|i| ensemble.direction(i)).collect();
        Self {
            dim: ensemble.dim(),
            priors: ensemble.priors().iter().map(|p| p / total).collect(),
            states: directions.iter().map(|v| encode_matrix(&(v * v.adjoint()))).collect(),
            vectors: Some(directions.iter().map(|v| v.iter().map(|z| [z.re, z.im]).collect()).collect()),
        }
    }

    pub fn to_ensemble(&self, tol: f64) -> Result<Ensemble> {
        if self.priors.len() != self.states.len() {
            return Err(CliError::Parse("priors and states differ in length".into()));
        }
        let items = self
            .priors
            .iter()
            .zip(&self.states)
            .map(|(&p, s)| Ok((p, DensityMatrix::new(decode_matrix(s, self.dim)?, tol)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Ensemble::new(items, tol)?)
    }
}

/// A single square matrix, used for reference states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixDocument {
    pub dim: usize,
    pub matrix: MatrixEntries,
}

impl MatrixDocument {
    pub fn to_density_matrix(&self, tol: f64) -> Result<DensityMatrix> {
        Ok(DensityMatrix::new(decode_matrix(&self.matrix, self.dim)?, tol)?)
    }
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &str) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    Ok(serde_json::from_str(&text)?)
}
