//! Informational power of quantum measurements.
//!
//! The informational power of a POVM is the largest mutual information
//! between an input ensemble's label and the measurement outcome, taken over
//! all ensembles. It coincides with the single-use classical capacity of the
//! quantum-classical channel the POVM induces.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`quantum`] | density matrices, ensembles, POVMs, tensor products, random instances |
//! | [`info`] | Shannon/von Neumann entropies, mutual information, Holevo and subentropy bounds |
//! | [`duality`] | pretty-good measurement and the ensemble induced by a POVM |
//! | [`optimizer`] | gradient operators, stationarity diagnostics, steepest ascent with restarts |
//! | [`commuting`] | exact route for commuting POVMs via Blahut–Arimoto |
//! | [`catalog`] | named families with closed-form power |
//!
//! ```
//! use infopower_core::{catalog, optimizer::{maximize_informational_power, OptimizerConfig}};
//!
//! let trine = catalog::trine();
//! let report = maximize_informational_power(&trine.povm, &OptimizerConfig::default()).unwrap();
//! assert!((report.power_estimate - 1.5f64.log2()).abs() < 1e-4);
//! ```

pub mod catalog;
pub mod commuting;
pub mod duality;
pub mod error;
pub mod info;
pub mod linalg;
pub mod optimizer;
pub mod quantum;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector};
pub use quantum::{DensityMatrix, Ensemble, Povm, PureEnsemble, DEFAULT_TOL};
