use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use infopower_core::catalog::FamilyParams;
use infopower_core::optimizer::OptimizerConfig;

/// Informational power of quantum measurements.
#[derive(Debug, Parser)]
#[command(name = "infopower", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that a POVM document is a valid measurement.
    Validate {
        path: String,
        /// Overrides the tolerance stored in the document.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Compute the informational power of a catalog family or POVM document.
    Power {
        source: String,
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        optimizer: OptimizerArgs,
    },
    /// Tabulate the power over a one-parameter grid of a catalog family.
    Sweep {
        /// Catalog family; omit when `--spec` is given.
        family: Option<String>,
        /// JSON sweep specification.
        #[arg(long)]
        spec: Option<String>,
        /// Parameter to vary: d, eta, n or theta.
        #[arg(long)]
        param: Option<String>,
        #[arg(long)]
        start: Option<f64>,
        #[arg(long)]
        stop: Option<f64>,
        #[arg(long)]
        count: Option<usize>,
        #[command(flatten)]
        family_args: FamilyArgs,
        #[command(flatten)]
        optimizer: OptimizerArgs,
    },
    /// Check the duality between a POVM and its dual ensemble.
    Dualcheck {
        source: String,
        /// `maximally-mixed`, `random`, or a path to a matrix document.
        #[arg(long, default_value = "maximally-mixed")]
        sigma: String,
        /// Seed for random measurements and reference states.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Outcome count of a random measurement (default twice the dimension).
        #[arg(long)]
        outcomes: Option<usize>,
        #[command(flatten)]
        family: FamilyArgs,
    },
    /// Compare the power of a tensor power with the scaled single-copy power.
    Additivity {
        source: String,
        #[arg(long, default_value_t = 2)]
        copies: u32,
        #[arg(long, default_value_t = 9)]
        dim_limit: usize,
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        optimizer: OptimizerArgs,
    },
}

#[derive(Debug, Clone, Args)]
pub struct FamilyArgs {
    /// Dimension for `projective`, `noisy-projective` and `random`.
    #[arg(long = "d", default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    /// Symmetry order for `zn`.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Angle in radians for `mirror-y`.
    #[arg(long, default_value_t = PI / 6.0)]
    pub theta: f64,
}

impl FamilyArgs {
    pub fn params(&self) -> FamilyParams {
        FamilyParams { dim: self.dim, eta: self.eta, n: self.n, theta: self.theta }
    }
}

/// Stationarity tolerance used by the command line.
pub const CLI_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Args)]
pub struct OptimizerArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0.2)]
    pub alpha0: f64,
    /// Stationarity tolerance below which a run counts as converged.
    #[arg(long, default_value_t = CLI_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = 5000)]
    pub max_iters: usize,
    #[arg(long)]
    pub ensemble_size: Option<usize>,
    /// Start from real states with `D(D+1)/2` members.
    #[arg(long)]
    pub real: bool,
    /// Use the general optimizer even for commuting measurements.
    #[arg(long)]
    pub force_general: bool,
}

impl Default for OptimizerArgs {
    fn default() -> Self {
        let cfg = OptimizerConfig::default();
        Self {
            seed: cfg.seed,
            restarts: cfg.restarts,
            alpha0: cfg.alpha0,
            tol: CLI_TOL,
            max_iters: cfg.max_iters,
            ensemble_size: None,
            real: false,
            force_general: false,
        }
    }
}

impl OptimizerArgs {
    pub fn config(&self) -> OptimizerConfig {
        OptimizerConfig {
            alpha0: self.alpha0,
            tol_stationarity: self.tol,
            max_iters: self.max_iters,
            restarts: self.restarts,
            seed: self.seed,
            ensemble_size_override: self.ensemble_size,
            real_hint: self.real,
            ..OptimizerConfig::default()
        }
    }
}
