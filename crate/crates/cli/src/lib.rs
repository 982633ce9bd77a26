//! Command-line surface for the `infopower` binary.
//!
//! | command      | purpose                                                      |
//! |--------------|--------------------------------------------------------------|
//! | `validate`   | check a POVM document                                        |
//! | `power`      | informational power of a catalog family or POVM document     |
//! | `sweep`      | power over a one-parameter grid, as CSV                      |
//! | `dualcheck`  | duality identity and round trips for a POVM and a state      |
//! | `additivity` | power of a tensor power against the scaled single-copy power |
//!
//! Exit codes: 0 success, 1 parse or validation failure, 2 numerical
//! non-convergence or a failed identity check.

pub mod args;
pub mod commands;
pub mod document;
pub mod error;
pub mod power;
pub mod sweep;

pub use args::Cli;
pub use commands::{run, Outcome};
pub use error::{CliError, Result};
