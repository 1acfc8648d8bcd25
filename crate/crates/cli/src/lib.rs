//! Command-line front end of the growup laboratory: experiment configs,
//! single runs, parameter sweeps, verification recipes and CSV/JSON export.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod experiment;
pub mod info;
pub mod output;
pub mod special;
pub mod sweep;

pub use config::{ExperimentConfig, FitSpec, GridSpec, Overrides};
pub use error::{CliError, EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE};
pub use experiment::{run_experiment, simulate_to, ExperimentReport};
pub use sweep::{run_sweep, SweepConfig, SweepTable};
