//! Scenario runner for `bubblelab-core`: TOML scenario files, parameter
//! sweeps and CSV artifacts.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod scenario;
pub mod sweep;
pub mod table;

pub use config::{Model, ScenarioConfig};
pub use error::{CliError, Result};
pub use scenario::{run_scenario, RunReport};
pub use sweep::{sweep, SweepReport};
