//! Scenario runner and parameter sweeps on top of `cavity_entangle`.

pub mod config;
pub mod error;
pub mod output;
pub mod run;
pub mod sweep;

pub use config::{parse_config, FeedbackChoice, ModelChoice, Scenario, ScenarioSpec, Settings, INITIAL_STATES};
pub use error::{CliError, Result};
pub use output::{append_record, sha256_hex, write_text, write_trajectory_csv};
pub use run::{build_model, initial_state, run_scenario, simulate, BuiltModel, RunRecord, Simulation};
pub use sweep::{sweep, Axis, SweepFailure, SweepGrid, SweepOutcome, SweepRow};
