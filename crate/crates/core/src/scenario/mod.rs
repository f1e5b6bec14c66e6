//! Benchmark scenarios, configuration, outputs and post-processing.

pub mod build;
pub mod config;
pub mod output;
pub mod post;
pub mod run;
pub mod sweep;

pub use config::{parse_config, parse_config_str, ScenarioConfig, ScenarioKind};
pub use run::{run_scenario, RunOutcome, RunStatus, RunSummary};
pub use sweep::{run_sweep, SweepRow};
