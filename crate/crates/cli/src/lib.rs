//! Scenario files, runners and CSV output behind the `qcorr` binary.

pub mod output;
pub mod run;
pub mod scenario;

pub use run::{run_scenario, Check, Outcome, DEFAULT_SEED};
pub use scenario::{parse_scenario, Kind, Scenario, ScenarioError};
