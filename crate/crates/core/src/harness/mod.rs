//! Scenario configs, runners and the artifacts they write.

pub mod admissibility;
pub mod config;
pub mod report;
pub mod run;
pub mod snapshot;

pub use admissibility::{validate_admissibility, AdmissibilityReport, AdmissibilityRow};
pub use config::{LoadedConfig, ScenarioConfig, ScenarioKind};
pub use report::{Assertion, Summary, Table};
pub use run::{output_root, run_many, run_scenario, RunOutcome, OUTPUT_ROOT_VAR};
pub use snapshot::Snapshot;
