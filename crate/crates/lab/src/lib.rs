//! Experiment runner for the blow-up model problems: TOML configs, the
//! registry of pinned reproductions, reports and CSV artifacts.

pub mod config;
pub mod ineq;
pub mod profiles;
pub mod registry;
pub mod runner;

pub use config::{parse_config, ConfigError, Expect, ExperimentConfig};
pub use registry::{list_experiments, reproduce, RegistryEntry, REGISTRY};
pub use runner::{run, write_outputs, ExperimentReport, LabError, RunOutput, Verdict};
