//! Configuration, pipeline and report plumbing for the `ringfactor`
//! command-line tool.

pub mod app;
pub mod config;
pub mod error;
pub mod pipeline;
pub mod report;
pub mod svg;

pub use config::{parse_config, parse_config_str, JobConfig, OmegaSpec, Outputs, Tolerances};
pub use error::{CliError, ConfigErrors};
pub use pipeline::{evaluate, run_analyze, run_verify, Gates, InvariantResult, RunReport, Status};
