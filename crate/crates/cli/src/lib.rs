//! Command-line front end: configuration parsing, task dispatch and report
//! writing for `ncrs-core`.

pub mod config;
pub mod run;

pub use config::{parse_config, ConfigErrors, FieldError, ProblemConfig, Task};
pub use run::{run, CliError, RunReport, FORMAT_VERSION};
