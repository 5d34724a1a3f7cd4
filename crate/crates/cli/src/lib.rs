//! Front end of the `slar` binary: experiment configs, the run pipeline,
//! SVG figures and the verification suite.

pub mod config;
pub mod error;
pub mod plot;
pub mod run;
pub mod verify;

pub use config::ExperimentConfig;
pub use error::CliError;
pub use run::{cmd_gen, cmd_run, Options};
pub use verify::cmd_verify;
