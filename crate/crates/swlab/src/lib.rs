//! Scriptable front end for `swlab-core`: JSON run configs, CSV/JSON
//! artifacts and the `swlab` binary.

pub mod config;
pub mod error;
pub mod formats;
pub mod run;

pub use config::{Command, RunConfig};
pub use error::CliError;
pub use run::run;
