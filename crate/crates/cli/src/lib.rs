//! Experiment harness: settings, random targets, runners and CSV/JSON output.

pub mod error;
pub mod experiments;
pub mod output;
pub mod settings;
pub mod target;

pub use error::{CliError, Result};
