//! File formats, sweep runner and command-line front end for
//! [`migrasim_core`].
//!
//! - [`config`]: JSON scenario files with typo-safe parsing.
//! - [`edgelist`]: plain-text weighted graphs for import and export.
//! - [`output`]: `series.csv`, `workers.csv`, `summary.json`.
//! - [`sweep`]: grid expansion, derived seeds, parallel execution, manifest.
//! - [`cli`]: the `migrasim` binary.

pub mod cli;
pub mod config;
pub mod edgelist;
pub mod error;
pub mod output;
pub mod sweep;

pub use config::{load_config, parse_config, ConfigDoc};
pub use error::{Error, Result};
pub use output::Format;
