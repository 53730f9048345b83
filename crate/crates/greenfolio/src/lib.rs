//! File formats, pipeline orchestration and the command-line front end for
//! [`greenfolio_core`].

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod format;
pub mod ingest;
pub mod output;
pub mod pipeline;

pub use config::{Overrides, RunConfig};
pub use error::{Error, Result, StageError};
pub use pipeline::{run_through, RunOutputs, Stage};

use std::path::PathBuf;

/// Runs the stages needed by `stages`, then writes their files and a
/// manifest into the configured output directory.
pub fn execute(config: &RunConfig, stages: &[Stage], command: &str) -> Result<Vec<PathBuf>, StageError> {
    use error::WithStage;
    let last = *stages.iter().max().expect("at least one stage");
    let outputs = run_through(config, last)?;
    let files = output::render(&outputs, stages, command).stage(last.name())?;
    output::write_all(&config.out_dir, &files).stage("output")
}
