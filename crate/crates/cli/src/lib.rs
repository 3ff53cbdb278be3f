//! Configuration, CSV ingestion, the end-to-end pipeline and report output
//! for the `econet` command.

pub mod config;
pub mod emit;
pub mod error;
pub mod ingest;
pub mod pipeline;

pub use config::{Overrides, RunConfig};
pub use emit::{emit_heatmap_data, write_report, Format, Formats};
pub use error::{CliError, ParseError};
pub use pipeline::{run_pipeline, AnalysisReport};
