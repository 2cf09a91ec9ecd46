//! Experiment runner for the topoartmap engine: TOML experiment files,
//! CSV ingestion, single runs, parallel grid sweeps and result files.

pub mod error;
pub mod experiment;
pub mod grid;
pub mod ingest;
pub mod output;

pub use error::{CliError, Result};
pub use experiment::{
    run, sweep, Experiment, Metrics, ModelKind, NnSettings, RunOutput, SweepOutput, SweepRow,
};
pub use grid::Grid;
pub use ingest::ingest;
