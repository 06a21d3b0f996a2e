//! Experiment grids: config loading, execution, persistence and summaries.

mod config;
mod runner;
mod summary;

use std::path::PathBuf;

use thiserror::Error;

pub use config::{
    load_config, parse_config, seed_offset_from_env, BpSettings, ExperimentConfig,
    LandscapeSettings, Mode, NoiseSetting, DEFAULT_QUBITS, SEED_OFFSET_VAR,
};
pub use runner::{
    noise_cells, run_bp_variance, run_landscape, run_train, train_cells, validate_channels,
    BpRecord, Cell, LandscapeRecord, Manifest, RunRecord, RunStatus, ValidationRow,
    VALIDATION_PROBABILITIES,
};
pub use summary::{
    read_manifest_records, render_table, summarize, summarize_dir, write_summary_csv, SummaryRow,
};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Execution(String),
    #[error(transparent)]
    Simulation(#[from] crate::Error),
}

impl ExperimentError {
    /// Process exit status: 1 for config errors, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config(_) => 1,
            _ => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        ExperimentError::Io {
            path: path.into(),
            source,
        }
    }
}
