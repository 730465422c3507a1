//! Batch orchestration, statistics, persistence and plots.
//!
//! A suite is a grid of graph sizes times instances per size for one graph
//! family. Every instance runs end-to-end on a rayon worker and writes its
//! own trace CSV and summary JSON; aggregation happens afterwards on the
//! calling thread in instance order, so outputs are byte-identical across
//! runs and thread counts.

mod config;
mod convergence;
mod plot;
mod stats;
mod suite;

use std::path::PathBuf;

use thiserror::Error;

use crate::dynamics::DynamicsError;
use crate::graph::GraphError;
use crate::hamiltonian::HamiltonianError;

pub use config::{graph_from_spec, Family, SuiteConfig, SuiteSpec, DEFAULT_ORACLE_CAP, DEFAULT_SNAPSHOTS};
pub use convergence::{convergence_experiment, write_convergence, ConvergenceRecord, ConvergenceReport};
pub use plot::{emit_plot, loglog_series, PlotKind, Series, SeriesStyle};
pub use stats::{fit_loglog, fit_loglog_all, ols, percentile, FitKind, FitResult};
pub use suite::{
    graph_hash, read_trace, run_single, run_suite, AggregateRow, FinalMetrics, InstanceSummary, RunVariant,
    SkippedInstance, SnapshotRow, SuiteReport, TraceRow, TrapezoidSummary, TRACE_HEADER,
};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error("invalid suite: {0}")]
    InvalidSpec(String),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("degenerate fit input: {0}")]
    Degenerate(String),
    #[error("percentile {0} outside [0, 100]")]
    PercentileRange(f64),
    #[error("no optimum available for {graph_id} (n = {n} above oracle cap {cap})")]
    MissingOracle { graph_id: String, n: usize, cap: usize },
}

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> ExperimentError {
    let path = path.into();
    move |source| ExperimentError::Io { path, source }
}

/// Writes `bytes` to a sibling temp file and renames it over `path`.
pub(crate) fn write_atomic(path: &std::path::Path, bytes: &[u8]) -> Result<(), ExperimentError> {
    let tmp = temp_path(path);
    std::fs::write(&tmp, bytes).map_err(io_err(&tmp))?;
    std::fs::rename(&tmp, path).map_err(io_err(path))
}

pub(crate) fn temp_path(path: &std::path::Path) -> PathBuf {
    let mut name = path.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(".tmp");
    path.with_file_name(name)
}

pub(crate) fn create_dir(path: &std::path::Path) -> Result<(), ExperimentError> {
    std::fs::create_dir_all(path).map_err(io_err(path))
}
