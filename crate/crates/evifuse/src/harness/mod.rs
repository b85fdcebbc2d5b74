//! Experiment harness: configuration, metrics, conflict statistics, CSV
//! ingestion and export, and the reproducible experiment runner.

pub mod config;
pub mod csvio;
pub mod experiment;
pub mod fmt;
pub mod metrics;
pub mod stats;

pub use config::ExperimentConfig;
pub use csvio::ingest_features;
pub use experiment::run_experiment;
pub use metrics::{compute_metrics, MetricsReport};
pub use stats::{conflict_statistics, uncertainty_density, ConflictStatistics, DensityRow};
