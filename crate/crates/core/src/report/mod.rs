//! Configuration, orchestration and file outputs.

pub mod config;
pub mod export;
pub mod heatmap;
pub mod pipeline;
pub mod render;

pub use config::{PipelineConfig, SeriesEntry, OUTPUT_DIR_ENV};
pub use export::{export_correlation_paths, read_correlation_path, write_outputs, write_simulation, Preset};
pub use heatmap::render_heatmap;
pub use pipeline::{run_pipeline, series_tests, Outcome, PairEntry, Report};
pub use render::{render_tables, Document};
