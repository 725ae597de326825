//! Pipeline orchestration, output tables and figure rendering.

mod config;
mod pipeline;
mod svg;
pub mod tables;

pub use config::{LanguageConfig, RunConfig};
pub use pipeline::{run_pipeline, LanguageReport, LanguageStatus, PipelineSummary, Stage};
pub use svg::{render_forest, render_scatter, ForestEntry, ScatterPoint};
