//! Config-driven experiment runner: INI configs, presets, realization-parallel
//! runs with CSV, JSON and SVG outputs and a manifest.

mod config;
mod manifest;
mod presets;
mod run;
mod svg;

pub use config::{
    schema_text, EstimatorSpec, ExperimentConfig, ExperimentKind, OutputTimes, PathFamily, PathSpec, SchemaEntry,
    SolverSpec, SCHEMA,
};
pub use manifest::{FileEntry, RunManifest, RunStatus, MANIFEST_FILE};
pub use presets::{kind_defaults, preset, PRESET_NAMES};
pub use run::{
    exponent_table, format_exponent_table, load_summary, requested_threads, run, threads_env_doc, variants,
    ExponentRow, Variant, THREADS_ENV,
};
pub use svg::{line_plot, Series};
