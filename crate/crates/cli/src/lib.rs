//! Experiment runner behind the `slap` binary: TOML configuration, figure
//! presets, scans and sweeps, CSV tables and SVG plots.

// `!(x > 0.0)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod plot;
pub mod run;

pub use config::{load_config, parse_config, ConfigError, ExperimentConfig, Preset};
pub use run::{run, run_preset, Artifact, ArtifactRole, RunArtifacts, RunError, RunOptions};
