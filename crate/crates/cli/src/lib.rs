//! Experiment runner for the `leo-outage` library: figure presets, custom
//! sweeps from TOML files, CSV and SVG output, and the oracle checks.

pub mod config;
pub mod experiment;
pub mod output;
pub mod validate;

pub use experiment::{run, Condition, ExperimentSpec, Preset, Row, Scheme, Table};
