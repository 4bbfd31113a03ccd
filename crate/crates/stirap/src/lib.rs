//! Command-line front end for [`stirap_core`]: JSON configs, multi-threaded
//! parameter sweeps, figure presets with manifests, and CSV/JSON export.

pub mod config;
mod error;
pub mod executor;
pub mod output;
pub mod presets;
pub mod run;

pub use config::{from_file, parse_config, read_config_file, ConfigError, ConfigFile, RunConfig, SweepConfig};
pub use error::RunError;
pub use executor::{run_scan, run_sweep};
pub use output::{Format, Table};
pub use presets::{preset, preset_configs, run_preset, Manifest, Preset, PresetOptions, PRESETS};
pub use stirap_core;
