//! File formats: JSON configuration, CSV tables, Touchstone and run
//! manifests. This layer works in `f64`.

pub mod config;
pub mod manifest;
pub mod tables;
pub mod touchstone;

pub use config::{parse_config_str, parse_device_config, parse_device_config_str, ConfigDocument};
pub use manifest::{manifest_path, RunManifest};
pub use tables::{export_csv, read_csv, Table};
pub use touchstone::{export_touchstone, parse_touchstone, touchstone_string};
