//! Command-line front end: configuration files, parameter sweeps, figure
//! presets and report emission.

pub mod config;
pub mod experiment;
pub mod output;
pub mod report;
pub mod sweep;
