//! Command-line harness around `ztnd-core`: named scenarios, flat config
//! files, CSV traces and SVG plots.

// `!(x > y)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod app;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod svg;

pub use app::run_cli;
pub use config::ScenarioConfig;
pub use error::{CliError, CliResult};
