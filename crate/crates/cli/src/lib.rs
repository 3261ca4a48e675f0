//! Runner for the sdtree pipeline: configuration, synthetic inputs, rule
//! reports and the engine benchmark. The `sdtree` binary is a thin wrapper.

pub mod bench;
pub mod config;
pub mod error;
pub mod pipeline;
pub mod report;
pub mod synth;

pub use config::{Format, PipelineConfig};
pub use error::{CliError, Stage};
