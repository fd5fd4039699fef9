//! File formats, decoding, the detection pipeline and the command-line front end
//! around [`eyescore_core`].

pub mod cli;
pub mod commands;
pub mod config;
pub mod datasets;
pub mod decode;
pub mod error;
pub mod pipeline;
pub mod report;

pub use config::{OutputFormat, RoiModeKind, RunConfig, Settings};
pub use decode::load_frame;
pub use error::{AppError, AppResult, ExitClass};
