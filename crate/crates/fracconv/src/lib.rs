//! Configuration, file formats and experiment orchestration around
//! [`fracconv_core`]. The `fracconv` binary is a thin clap layer over this.

pub mod config;
pub mod experiment;
pub mod snapshot;
pub mod sweep;
pub mod table;

pub use fracconv_core as core;
