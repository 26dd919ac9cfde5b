//! File formats, sweeps and plotting around `fockport-core`. The `fockport`
//! binary is a thin clap layer over these modules.

pub mod config;
pub mod exchange;
pub mod format;
pub mod plot;
pub mod selftest;
pub mod sweep;

pub use config::{SweepConfig, ValidatedConfig};
pub use sweep::{compute, run_sweep, SweepReport, Table};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "FOCKPORT_OUT_DIR";
