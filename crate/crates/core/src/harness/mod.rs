//! Configuration, parameter sweeps and the command line.

pub mod cli;
pub mod config;
pub mod sweep;

pub use cli::run;
pub use config::Settings;
pub use sweep::{run_sweep, SweepMode, SweepRecord, SweepSpec};
