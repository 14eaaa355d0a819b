//! Command-line front end for `qfivol-core`: worked-example reproductions,
//! seeded parallel sweeps with line-delimited JSON records, and exact replay
//! of individual records.

pub mod error;
pub mod record;
pub mod repro;
pub mod sweep;

pub use error::{CliError, CliResult};
pub use sweep::{run_sweep, SweepConfig, SweepSummary};
