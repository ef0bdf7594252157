//! Configuration, archives, reports and the acceptance bench for `warpflow`
//! experiments.

pub mod archive;
pub mod bench;
pub mod config;
pub mod error;
pub mod experiment;
pub mod formats;
pub mod report;

pub use archive::{read_archive, write_archive, RunArchive};
pub use config::{parse_config, serialize_config, ExperimentConfig};
pub use error::{CliError, Result};
pub use experiment::{run_experiment, ExperimentOutcome};
pub use report::{emit_report, ReportFormat};
