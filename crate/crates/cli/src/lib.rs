//! File formats, batch experiments, plots and the `swarmgc` command line
//! on top of [`swarmgc_core`].

pub mod batch;
mod error;
pub mod library;
pub mod plot;
pub mod run;
pub mod scenario;
pub mod seqio;

pub use batch::{load_batch, Batch, BatchSpec, MetricRow, RunRecord, SummaryRow};
pub use error::{CliError, Result};
pub use scenario::{load_scenario, save_scenario, ScenarioFile};
