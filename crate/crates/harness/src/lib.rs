//! Experiment runner for the `eulersim` Max-cut toolkit: instance generation,
//! solver runs, density and noise sweeps, and replayable CSV artifacts.

pub mod config;
pub mod error;
pub mod output;
pub mod roundtrip;
pub mod run;
pub mod stats;
pub mod verify;

pub use config::{ExperimentConfig, Solver, Task};
pub use error::{HarnessError, Result};
pub use run::{run, CellRecord, RunOutcome, SummaryRow};
