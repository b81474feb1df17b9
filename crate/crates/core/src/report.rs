use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::{MaxCutInstance, SpinConfig};

/// Outcome of one solver run, shared by every solver.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutReport {
    pub solver: String,
    pub cut_value: f64,
    pub hamiltonian: f64,
    pub config: SpinConfig,
    pub wall_time_s: f64,
    pub seed: Option<u64>,
    /// Annealing iterations per restart, or configurations examined.
    pub iterations: u64,
}

impl CutReport {
    /// Scores `config` on `inst` exactly.
    pub fn score(
        solver: &str,
        inst: &MaxCutInstance,
        config: SpinConfig,
        wall_time_s: f64,
        seed: Option<u64>,
        iterations: u64,
    ) -> Result<Self> {
        Ok(CutReport {
            solver: solver.to_string(),
            cut_value: inst.cut_value(&config)?,
            hamiltonian: inst.hamiltonian(&config)?,
            config,
            wall_time_s,
            seed,
            iterations,
        })
    }
}
