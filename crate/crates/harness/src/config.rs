//! Flat experiment configuration, its validation and its replay hash.

use std::path::{Path, PathBuf};

use eulersim::anneal::{AnnealParams, CostBackend, Objective};
use eulersim::baselines::BRUTE_FORCE_LIMIT;
use eulersim::graph::{Family, Sign};
use eulersim::noise::NoiseSpec;
use eulersim::optics::OpticalGeometry;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{HarnessError, Result};

/// Environment variable naming the default output root.
pub const OUT_ENV: &str = "EULERSIM_OUT";
pub const DEFAULT_OUT_ROOT: &str = "results";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Generate,
    Solve,
    SweepDensity,
    SweepNoise,
    Verify,
    Bench,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::Generate => "generate",
            Task::Solve => "solve",
            Task::SweepDensity => "sweep-density",
            Task::SweepNoise => "sweep-noise",
            Task::Verify => "verify",
            Task::Bench => "bench",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Solver {
    #[serde(rename = "euler-sim")]
    EulerSim,
    #[serde(rename = "sg")]
    Sg,
    #[serde(rename = "brute")]
    Brute,
    #[serde(rename = "random")]
    Random,
}

impl Solver {
    pub fn as_str(self) -> &'static str {
        match self {
            Solver::EulerSim => "euler-sim",
            Solver::Sg => "sg",
            Solver::Brute => "brute",
            Solver::Random => "random",
        }
    }
}

impl std::str::FromStr for Solver {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "euler-sim" => Ok(Solver::EulerSim),
            "sg" => Ok(Solver::Sg),
            "brute" => Ok(Solver::Brute),
            "random" => Ok(Solver::Random),
            other => Err(format!("unknown solver {other:?}; expected euler-sim, sg, brute or random")),
        }
    }
}

/// Every key of a run. Missing keys take the defaults below.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub task: Task,

    // instance source: a file, or the generator
    pub instance: Option<PathBuf>,
    pub encoding: Option<PathBuf>,
    pub n: usize,
    pub density: f64,
    pub sign: Sign,
    pub family: Family,
    pub seed: u64,
    pub repetitions: usize,

    // solvers
    pub solver: Solver,
    pub solvers: Vec<Solver>,
    pub reference: Solver,
    pub sg_starts: usize,
    pub random_samples: usize,
    pub check_optimum: bool,
    /// Random cases per suite of the verify task.
    pub verify_cases: usize,

    // annealer
    pub iterations: usize,
    pub restarts: usize,
    pub initial_flip_fraction: f64,
    pub final_flip_fraction: Option<f64>,
    pub temperature_start: Option<f64>,
    pub cooling_rate: f64,
    pub warmup_proposals: usize,
    pub backend: Option<CostBackend>,
    pub objective: Objective,
    pub noise_level: f64,
    /// Offset added to each repetition seed for the noise stream.
    pub noise_seed: u64,

    // sweeps
    pub densities: Vec<f64>,
    pub noise_levels: Vec<f64>,

    // optics
    pub slm_cols: usize,
    pub slm_rows: usize,
    pub macropixel: usize,
    pub pad_factor: usize,

    // execution; neither enters the hash
    pub output_dir: Option<PathBuf>,
    pub workers: usize,
    pub write_traces: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let anneal = AnnealParams::default();
        let optics = OpticalGeometry::default();
        ExperimentConfig {
            task: Task::Solve,
            instance: None,
            encoding: None,
            n: 64,
            density: 1.0,
            sign: Sign::Plus,
            family: Family::default(),
            seed: 0,
            repetitions: 1,
            solver: Solver::EulerSim,
            solvers: vec![Solver::EulerSim, Solver::Sg],
            reference: Solver::Sg,
            sg_starts: 1,
            random_samples: 1000,
            check_optimum: false,
            verify_cases: 200,
            iterations: anneal.iterations,
            restarts: anneal.restarts,
            initial_flip_fraction: anneal.initial_flip_fraction,
            final_flip_fraction: anneal.final_flip_fraction,
            temperature_start: anneal.temperature_start,
            cooling_rate: anneal.cooling_rate,
            warmup_proposals: anneal.warmup_proposals,
            backend: anneal.backend,
            objective: anneal.objective,
            noise_level: 0.0,
            noise_seed: 1_000_003,
            densities: vec![0.5, 0.6, 0.7, 0.8, 0.9, 1.0],
            noise_levels: vec![0.0, 0.02, 0.03, 0.1, 0.3],
            slm_cols: optics.slm_cols,
            slm_rows: optics.slm_rows,
            macropixel: optics.macropixel,
            pad_factor: optics.pad_factor,
            output_dir: None,
            workers: 0,
            write_traces: true,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| HarnessError::Config(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn geometry(&self) -> OpticalGeometry {
        OpticalGeometry {
            slm_cols: self.slm_cols,
            slm_rows: self.slm_rows,
            macropixel: self.macropixel,
            pad_factor: self.pad_factor,
            ..OpticalGeometry::default()
        }
    }

    /// Annealer parameters for one repetition seed and noise level.
    pub fn anneal_params(&self, seed: u64, noise_level: f64) -> Result<AnnealParams> {
        let noise = NoiseSpec::new(noise_level, self.noise_seed.wrapping_add(seed)).map_err(config_err)?;
        Ok(AnnealParams {
            iterations: self.iterations,
            restarts: self.restarts,
            initial_flip_fraction: self.initial_flip_fraction,
            final_flip_fraction: self.final_flip_fraction,
            temperature_start: self.temperature_start,
            cooling_rate: self.cooling_rate,
            warmup_proposals: self.warmup_proposals,
            backend: self.backend,
            objective: self.objective,
            noise,
            seed,
        })
    }

    /// Repetition seeds `seed, seed + 1, ...`.
    pub fn seeds(&self) -> Vec<u64> {
        (0..self.repetitions as u64).map(|i| self.seed + i).collect()
    }

    /// Noise levels of a sweep with the unnoised reference first.
    pub fn sweep_levels(&self) -> Vec<f64> {
        let mut levels = vec![0.0];
        for &l in &self.noise_levels {
            if !levels.contains(&l) {
                levels.push(l);
            }
        }
        levels
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(HarnessError::Config(m));
        if self.repetitions == 0 {
            return fail("repetitions must be at least 1".into());
        }
        if let Some(p) = &self.instance {
            if !p.is_file() {
                return fail(format!("instance file {} does not exist", p.display()));
            }
        }
        if let Some(p) = &self.encoding {
            if !p.is_file() {
                return fail(format!("encoding file {} does not exist", p.display()));
            }
            if self.instance.is_none() {
                return fail("an encoding file needs an instance file".into());
            }
        }
        if self.instance.is_none() && self.n < 2 {
            return fail(format!("n must be at least 2, got {}", self.n));
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return fail(format!("density must lie in (0, 1], got {}", self.density));
        }
        if self.sg_starts == 0 || self.random_samples == 0 {
            return fail("sg_starts and random_samples must be at least 1".into());
        }
        if self.check_optimum && self.instance.is_none() && self.n > BRUTE_FORCE_LIMIT {
            return fail(format!("check_optimum needs n <= {BRUTE_FORCE_LIMIT}, got {}", self.n));
        }
        match self.task {
            Task::SweepDensity => {
                if self.densities.is_empty() || self.solvers.is_empty() {
                    return fail("sweep-density needs densities and solvers".into());
                }
                if self.instance.is_some() {
                    return fail("sweep-density generates its instances; drop the instance key".into());
                }
                for &d in &self.densities {
                    if !(d > 0.0 && d <= 1.0) {
                        return fail(format!("density must lie in (0, 1], got {d}"));
                    }
                }
            }
            Task::SweepNoise => {
                if self.solver != Solver::EulerSim {
                    return fail("sweep-noise runs the euler-sim solver only".into());
                }
                if self.noise_levels.is_empty() {
                    return fail("sweep-noise needs at least one noise level".into());
                }
                for &l in &self.noise_levels {
                    NoiseSpec::new(l, 0).map_err(config_err)?;
                }
            }
            Task::Bench if self.solvers.is_empty() => return fail("bench needs at least one solver".into()),
            Task::Verify if self.verify_cases == 0 => return fail("verify_cases must be at least 1".into()),
            _ => {}
        }
        NoiseSpec::new(self.noise_level, 0).map_err(config_err)?;
        self.geometry().validate().map_err(config_err)?;
        // parameter checks that do not depend on the instance size
        self.anneal_params(self.seed, self.noise_level)?
            .validate(self.n.max(2))
            .map_err(config_err)?;
        Ok(())
    }

    /// SHA-256 of the canonical config without the execution-only keys.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output_dir = None;
        canonical.workers = 0;
        hex::encode(Sha256::digest(canonical.to_toml().as_bytes()))
    }

    /// `output_dir`, or `<root>/<task>-<hash prefix>` under the default root.
    pub fn resolve_output_dir(&self) -> PathBuf {
        match &self.output_dir {
            Some(p) => p.clone(),
            None => {
                let root = std::env::var_os(OUT_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_ROOT));
                root.join(format!("{}-{}", self.task.as_str(), &self.hash()[..12]))
            }
        }
    }
}

fn config_err(e: eulersim::Error) -> HarnessError {
    HarnessError::Config(e.to_string())
}
