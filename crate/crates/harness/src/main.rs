use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use eulersim::anneal::{CostBackend, Objective};
use eulersim::graph::{Family, Sign};
use eulersim_harness::{run, ExperimentConfig, HarnessError, Solver, Task};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TaskArg {
    Generate,
    Solve,
    SweepDensity,
    SweepNoise,
    Verify,
    Bench,
}

impl From<TaskArg> for Task {
    fn from(t: TaskArg) -> Self {
        match t {
            TaskArg::Generate => Task::Generate,
            TaskArg::Solve => Task::Solve,
            TaskArg::SweepDensity => Task::SweepDensity,
            TaskArg::SweepNoise => Task::SweepNoise,
            TaskArg::Verify => Task::Verify,
            TaskArg::Bench => Task::Bench,
        }
    }
}

fn parse_sign(s: &str) -> Result<Sign, String> {
    let v: i64 = s.parse().map_err(|_| format!("sign must be 1 or -1, got {s:?}"))?;
    Sign::try_from(v).map_err(|e| e.to_string())
}

/// Runs eulersim experiments. Flags override keys of the config file.
#[derive(Debug, Parser)]
#[command(name = "eulersim", version)]
struct Cli {
    /// Task to run.
    #[arg(value_enum)]
    task: TaskArg,

    /// TOML config file; any flag below overrides the same key.
    #[arg(long, short)]
    config: Option<PathBuf>,

    #[arg(long)]
    instance: Option<PathBuf>,
    #[arg(long)]
    encoding: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    density: Option<f64>,
    #[arg(long, value_parser = parse_sign, allow_hyphen_values = true)]
    sign: Option<Sign>,
    #[arg(long)]
    family: Option<Family>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    repetitions: Option<usize>,

    #[arg(long)]
    solver: Option<Solver>,
    #[arg(long, value_delimiter = ',')]
    solvers: Option<Vec<Solver>>,
    #[arg(long)]
    reference: Option<Solver>,
    #[arg(long)]
    sg_starts: Option<usize>,
    #[arg(long)]
    random_samples: Option<usize>,
    /// Also run brute force and report match or miss of the optimum.
    #[arg(long)]
    check_optimum: bool,
    #[arg(long)]
    verify_cases: Option<usize>,

    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    initial_flip_fraction: Option<f64>,
    #[arg(long)]
    final_flip_fraction: Option<f64>,
    #[arg(long)]
    temperature_start: Option<f64>,
    #[arg(long)]
    cooling_rate: Option<f64>,
    #[arg(long)]
    warmup_proposals: Option<usize>,
    #[arg(long)]
    backend: Option<CostBackend>,
    #[arg(long)]
    objective: Option<Objective>,
    #[arg(long)]
    noise_level: Option<f64>,
    #[arg(long)]
    noise_seed: Option<u64>,

    #[arg(long, value_delimiter = ',')]
    densities: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    noise_levels: Option<Vec<f64>>,

    #[arg(long)]
    slm_cols: Option<usize>,
    #[arg(long)]
    slm_rows: Option<usize>,
    #[arg(long)]
    macropixel: Option<usize>,
    #[arg(long)]
    pad_factor: Option<usize>,

    /// Output directory; defaults to `$EULERSIM_OUT/<task>-<hash>`.
    #[arg(long, short)]
    output_dir: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    workers: Option<usize>,
    /// Skip per-iteration traces in the cell files.
    #[arg(long)]
    no_traces: bool,
}

macro_rules! overlay {
    ($cfg:ident, $cli:ident, $($field:ident),*) => {
        $(if let Some(v) = $cli.$field.clone() { $cfg.$field = v; })*
    };
}

impl Cli {
    fn resolve(&self) -> Result<ExperimentConfig, HarnessError> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        cfg.task = self.task.into();
        let cli = self;
        overlay!(
            cfg, cli, n, density, sign, family, seed, repetitions, solver, solvers, reference, sg_starts,
            random_samples, verify_cases, iterations, restarts, initial_flip_fraction, cooling_rate,
            warmup_proposals, objective, noise_level, noise_seed, densities, noise_levels, slm_cols, slm_rows,
            macropixel, pad_factor, workers
        );
        if self.instance.is_some() {
            cfg.instance = self.instance.clone();
        }
        if self.encoding.is_some() {
            cfg.encoding = self.encoding.clone();
        }
        if self.output_dir.is_some() {
            cfg.output_dir = self.output_dir.clone();
        }
        if self.final_flip_fraction.is_some() {
            cfg.final_flip_fraction = self.final_flip_fraction;
        }
        if self.temperature_start.is_some() {
            cfg.temperature_start = self.temperature_start;
        }
        if self.backend.is_some() {
            cfg.backend = self.backend;
        }
        cfg.check_optimum |= self.check_optimum;
        cfg.write_traces &= !self.no_traces;
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = cli.resolve().and_then(|cfg| run(&cfg));
    match outcome {
        Ok(out) => {
            for line in &out.lines {
                println!("{line}");
            }
            println!("config_hash {}", out.config_hash);
            if out.passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: one or more checks failed");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
