//! Task execution: plans seed-isolated cells, runs them on a worker pool and
//! persists every artifact.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use eulersim::anneal::{anneal, AnnealTrace};
use eulersim::baselines::{brute_force_maxcut, random_cut, sahni_gonzalez, sahni_gonzalez_multistart};
use eulersim::graph::{
    fit_rank2, generate, parse_encoding, parse_instance, serialize_encoding, serialize_instance, GeneratorSpec,
    MaxCutInstance, Rank2Encoding, SpinConfig,
};
use eulersim::optics::{build_layout, MacropixelLayout};
use eulersim::CutReport;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Solver, Task};
use crate::error::{HarnessError, Result};
use crate::output::{
    fmt_f64, write_atomic, write_csv, write_json, CELLS_DIR, INSTANCES_DIR, RESOLVED_CONFIG, RESULTS_CSV,
    RESULT_COLUMNS, SUMMARY_CSV,
};
use crate::stats::{improvement_pct, mean_ci, mean_std};
use crate::verify;

/// Edge lists of low-rank instances are written only up to this size; the
/// encoding file always describes them exactly.
pub const EDGE_LIST_LIMIT: usize = 256;

pub const OPTIMUM_CSV: &str = "optimum.csv";
pub const GENERATED_CSV: &str = "instances.csv";
pub const VERIFY_CSV: &str = "verify.csv";

/// Confidence level of the per-seed improvement interval.
pub const CI_LEVEL: f64 = 0.95;

/// Relative tolerance under which two cuts count as equal.
pub const CUT_TIE_TOL: f64 = 1e-9;

/// One solver run on one instance, as persisted under `cells/`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub config_hash: String,
    pub solver: String,
    pub n: usize,
    pub density: f64,
    pub sign: i64,
    pub noise_level: f64,
    pub seed: u64,
    pub best_cut: f64,
    pub hamiltonian: f64,
    pub iterations: u64,
    pub wall_time_s: f64,
    pub config: SpinConfig,
    pub trace: Option<AnnealTrace>,
}

impl CellRecord {
    pub fn file_name(&self) -> String {
        format!(
            "{}-d{}-l{}-s{}.json",
            self.solver,
            fmt_f64(self.density),
            fmt_f64(self.noise_level),
            self.seed
        )
    }

    fn csv_row(&self) -> Vec<String> {
        vec![
            self.solver.clone(),
            self.n.to_string(),
            fmt_f64(self.density),
            self.sign.to_string(),
            fmt_f64(self.noise_level),
            self.seed.to_string(),
            fmt_f64(self.best_cut),
            fmt_f64(self.hamiltonian),
            self.iterations.to_string(),
            fmt_f64(self.wall_time_s),
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupBy {
    Density,
    NoiseLevel,
}

impl GroupBy {
    pub fn column(self) -> &'static str {
        match self {
            GroupBy::Density => "density",
            GroupBy::NoiseLevel => "noise_level",
        }
    }

    fn key(self, r: &CellRecord) -> f64 {
        match self {
            GroupBy::Density => r.density,
            GroupBy::NoiseLevel => r.noise_level,
        }
    }
}

/// One summary row: a solver within one density or noise-level group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub group: f64,
    pub solver: String,
    pub seeds: usize,
    pub mean_cut: f64,
    pub std_cut: f64,
    pub min_cut: f64,
    pub max_cut: f64,
    pub mean_wall_time_s: f64,
    pub reference: String,
    /// `100 (sum A - sum ref) / |sum ref|` over the matched seeds.
    pub improvement_pct: Option<f64>,
    /// Mean and confidence interval of the per-seed improvement.
    pub pct_mean: Option<f64>,
    pub pct_ci_low: Option<f64>,
    pub pct_ci_high: Option<f64>,
    pub wins: usize,
    pub ties: usize,
    pub losses: usize,
}

pub const SUMMARY_TAIL: [&str; 15] = [
    "solver",
    "seeds",
    "mean_cut",
    "std_cut",
    "min_cut",
    "max_cut",
    "mean_wall_time_s",
    "reference",
    "improvement_pct",
    "pct_mean",
    "pct_ci_low",
    "pct_ci_high",
    "wins",
    "ties",
    "losses",
];

impl SummaryRow {
    fn csv_row(&self) -> Vec<String> {
        let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
        vec![
            fmt_f64(self.group),
            self.solver.clone(),
            self.seeds.to_string(),
            fmt_f64(self.mean_cut),
            fmt_f64(self.std_cut),
            fmt_f64(self.min_cut),
            fmt_f64(self.max_cut),
            fmt_f64(self.mean_wall_time_s),
            self.reference.clone(),
            opt(self.improvement_pct),
            opt(self.pct_mean),
            opt(self.pct_ci_low),
            opt(self.pct_ci_high),
            self.wins.to_string(),
            self.ties.to_string(),
            self.losses.to_string(),
        ]
    }
}

fn same_cut(a: f64, b: f64) -> bool {
    (a - b).abs() <= CUT_TIE_TOL * b.abs().max(1.0)
}

/// Reference selector for [`summarize`].
#[derive(Clone, Debug, PartialEq)]
pub enum Reference {
    /// Another solver in the same group.
    Solver(String),
    /// The same solver in the group keyed `0` (the unnoised run).
    ZeroGroup,
    None,
}

/// Groups records in order of first appearance and compares each solver with
/// its reference on the seeds both have.
pub fn summarize(records: &[CellRecord], by: GroupBy, reference: &Reference) -> Vec<SummaryRow> {
    let mut keys: Vec<(f64, String)> = Vec::new();
    for r in records {
        let k = (by.key(r), r.solver.clone());
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys.into_iter()
        .map(|(group, solver)| {
            let own: Vec<&CellRecord> = records
                .iter()
                .filter(|r| by.key(r) == group && r.solver == solver)
                .collect();
            let cuts: Vec<f64> = own.iter().map(|r| r.best_cut).collect();
            let (mean_cut, std_cut) = mean_std(&cuts);
            let walls: Vec<f64> = own.iter().map(|r| r.wall_time_s).collect();
            let (ref_label, ref_records): (String, Vec<&CellRecord>) = match reference {
                Reference::Solver(s) => (
                    s.clone(),
                    records.iter().filter(|r| by.key(r) == group && &r.solver == s).collect(),
                ),
                Reference::ZeroGroup => (
                    format!("{}=0", by.column()),
                    records.iter().filter(|r| by.key(r) == 0.0 && r.solver == solver).collect(),
                ),
                Reference::None => (String::new(), Vec::new()),
            };
            let pairs: Vec<(f64, f64)> = own
                .iter()
                .filter_map(|a| ref_records.iter().find(|b| b.seed == a.seed).map(|b| (a.best_cut, b.best_cut)))
                .collect();
            let mut row = SummaryRow {
                group,
                solver,
                seeds: own.len(),
                mean_cut,
                std_cut,
                min_cut: cuts.iter().copied().fold(f64::INFINITY, f64::min),
                max_cut: cuts.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                mean_wall_time_s: mean_std(&walls).0,
                reference: ref_label,
                improvement_pct: None,
                pct_mean: None,
                pct_ci_low: None,
                pct_ci_high: None,
                wins: 0,
                ties: 0,
                losses: 0,
            };
            if !pairs.is_empty() {
                let sum_a: f64 = pairs.iter().map(|p| p.0).sum();
                let sum_r: f64 = pairs.iter().map(|p| p.1).sum();
                row.improvement_pct = Some(improvement_pct(sum_a, sum_r));
                let pcts: Vec<f64> = pairs.iter().map(|&(a, b)| improvement_pct(a, b)).collect();
                let (lo, hi) = mean_ci(&pcts, CI_LEVEL);
                row.pct_mean = Some(mean_std(&pcts).0);
                row.pct_ci_low = Some(lo);
                row.pct_ci_high = Some(hi);
                for &(a, b) in &pairs {
                    if same_cut(a, b) {
                        row.ties += 1;
                    } else if a > b {
                        row.wins += 1;
                    } else {
                        row.losses += 1;
                    }
                }
            }
            row
        })
        .collect()
}

/// An instance to solve with everything the solvers need.
struct Problem {
    density: f64,
    seed: u64,
    inst: Arc<MaxCutInstance>,
    enc: Option<Arc<Rank2Encoding>>,
}

struct Cell {
    problem: usize,
    solver: Solver,
    noise_level: f64,
}

/// Everything a finished run produced.
#[derive(Debug)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub config_hash: String,
    pub records: Vec<CellRecord>,
    pub summary: Vec<SummaryRow>,
    /// Human-readable report lines.
    pub lines: Vec<String>,
    /// False when a verify suite failed.
    pub passed: bool,
}

/// Validates the config, runs its task and writes artifacts.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| HarnessError::Runtime(format!("cannot start worker pool: {e}")))?;
    pool.install(|| run_task(cfg))
}

fn run_task(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    let hash = cfg.hash();
    let dir = cfg.resolve_output_dir();
    write_atomic(
        &dir.join(RESOLVED_CONFIG),
        format!("# config_hash = \"{hash}\"\n{}", cfg.to_toml()).as_bytes(),
    )?;
    let mut out = RunOutcome {
        dir,
        config_hash: hash,
        records: Vec::new(),
        summary: Vec::new(),
        lines: Vec::new(),
        passed: true,
    };
    match cfg.task {
        Task::Generate => run_generate(cfg, &mut out)?,
        Task::Verify => run_verify(cfg, &mut out)?,
        Task::Solve | Task::Bench | Task::SweepDensity | Task::SweepNoise => run_cells(cfg, &mut out)?,
    }
    Ok(out)
}

fn generated_problems(cfg: &ExperimentConfig, densities: &[f64]) -> Result<Vec<Problem>> {
    let specs: Vec<GeneratorSpec> = densities
        .iter()
        .flat_map(|&density| {
            cfg.seeds().into_iter().map(move |seed| GeneratorSpec {
                n: cfg.n,
                density,
                sign: cfg.sign,
                seed,
                family: cfg.family,
            })
        })
        .collect();
    specs
        .par_iter()
        .map(|spec| {
            let (inst, enc) = generate(spec)?;
            Ok(Problem {
                density: spec.density,
                seed: spec.seed,
                inst: Arc::new(inst),
                enc: Some(Arc::new(enc)),
            })
        })
        .collect()
}

fn file_problems(cfg: &ExperimentConfig, path: &Path, need_encoding: bool) -> Result<Vec<Problem>> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let inst = parse_instance(&text).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
    let enc = match &cfg.encoding {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| HarnessError::io(p, e))?;
            let enc = parse_encoding(&text).map_err(|e| HarnessError::Config(format!("{}: {e}", p.display())))?;
            if enc.n() != inst.n() {
                return Err(HarnessError::Config(format!(
                    "encoding has {} spins, instance has {}",
                    enc.n(),
                    inst.n()
                )));
            }
            Some(Arc::new(enc))
        }
        None if need_encoding => Some(Arc::new(fit_rank2(&inst)?.encoding)),
        None => None,
    };
    let inst = Arc::new(inst);
    Ok(cfg
        .seeds()
        .into_iter()
        .map(|seed| Problem {
            density: inst.density(),
            seed,
            inst: inst.clone(),
            enc: enc.clone(),
        })
        .collect())
}

fn instance_stem(p: &Problem) -> String {
    format!("d{}-s{}", fmt_f64(p.density), p.seed)
}

fn write_instances(dir: &Path, problems: &[Problem], hash: &str) -> Result<Vec<Vec<String>>> {
    problems
        .par_iter()
        .map(|p| {
            let stem = instance_stem(p);
            let mut files = Vec::new();
            if let Some(enc) = &p.enc {
                let name = format!("{stem}.encoding.json");
                write_atomic(&dir.join(INSTANCES_DIR).join(&name), serialize_encoding(enc).as_bytes())?;
                files.push(name);
            }
            if !p.inst.is_low_rank() || p.inst.n() <= EDGE_LIST_LIMIT {
                let mut inst = (*p.inst).clone();
                inst.metadata_mut().insert("config_hash", hash);
                let name = format!("{stem}.txt");
                write_atomic(&dir.join(INSTANCES_DIR).join(&name), serialize_instance(&inst).as_bytes())?;
                files.push(name);
            }
            Ok(vec![
                p.inst.n().to_string(),
                fmt_f64(p.density),
                p.seed.to_string(),
                p.inst.nonzero_pairs().to_string(),
                fmt_f64(p.inst.total_weight()),
                files.join(" "),
            ])
        })
        .collect()
}

fn run_generate(cfg: &ExperimentConfig, out: &mut RunOutcome) -> Result<()> {
    let problems = generated_problems(cfg, &[cfg.density])?;
    let rows = write_instances(&out.dir, &problems, &out.config_hash)?;
    write_csv(
        &out.dir.join(GENERATED_CSV),
        &["n", "density", "seed", "nonzero_pairs", "total_weight", "files"],
        &rows,
    )?;
    out.lines.push(format!(
        "generated {} instance(s) with n = {} in {}",
        problems.len(),
        cfg.n,
        out.dir.display()
    ));
    Ok(())
}

fn solve_cell(cfg: &ExperimentConfig, p: &Problem, cell: &Cell, layout: Option<&MacropixelLayout>) -> Result<(CutReport, Option<AnnealTrace>)> {
    let inst = &p.inst;
    Ok(match cell.solver {
        Solver::EulerSim => {
            let enc = p.enc.as_ref().expect("encoding prepared for euler-sim");
            let layout = layout.expect("layout prepared for euler-sim");
            let params = cfg.anneal_params(p.seed, cell.noise_level)?;
            let (report, trace) = anneal(inst, enc, layout, &params)?;
            (report, Some(trace))
        }
        Solver::Sg if cfg.sg_starts == 1 => (sahni_gonzalez(inst, None)?, None),
        Solver::Sg => (sahni_gonzalez_multistart(inst, cfg.sg_starts, p.seed)?, None),
        Solver::Brute => (brute_force_maxcut(inst)?, None),
        Solver::Random => (random_cut(inst, cfg.random_samples, p.seed)?, None),
    })
}

fn run_cells(cfg: &ExperimentConfig, out: &mut RunOutcome) -> Result<()> {
    let (densities, mut solvers, levels, by, reference) = match cfg.task {
        Task::Solve => (vec![cfg.density], vec![cfg.solver], vec![cfg.noise_level], GroupBy::Density, Reference::None),
        Task::Bench => (
            vec![cfg.density],
            cfg.solvers.clone(),
            vec![cfg.noise_level],
            GroupBy::Density,
            Reference::Solver(cfg.reference.as_str().into()),
        ),
        Task::SweepDensity => (
            cfg.densities.clone(),
            cfg.solvers.clone(),
            vec![cfg.noise_level],
            GroupBy::Density,
            Reference::Solver(cfg.reference.as_str().into()),
        ),
        Task::SweepNoise => (vec![cfg.density], vec![Solver::EulerSim], cfg.sweep_levels(), GroupBy::NoiseLevel, Reference::ZeroGroup),
        Task::Generate | Task::Verify => unreachable!("not a cell task"),
    };
    if cfg.check_optimum && !solvers.contains(&Solver::Brute) {
        solvers.push(Solver::Brute);
    }
    let reference = match reference {
        Reference::Solver(s) if !solvers.iter().any(|x| x.as_str() == s) => Reference::None,
        r => r,
    };
    let needs_encoding = solvers.contains(&Solver::EulerSim);

    let problems = match &cfg.instance {
        Some(path) => file_problems(cfg, path, needs_encoding)?,
        None => generated_problems(cfg, &densities)?,
    };
    if cfg.check_optimum && problems[0].inst.n() > eulersim::baselines::BRUTE_FORCE_LIMIT {
        return Err(HarnessError::Config(format!(
            "check_optimum needs n <= {}, the instance has {}",
            eulersim::baselines::BRUTE_FORCE_LIMIT,
            problems[0].inst.n()
        )));
    }
    if cfg.instance.is_none() {
        write_instances(&out.dir, &problems, &out.config_hash)?;
    }
    let layout = if needs_encoding {
        Some(build_layout(problems[0].inst.n(), &cfg.geometry())?)
    } else {
        None
    };

    let mut cells = Vec::new();
    for (i, _) in problems.iter().enumerate() {
        for &solver in &solvers {
            if solver == Solver::EulerSim {
                for &noise_level in &levels {
                    cells.push(Cell { problem: i, solver, noise_level });
                }
            } else {
                cells.push(Cell { problem: i, solver, noise_level: 0.0 });
            }
        }
    }

    let hash = out.config_hash.clone();
    let records: Vec<CellRecord> = cells
        .par_iter()
        .map(|cell| {
            let p = &problems[cell.problem];
            let (report, trace) = solve_cell(cfg, p, cell, layout.as_ref())?;
            let record = CellRecord {
                config_hash: hash.clone(),
                solver: report.solver,
                n: p.inst.n(),
                density: p.density,
                sign: problem_sign(cfg, p),
                noise_level: cell.noise_level,
                seed: p.seed,
                best_cut: report.cut_value,
                hamiltonian: report.hamiltonian,
                iterations: report.iterations,
                wall_time_s: report.wall_time_s,
                config: report.config,
                trace: if cfg.write_traces { trace } else { None },
            };
            write_json(&out.dir.join(CELLS_DIR).join(record.file_name()), &record)?;
            Ok(record)
        })
        .collect::<Result<_>>()?;

    // rows ordered by group, then solver, then seed
    let mut order: Vec<usize> = (0..records.len()).collect();
    order.sort_by_key(|&i| (group_rank(by, &records[i], &densities, &levels), solver_rank(&records[i], &solvers), i));
    let records: Vec<CellRecord> = order.into_iter().map(|i| records[i].clone()).collect();

    let rows: Vec<Vec<String>> = records.iter().map(CellRecord::csv_row).collect();
    write_csv(&out.dir.join(RESULTS_CSV), &RESULT_COLUMNS, &rows)?;

    let summary = summarize(&records, by, &reference);
    let mut header = vec![by.column()];
    header.extend(SUMMARY_TAIL);
    write_csv(
        &out.dir.join(SUMMARY_CSV),
        &header,
        &summary.iter().map(SummaryRow::csv_row).collect::<Vec<_>>(),
    )?;
    for row in &summary {
        out.lines.push(summary_line(by, row));
    }
    if cfg.check_optimum {
        check_optimum(&records, out)?;
    }
    out.lines.push(format!("wrote {} cell(s) to {}", records.len(), out.dir.display()));
    out.records = records;
    out.summary = summary;
    Ok(())
}

fn problem_sign(cfg: &ExperimentConfig, p: &Problem) -> i64 {
    match (&cfg.instance, &p.enc) {
        (None, _) => cfg.sign.as_i64(),
        (Some(_), Some(enc)) => enc.sign().as_i64(),
        (Some(_), None) => 0,
    }
}

fn group_rank(by: GroupBy, r: &CellRecord, densities: &[f64], levels: &[f64]) -> usize {
    let list = match by {
        GroupBy::Density => densities,
        GroupBy::NoiseLevel => levels,
    };
    list.iter().position(|&g| g == by.key(r)).unwrap_or(0)
}

fn solver_rank(r: &CellRecord, solvers: &[Solver]) -> usize {
    solvers.iter().position(|s| s.as_str() == r.solver).unwrap_or(solvers.len())
}

fn summary_line(by: GroupBy, row: &SummaryRow) -> String {
    let mut line = format!(
        "{} {:<6} {:<9} seeds {:>3}  mean cut {:.6e}  [{:.6e}, {:.6e}]  mean wall {:.3e} s",
        by.column(),
        fmt_f64(row.group),
        row.solver,
        row.seeds,
        row.mean_cut,
        row.min_cut,
        row.max_cut,
        row.mean_wall_time_s
    );
    if let (Some(pct), Some(lo), Some(hi)) = (row.improvement_pct, row.pct_ci_low, row.pct_ci_high) {
        line.push_str(&format!(
            "  vs {}: {:+.3}% (per-seed {:.0}% CI [{:+.3}, {:+.3}]) w/t/l {}/{}/{}",
            row.reference,
            pct,
            CI_LEVEL * 100.0,
            lo,
            hi,
            row.wins,
            row.ties,
            row.losses
        ));
    }
    line
}

fn check_optimum(records: &[CellRecord], out: &mut RunOutcome) -> Result<()> {
    let brute = Solver::Brute.as_str();
    let mut rows = Vec::new();
    for r in records.iter().filter(|r| r.solver != brute) {
        let opt = records
            .iter()
            .find(|b| b.solver == brute && b.seed == r.seed && b.density == r.density)
            .ok_or_else(|| HarnessError::Runtime("missing brute-force reference".into()))?;
        let matched = same_cut(r.best_cut, opt.best_cut);
        let status = if matched { "match" } else { "miss" };
        out.lines.push(format!(
            "optimum {status}: {} seed {} noise {} cut {} vs optimum {}",
            r.solver,
            r.seed,
            fmt_f64(r.noise_level),
            fmt_f64(r.best_cut),
            fmt_f64(opt.best_cut)
        ));
        rows.push(vec![
            r.solver.clone(),
            fmt_f64(r.density),
            fmt_f64(r.noise_level),
            r.seed.to_string(),
            fmt_f64(r.best_cut),
            fmt_f64(opt.best_cut),
            fmt_f64(opt.best_cut - r.best_cut),
            status.to_string(),
        ]);
    }
    write_csv(
        &out.dir.join(OPTIMUM_CSV),
        &["solver", "density", "noise_level", "seed", "best_cut", "optimum_cut", "gap", "status"],
        &rows,
    )
}

fn run_verify(cfg: &ExperimentConfig, out: &mut RunOutcome) -> Result<()> {
    let results = verify::run_suites(cfg.verify_cases, cfg.seed)?;
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|r| {
            vec![
                r.suite.to_string(),
                r.cases.to_string(),
                fmt_f64(r.max_error),
                fmt_f64(r.tolerance),
                r.passed().to_string(),
            ]
        })
        .collect();
    write_csv(&out.dir.join(VERIFY_CSV), &["suite", "cases", "max_error", "tolerance", "passed"], &rows)?;
    for r in &results {
        out.passed &= r.passed();
        out.lines.push(format!(
            "{} {:<20} cases {:>5}  max error {:.3e}  tolerance {:.0e}",
            if r.passed() { "PASS" } else { "FAIL" },
            r.suite,
            r.cases,
            r.max_error,
            r.tolerance
        ));
    }
    Ok(())
}
