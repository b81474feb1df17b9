//! Simulated-annealing feedback loop of the optical machine.
//!
//! Each iteration proposes a batch flip, evaluates the machine's cost for the
//! proposal (with fresh detector noise when enabled) and accepts it by the
//! Metropolis rule. The cost is ascended: the Max-cut optimum is the
//! configuration whose DC field is darkest, i.e. farthest from the bright
//! unmodulated focus. The reported configuration is the accepted state with
//! the largest true cut on the instance.

mod cost;
mod moves;
mod params;

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use moves::{metropolis_accept, propose_batch_flip};
pub use params::{AnnealParams, CostBackend, Objective, FULL_FIELD_LIMIT};

use crate::error::{check_len, Error, Result};
use crate::graph::{EnergyTracker, MaxCutInstance, Rank2Encoding, SpinConfig};
use crate::optics::{target_image, MacropixelLayout};
use crate::report::CutReport;
use cost::CostModel;

pub const SOLVER_ID: &str = "euler-sim";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: usize,
    /// Cost of the current state after the decision.
    pub cost: f64,
    pub proposal_cost: f64,
    /// True Hamiltonian and cut of the current state on the instance.
    pub hamiltonian: f64,
    pub cut_value: f64,
    pub best_cut: f64,
    pub temperature: f64,
    pub flip_fraction: f64,
    pub flips_proposed: usize,
    pub accepted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnealTrace {
    pub restart: usize,
    pub temperature_start: f64,
    pub initial_cut: f64,
    pub records: Vec<TraceRecord>,
    pub best_config: SpinConfig,
    pub best_cut: f64,
}

impl AnnealTrace {
    /// Running best cut, one entry per iteration.
    pub fn best_cut_curve(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.best_cut).collect()
    }
}

/// Move and noise streams of one restart.
fn restart_streams(params: &AnnealParams, restart: usize) -> (ChaCha8Rng, ChaCha8Rng) {
    let mut moves = ChaCha8Rng::seed_from_u64(params.seed);
    moves.set_stream(restart as u64);
    let mut noise = ChaCha8Rng::seed_from_u64(params.noise.seed);
    noise.set_stream(restart as u64);
    (moves, noise)
}

fn check_inputs(inst: &MaxCutInstance, enc: &Rank2Encoding, layout: &MacropixelLayout, params: &AnnealParams) -> Result<()> {
    check_len(inst.n(), enc.n())?;
    check_len(inst.n(), layout.n())?;
    params.validate(inst.n())
}

fn needs_target(params: &AnnealParams) -> bool {
    params.objective == Objective::ImageDistance
}

/// Runs one restart. Independent of every other restart.
pub fn anneal_restart(
    inst: &MaxCutInstance,
    enc: &Rank2Encoding,
    layout: &MacropixelLayout,
    params: &AnnealParams,
    restart: usize,
) -> Result<AnnealTrace> {
    check_inputs(inst, enc, layout, params)?;
    let target = needs_target(params).then(|| target_image(layout));
    run_restart(inst, enc, layout, params, target.as_ref(), restart)
}

fn run_restart(
    inst: &MaxCutInstance,
    enc: &Rank2Encoding,
    layout: &MacropixelLayout,
    params: &AnnealParams,
    target: Option<&crate::optics::IntensityImage>,
    restart: usize,
) -> Result<AnnealTrace> {
    let n = inst.n();
    let (mut rng, mut noise_rng) = restart_streams(params, restart);
    let mut model = CostModel::new(enc, layout, params, target)?;

    let mut x = SpinConfig::random(n, &mut rng);
    let mut sums = model.sums(&x);
    let mut cost = model.evaluate(&x, sums, &mut noise_rng)?;
    let mut energy = EnergyTracker::new(inst, &x)?;

    let temperature_start = match params.temperature_start {
        Some(t) => t,
        None => {
            let p0 = params.initial_flip_fraction;
            let mut samples = Vec::with_capacity(params.warmup_proposals);
            for _ in 0..params.warmup_proposals {
                let flips = moves::draw_flips(n, p0, &mut rng);
                let mut y = x.clone();
                y.flip_all(&flips);
                let s = model.shifted(sums, &y, &flips);
                samples.push(model.evaluate(&y, s, &mut noise_rng)?);
            }
            let mean = samples.iter().sum::<f64>() / samples.len() as f64;
            let var = samples.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / (samples.len() - 1) as f64;
            let sd = var.sqrt();
            if sd.is_finite() && sd > 0.0 {
                sd
            } else {
                f64::MIN_POSITIVE
            }
        }
    };

    let initial_cut = energy.cut_value();
    let mut best_cut = initial_cut;
    let mut best_config = x.clone();
    let mut records = Vec::with_capacity(params.iterations);
    let mut temperature = temperature_start;

    for t in 0..params.iterations {
        let p = params.flip_fraction(n, t);
        let flips = moves::draw_flips(n, p, &mut rng);
        let mut y = x.clone();
        y.flip_all(&flips);
        let s = model.shifted(sums, &y, &flips);
        let proposal_cost = model.evaluate(&y, s, &mut noise_rng)?;
        // the cost is ascended
        let accepted = metropolis_accept(cost - proposal_cost, temperature, &mut rng);
        if accepted {
            energy.commit(&y, &flips);
            x = y;
            sums = s;
            cost = proposal_cost;
            let cut = energy.cut_value();
            if cut > best_cut {
                best_cut = cut;
                best_config = x.clone();
            }
        }
        records.push(TraceRecord {
            iteration: t,
            cost,
            proposal_cost,
            hamiltonian: energy.hamiltonian(),
            cut_value: energy.cut_value(),
            best_cut,
            temperature,
            flip_fraction: p,
            flips_proposed: flips.len(),
            accepted,
        });
        temperature *= params.cooling_rate;
    }

    // rescore exactly; the tracker accumulates rounding over many updates
    let best_cut = inst.cut_value(&best_config)?;
    Ok(AnnealTrace {
        restart,
        temperature_start,
        initial_cut,
        records,
        best_config,
        best_cut,
    })
}

/// Anneals `params.restarts` independent runs in parallel and reports the
/// best. Ties go to the lowest restart index. The returned trace is that of
/// the winning restart.
pub fn anneal(
    inst: &MaxCutInstance,
    enc: &Rank2Encoding,
    layout: &MacropixelLayout,
    params: &AnnealParams,
) -> Result<(CutReport, AnnealTrace)> {
    check_inputs(inst, enc, layout, params)?;
    let start = Instant::now();
    let target = needs_target(params).then(|| target_image(layout));
    let traces: Vec<AnnealTrace> = (0..params.restarts)
        .into_par_iter()
        .map(|r| run_restart(inst, enc, layout, params, target.as_ref(), r))
        .collect::<Result<_>>()?;
    let wall = start.elapsed().as_secs_f64();
    let best = traces
        .into_iter()
        .reduce(|a, b| if b.best_cut > a.best_cut { b } else { a })
        .ok_or_else(|| Error::params("no restarts"))?;
    let report = CutReport::score(
        SOLVER_ID,
        inst,
        best.best_config.clone(),
        wall,
        Some(params.seed),
        params.iterations as u64,
    )?;
    Ok((report, best))
}

/// One cost evaluation as the machine sees it, drawing noise from `params.noise.seed`.
pub fn cost_eval(
    enc: &Rank2Encoding,
    config: &SpinConfig,
    layout: &MacropixelLayout,
    params: &AnnealParams,
) -> Result<f64> {
    check_len(enc.n(), config.len())?;
    let target = needs_target(params).then(|| target_image(layout));
    let mut model = CostModel::new(enc, layout, params, target.as_ref())?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.noise.seed);
    let sums = model.sums(config);
    model.evaluate(config, sums, &mut rng)
}
