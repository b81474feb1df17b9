//! Randomized invariant suites run by the `verify` task.

use eulersim::baselines::{brute_force_maxcut, sahni_gonzalez};
use eulersim::graph::{fit_rank2, generate, target_pairs, Family, GeneratorSpec, MaxCutInstance, Rank2Encoding, Sign, SpinConfig};
use eulersim::optics::{
    build_layout, dc_readout, field_readout, incoherent_sums, synthesize_mask, OpticalGeometry, Propagator,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteResult {
    pub suite: &'static str,
    pub cases: usize,
    pub max_error: f64,
    pub tolerance: f64,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.max_error <= self.tolerance
    }
}

type CaseFn = fn(&mut ChaCha8Rng) -> Result<f64>;

const SUITES: [(&str, f64, CaseFn); 6] = [
    ("cut_identity", 1e-12, cut_identity),
    ("dc_identity", 1e-9, dc_identity),
    ("optics_equivalence", 1e-9, optics_equivalence),
    ("parseval", 1e-9, parseval),
    ("sg_bound", 0.0, sg_bound),
    ("fit_in_family", 1e-9, fit_in_family),
];

/// Runs every suite with `cases` seeded cases; errors are relative.
pub fn run_suites(cases: usize, seed: u64) -> Result<Vec<SuiteResult>> {
    SUITES
        .iter()
        .enumerate()
        .map(|(k, &(suite, tolerance, case))| {
            let errors: Vec<f64> = (0..cases)
                .into_par_iter()
                .map(|i| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(((k as u64) << 32) | i as u64);
                    case(&mut rng)
                })
                .collect::<Result<_>>()?;
            Ok(SuiteResult {
                suite,
                cases,
                max_error: errors.into_iter().fold(0.0, f64::max),
                tolerance,
            })
        })
        .collect()
}

fn random_spec(rng: &mut ChaCha8Rng, n_max: usize) -> GeneratorSpec {
    GeneratorSpec {
        n: rng.random_range(2..=n_max),
        density: rng.random_range(0.3..=1.0),
        sign: if rng.random_bool(0.5) { Sign::Plus } else { Sign::Minus },
        seed: rng.random(),
        family: if rng.random_bool(0.5) { Family::Encodable } else { Family::Threshold },
    }
}

/// Instance and encoding whose density leaves at least one edge.
fn random_problem(rng: &mut ChaCha8Rng, n_max: usize) -> Result<(MaxCutInstance, Rank2Encoding)> {
    let mut spec = random_spec(rng, n_max);
    if target_pairs(spec.n, spec.density) == 0 {
        spec.density = 1.0;
    }
    Ok(generate(&spec)?)
}

fn cut_identity(rng: &mut ChaCha8Rng) -> Result<f64> {
    let (inst, _) = random_problem(rng, 64)?;
    let x = SpinConfig::random(inst.n(), rng);
    let want = 0.5 * (inst.total_weight() - inst.hamiltonian(&x)?);
    Ok((inst.cut_value(&x)? - want).abs() / inst.absolute_weight().max(1.0))
}

/// `I(0,0)` against `C - 2 H` with `H` summed pair by pair on the `+` branch.
fn dc_identity(rng: &mut ChaCha8Rng) -> Result<f64> {
    let (_, enc) = random_problem(rng, 256)?;
    let n = enc.n();
    let x = SpinConfig::random(n, rng);
    let y = enc.quadrature_spins(&x)?;
    let (eps, eta) = (enc.epsilon(), enc.eta());
    let mut h = 0.0;
    for l in 0..n {
        for k in l + 1..n {
            h -= eps[l] * eps[k] * x.value(l) * x.value(k) + eta[l] * eta[k] * y.value(l) * y.value(k);
        }
    }
    let (ce, ch) = incoherent_sums(&enc);
    let c = ce + ch;
    let i0 = dc_readout(&enc, &x)?.intensity();
    Ok((i0 - (c - 2.0 * h)).abs() / c.max(1.0))
}

fn small_layout_case(rng: &mut ChaCha8Rng) -> Result<(Rank2Encoding, SpinConfig, eulersim::optics::MacropixelLayout)> {
    let (_, enc) = random_problem(rng, 64)?;
    let x = SpinConfig::random(enc.n(), rng);
    let layout = build_layout(enc.n(), &OpticalGeometry::square(80))?;
    Ok((enc, x, layout))
}

fn optics_equivalence(rng: &mut ChaCha8Rng) -> Result<f64> {
    let (enc, x, layout) = small_layout_case(rng)?;
    let field = Propagator::for_layout(&layout).propagate(&synthesize_mask(&enc, &x, &layout)?)?;
    let got = field_readout(&field);
    let want = dc_readout(&enc, &x)?;
    let scale = want.intensity().max(1.0);
    Ok(((got.p_x - want.p_x).abs() + (got.p_y - want.p_y).abs()) / scale)
}

/// Unnormalized transform energy equals frame size times live samples.
fn parseval(rng: &mut ChaCha8Rng) -> Result<f64> {
    let (enc, x, layout) = small_layout_case(rng)?;
    let mask = synthesize_mask(&enc, &x, &layout)?;
    let field = Propagator::for_layout(&layout).propagate(&mask)?;
    let want = (field.rows() * field.cols() * mask.live_count()) as f64;
    Ok((field.energy() - want).abs() / want)
}

/// Positive when the greedy cut exceeds the optimum.
fn sg_bound(rng: &mut ChaCha8Rng) -> Result<f64> {
    let (inst, _) = random_problem(rng, 14)?;
    let sg = sahni_gonzalez(&inst, None)?.cut_value;
    let opt = brute_force_maxcut(&inst)?.cut_value;
    let slack = 1e-12 * inst.absolute_weight().max(1.0);
    Ok((sg - opt - slack).max(0.0))
}

fn fit_in_family(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut spec = random_spec(rng, 16);
    spec.n = spec.n.max(3);
    spec.density = 1.0;
    let (inst, _) = generate(&spec)?;
    let fit = fit_rank2(&inst)?;
    let norm = inst.to_dense().iter().map(|w| w * w).sum::<f64>().sqrt();
    Ok(fit.residual / norm.max(1e-300))
}
