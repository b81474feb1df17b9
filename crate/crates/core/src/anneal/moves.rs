use rand::Rng;

use crate::graph::SpinConfig;

/// Indices flipped by one batch proposal: each spin independently with
/// probability `p`, and one uniform spin if none was chosen.
pub(crate) fn draw_flips<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Vec<usize> {
    let mut flips: Vec<usize> = (0..n).filter(|_| rng.random::<f64>() < p).collect();
    if flips.is_empty() {
        flips.push(rng.random_range(0..n));
    }
    flips
}

/// Copy of `config` after a batch flip proposal.
pub fn propose_batch_flip<R: Rng + ?Sized>(config: &SpinConfig, flip_fraction: f64, rng: &mut R) -> SpinConfig {
    let mut out = config.clone();
    out.flip_all(&draw_flips(config.len(), flip_fraction, rng));
    out
}

/// Metropolis rule for a cost to be minimized.
pub fn metropolis_accept<R: Rng + ?Sized>(delta_cost: f64, temperature: f64, rng: &mut R) -> bool {
    debug_assert!(temperature > 0.0);
    if delta_cost <= 0.0 {
        return true;
    }
    rng.random::<f64>() < (-delta_cost / temperature).exp()
}
