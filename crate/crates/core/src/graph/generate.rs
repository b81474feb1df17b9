//! Seeded generation of rank-2 Max-cut instances at a prescribed density.
//!
//! Phases `alpha` and `beta` are drawn i.i.d. uniform on `[0, pi]`. Two ways of
//! reaching a target density are offered:
//!
//! * [`Family::Encodable`] silences selected amplitudes so the zero pattern is
//!   produced by the encoding itself. The scored instance is then exactly the
//!   instance the optical machine realizes.
//! * [`Family::Threshold`] computes the dense rank-2 weights and zeroes the
//!   smallest-magnitude pairs. The returned encoding is the dense parent; the
//!   sparsified instance is in general not rank-2.
//!
//! Both hit exactly `floor(density * n(n-1)/2)` nonzero pairs and coincide at
//! density 1.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::encoding::{Rank2Encoding, Sign};
use super::instance::MaxCutInstance;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    #[default]
    Encodable,
    Threshold,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Encodable => "encodable",
            Family::Threshold => "threshold",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "encodable" => Ok(Family::Encodable),
            "threshold" => Ok(Family::Threshold),
            other => Err(Error::input(format!("unknown instance family {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub n: usize,
    pub density: f64,
    pub sign: Sign,
    pub seed: u64,
    #[serde(default)]
    pub family: Family,
}

/// Number of nonzero pairs requested for `density`.
pub fn target_pairs(n: usize, density: f64) -> usize {
    let pairs = n * n.saturating_sub(1) / 2;
    if density >= 1.0 {
        pairs
    } else {
        ((density * pairs as f64).floor() as usize).min(pairs)
    }
}

/// Generates with the default [`Family::Encodable`] zero pattern.
pub fn generate_instance(
    n: usize,
    density: f64,
    sign: Sign,
    seed: u64,
) -> Result<(MaxCutInstance, Rank2Encoding)> {
    generate(&GeneratorSpec {
        n,
        density,
        sign,
        seed,
        family: Family::Encodable,
    })
}

pub fn generate(spec: &GeneratorSpec) -> Result<(MaxCutInstance, Rank2Encoding)> {
    let GeneratorSpec {
        n,
        density,
        sign,
        seed,
        family,
    } = *spec;
    if n < 2 {
        return Err(Error::params(format!("need n >= 2, got {n}")));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::params(format!("density must lie in (0, 1], got {density}")));
    }
    let keep = target_pairs(n, density);
    if keep == 0 {
        return Err(Error::params(format!(
            "density {density} leaves no edges for n = {n}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut alpha: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..=PI)).collect();
    let mut beta: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..=PI)).collect();

    let (inst, enc) = match family {
        Family::Threshold => {
            let enc = Rank2Encoding::with_identity(alpha, beta, sign)?;
            let parent = MaxCutInstance::from_encoding(&enc);
            let inst = if keep == parent.pair_count() {
                parent
            } else {
                sparsify(&parent, keep)?
            };
            (inst, enc)
        }
        Family::Encodable => {
            let pattern = ZeroPattern::solve(n, parent_zero_count(n, keep))?;
            let mut order: Vec<usize> = (0..n).collect();
            if !pattern.is_trivial() {
                order.shuffle(&mut rng);
            }
            let (dark, rest) = order.split_at(pattern.dark);
            let (only_primary, rest) = rest.split_at(pattern.primary_only);
            let (only_quadrature, _) = rest.split_at(pattern.quadrature_only);
            for &l in dark {
                alpha[l] = FRAC_PI_2;
                beta[l] = FRAC_PI_2;
            }
            for &l in only_primary {
                beta[l] = FRAC_PI_2;
            }
            for &l in only_quadrature {
                alpha[l] = FRAC_PI_2;
            }
            let enc = Rank2Encoding::with_identity(alpha, beta, sign)?;
            (MaxCutInstance::from_encoding(&enc), enc)
        }
    };

    let mut inst = inst;
    let meta = inst.metadata_mut();
    meta.insert("family", family.as_str());
    meta.insert("n", n);
    meta.insert("density", density);
    meta.insert("sign", sign);
    meta.insert("seed", seed);
    Ok((inst, enc))
}

fn parent_zero_count(n: usize, keep: usize) -> usize {
    n * (n - 1) / 2 - keep
}

/// Keeps the `keep` largest-magnitude pairs; ties broken by pair order.
fn sparsify(parent: &MaxCutInstance, keep: usize) -> Result<MaxCutInstance> {
    let mut edges: Vec<_> = parent.edges().collect();
    if edges.len() > keep {
        edges.select_nth_unstable_by(keep, |a, b| {
            b.w.abs()
                .total_cmp(&a.w.abs())
                .then((a.l, a.k).cmp(&(b.l, b.k)))
        });
        edges.truncate(keep);
    }
    MaxCutInstance::from_edges(parent.n(), edges.into_iter().map(|e| (e.l, e.k, e.w)))
}

/// Amplitude silencing that produces an exact number of zero pairs.
///
/// `dark` spins have both amplitudes zero and decouple from everything;
/// `primary_only` spins (no quadrature amplitude) decouple from
/// `quadrature_only` spins (no primary amplitude). All other pairs are
/// nonzero with probability one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct ZeroPattern {
    pub dark: usize,
    pub primary_only: usize,
    pub quadrature_only: usize,
}

impl ZeroPattern {
    #[cfg(test)]
    pub(crate) fn zero_pairs(&self, n: usize) -> usize {
        let d = self.dark;
        d * (n - d) + d * d.saturating_sub(1) / 2 + self.primary_only * self.quadrature_only
    }

    fn is_trivial(&self) -> bool {
        self.dark == 0 && self.primary_only == 0 && self.quadrature_only == 0
    }

    /// Fewest dark spins first, then the most balanced primary/quadrature split.
    pub(crate) fn solve(n: usize, zeros: usize) -> Result<Self> {
        let dark_zeros = |d: usize| d * (n - d) + d * d.saturating_sub(1) / 2;
        for dark in 0..n {
            if dark_zeros(dark) > zeros {
                break;
            }
            let rest = zeros - dark_zeros(dark);
            let free = n - dark;
            if rest == 0 {
                return Ok(ZeroPattern {
                    dark,
                    primary_only: 0,
                    quadrature_only: 0,
                });
            }
            let mut a = (rest as f64).sqrt() as usize + 1;
            while a > 0 {
                if a * a <= rest && rest % a == 0 && a + rest / a <= free {
                    return Ok(ZeroPattern {
                        dark,
                        primary_only: a,
                        quadrature_only: rest / a,
                    });
                }
                a -= 1;
            }
        }
        Err(Error::params(format!(
            "cannot place {zeros} zero pairs on {n} vertices"
        )))
    }
}
