//! Reference solvers: Sahni-Gonzalez greedy, exhaustive search, random cuts.

use std::cmp::Ordering;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Couplings, MaxCutInstance, SpinConfig};
use crate::report::CutReport;

/// Largest instance accepted by [`brute_force_maxcut`].
pub const BRUTE_FORCE_LIMIT: usize = 24;

pub const SG_ID: &str = "sg";
pub const BRUTE_ID: &str = "brute";
pub const RANDOM_ID: &str = "random";

fn check_order(n: usize, order: &[usize]) -> Result<()> {
    if order.len() != n {
        return Err(Error::input(format!("order has {} entries, expected {n}", order.len())));
    }
    let mut seen = vec![false; n];
    for &v in order {
        if v >= n || std::mem::replace(&mut seen[v], true) {
            return Err(Error::input("vertex order is not a permutation"));
        }
    }
    Ok(())
}

/// Greedy placement in `order`; returns the configuration.
fn sg_config(inst: &MaxCutInstance, order: &[usize]) -> SpinConfig {
    let n = inst.n();
    let mut x = vec![0i8; n];
    let mut sizes = [0usize; 2];
    let (mut pu, mut pv) = (0.0, 0.0);
    for &v in order {
        // field from placed vertices: sum_k w[v][k] x[k]; unplaced x[k] = 0
        let h = match inst.couplings() {
            Couplings::Sparse(sp) => sp.neighbors(v).iter().map(|&(k, w)| w * f64::from(x[k])).sum::<f64>(),
            Couplings::LowRank(lr) => lr.u[v] * pu + lr.s * lr.v[v] * pv,
        };
        // joining side A (+1) cuts the placed B-side weight (T - h) / 2,
        // side B cuts (T + h) / 2
        let side_a = match h.partial_cmp(&0.0).unwrap_or(Ordering::Equal) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => sizes[0] <= sizes[1],
        };
        let s: i8 = if side_a { 1 } else { -1 };
        x[v] = s;
        sizes[usize::from(!side_a)] += 1;
        if let Couplings::LowRank(lr) = inst.couplings() {
            pu += lr.u[v] * f64::from(s);
            pv += lr.v[v] * f64::from(s);
        }
    }
    SpinConfig::new(x).expect("every vertex placed")
}

/// Single-pass Sahni-Gonzalez greedy in the given order (natural order if `None`).
///
/// Each vertex joins the side maximizing the weight it cuts to already placed
/// vertices; ties go to the smaller side, then to side A (`+1`).
pub fn sahni_gonzalez(inst: &MaxCutInstance, order: Option<&[usize]>) -> Result<CutReport> {
    let start = Instant::now();
    let natural: Vec<usize>;
    let order = match order {
        Some(o) => {
            check_order(inst.n(), o)?;
            o
        }
        None => {
            natural = (0..inst.n()).collect();
            &natural
        }
    };
    let x = sg_config(inst, order);
    let wall = start.elapsed().as_secs_f64();
    CutReport::score(SG_ID, inst, x, wall, None, 1)
}

/// Best of `starts` greedy passes: the natural order, then seeded random orders.
pub fn sahni_gonzalez_multistart(inst: &MaxCutInstance, starts: usize, seed: u64) -> Result<CutReport> {
    if starts == 0 {
        return Err(Error::params("multistart needs at least one start"));
    }
    let start = Instant::now();
    let n = inst.n();
    let orders: Vec<Vec<usize>> = (0..starts)
        .map(|i| {
            let mut order: Vec<usize> = (0..n).collect();
            if i > 0 {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                order.shuffle(&mut rng);
            }
            order
        })
        .collect();
    let scored: Vec<(f64, SpinConfig)> = orders
        .par_iter()
        .map(|o| {
            let x = sg_config(inst, o);
            (inst.cut_value(&x).expect("sized config"), x)
        })
        .collect();
    let best = scored
        .into_iter()
        .reduce(|a, b| if b.0 > a.0 { b } else { a })
        .expect("at least one start");
    let wall = start.elapsed().as_secs_f64();
    CutReport::score(SG_ID, inst, best.1, wall, Some(seed), starts as u64)
}

/// True if config `a` precedes `b` with `+1` ordered before `-1` from spin 0.
fn lex_less(a: u64, b: u64) -> bool {
    let d = a ^ b;
    d != 0 && (a >> d.trailing_zeros()) & 1 == 0
}

/// Exact maximum cut by Gray-code enumeration with `x[0] = +1` fixed.
///
/// Returns the lexicographically smallest optimum (`+1` before `-1`).
pub fn brute_force_maxcut(inst: &MaxCutInstance) -> Result<CutReport> {
    let n = inst.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            solver: "brute_force_maxcut",
            n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let start = Instant::now();
    let w = inst.to_dense();
    let tol = 1e-12 * inst.absolute_weight().max(1.0);

    // all spins +1: h[l] = sum_k w[l][k]
    let mut h: Vec<f64> = (0..n).map(|l| w[l * n..(l + 1) * n].iter().sum()).collect();
    let mut energy: f64 = h.iter().sum::<f64>() / 2.0;
    let mut bits: u64 = 0;
    let mut best = (energy, bits);
    let free = n - 1;
    let total: u64 = 1 << free;
    for step in 1..total {
        let j = 1 + step.trailing_zeros() as usize;
        let xj = if (bits >> j) & 1 == 1 { -1.0 } else { 1.0 };
        energy -= 2.0 * xj * h[j];
        for (k, hk) in h.iter_mut().enumerate() {
            *hk -= 2.0 * w[k * n + j] * xj;
        }
        bits ^= 1 << j;
        if energy < best.0 - tol || (energy <= best.0 + tol && lex_less(bits, best.1)) {
            best = (energy.min(best.0), bits);
        }
    }
    let x = SpinConfig::from_bits(n, best.1);
    let wall = start.elapsed().as_secs_f64();
    CutReport::score(BRUTE_ID, inst, x, wall, None, total)
}

/// Best of `samples` uniformly random configurations.
pub fn random_cut(inst: &MaxCutInstance, samples: usize, seed: u64) -> Result<CutReport> {
    if samples == 0 {
        return Err(Error::params("random_cut needs at least one sample"));
    }
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, SpinConfig)> = None;
    for _ in 0..samples {
        let x = SpinConfig::random(inst.n(), &mut rng);
        let c = inst.cut_value(&x)?;
        if best.as_ref().is_none_or(|(b, _)| c > *b) {
            best = Some((c, x));
        }
    }
    let wall = start.elapsed().as_secs_f64();
    CutReport::score(RANDOM_ID, inst, best.expect("one sample").1, wall, Some(seed), samples as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(n: usize) -> MaxCutInstance {
        MaxCutInstance::from_fn(n, |_, _| 1.0).unwrap()
    }

    #[test]
    fn sg_small_graphs() {
        assert_eq!(sahni_gonzalez(&k(4), None).unwrap().cut_value, 4.0);
        let path = MaxCutInstance::from_edges(6, (0..5).map(|i| (i, i + 1, 1.0))).unwrap();
        assert_eq!(sahni_gonzalez(&path, None).unwrap().cut_value, 5.0);
    }

    #[test]
    fn sg_rejects_bad_order() {
        assert!(sahni_gonzalez(&k(3), Some(&[0, 0, 1])).is_err());
        assert!(sahni_gonzalez(&k(3), Some(&[0, 1])).is_err());
    }

    #[test]
    fn brute_small_graphs() {
        let two = MaxCutInstance::from_edges(2, vec![(0, 1, 1.0)]).unwrap();
        assert_eq!(brute_force_maxcut(&two).unwrap().cut_value, 1.0);
        let r = brute_force_maxcut(&k(4)).unwrap();
        assert_eq!(r.cut_value, 4.0);
        // smallest optimum with x0 = +1 fixed: (+, +, -, -)
        assert_eq!(r.config.as_slice(), &[1, 1, -1, -1]);
        assert!(brute_force_maxcut(&k(25)).is_err());
    }

    #[test]
    fn lexicographic_order() {
        assert!(lex_less(0b0100, 0b0010));
        assert!(!lex_less(0b0010, 0b0100));
        assert!(!lex_less(5, 5));
    }

    #[test]
    fn random_cut_is_seeded() {
        let g = k(6);
        assert_eq!(random_cut(&g, 5, 1).unwrap().config, random_cut(&g, 5, 1).unwrap().config);
        assert!(random_cut(&g, 0, 1).is_err());
    }
}
