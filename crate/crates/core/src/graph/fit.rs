//! Fitting a rank-2 encoding to an arbitrary weighted graph.
//!
//! A graph only prescribes the off-diagonal weights, while the encoded matrix
//! `u u^T + s v v^T` also carries a diagonal. The fit therefore searches over
//! diagonals `D` as well: it alternates between taking the best two-term
//! signed spectral truncation of `W + D` and resetting `D` to the diagonal of
//! that truncation, polishes the amplitudes with Levenberg-Marquardt on the
//! off-diagonal residual for moderate `n`, and finally re-projects, so the
//! returned encoding is exactly the two-term truncation of `W + D` for the
//! reported `D`. With `D = 0` the first iterate is the plain truncation of `W`,
//! and the result is never worse than it.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::encoding::{Rank2Encoding, Sign};
use super::instance::MaxCutInstance;
use crate::error::{Error, Result};

/// Largest `n` accepted; the fit works on a dense `n x n` matrix.
pub const MAX_FIT_VERTICES: usize = 4096;

/// Largest `n` for which the Levenberg-Marquardt polish runs.
const POLISH_LIMIT: usize = 128;

/// Largest `n` for which the polish is also restarted from random points.
const MULTISTART_LIMIT: usize = 32;

const EXTRA_STARTS: usize = 8;

#[derive(Clone, Debug)]
pub struct Rank2Fit {
    pub encoding: Rank2Encoding,
    /// Frobenius norm of the off-diagonal difference between the instance
    /// weights and the fitted weights, in the instance's units.
    pub residual: f64,
    /// Factor applied to the amplitudes to bring them into `[-1, 1]`; the
    /// encoded weights equal the fitted weights times `scale^2`.
    pub scale: f64,
    /// Diagonal `D` whose two-term truncation of `W + D` is the fit.
    pub diagonal: Vec<f64>,
}

/// Amplitudes of a two-term truncation on one sign branch.
#[derive(Clone, Debug)]
struct Factors {
    u: DVector<f64>,
    v: DVector<f64>,
    s: f64,
}

impl Factors {
    fn entry(&self, l: usize, k: usize) -> f64 {
        self.u[l] * self.u[k] + self.s * self.v[l] * self.v[k]
    }

    fn diagonal(&self) -> DVector<f64> {
        DVector::from_fn(self.u.len(), |l, _| self.entry(l, l))
    }

    fn residual(&self, w: &DMatrix<f64>) -> f64 {
        offdiag_residual(w, |l, k| self.entry(l, k))
    }
}

fn offdiag_residual(w: &DMatrix<f64>, fitted: impl Fn(usize, usize) -> f64) -> f64 {
    let n = w.nrows();
    let mut acc = 0.0;
    for l in 0..n {
        for k in l + 1..n {
            let d = w[(l, k)] - fitted(l, k);
            acc += d * d;
        }
    }
    (2.0 * acc).sqrt()
}

/// Best two-term truncation of symmetric `m` with the given sign branch.
///
/// `Plus` keeps the two largest eigenvalues, `Minus` the largest and the
/// smallest; eigenvalues on the wrong side of zero are clamped to zero.
fn truncate(m: &DMatrix<f64>, sign: Sign) -> Factors {
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let first = order[0];
    let second = match sign {
        Sign::Plus => order[1],
        Sign::Minus => order[order.len() - 1],
    };
    let l1 = eig.eigenvalues[first].max(0.0);
    let l2 = match sign {
        Sign::Plus => eig.eigenvalues[second].max(0.0),
        Sign::Minus => (-eig.eigenvalues[second]).max(0.0),
    };
    Factors {
        u: eig.eigenvectors.column(first) * l1.sqrt(),
        v: eig.eigenvectors.column(second) * l2.sqrt(),
        s: sign.value(),
    }
}

fn with_diagonal(w: &DMatrix<f64>, d: &DVector<f64>) -> DMatrix<f64> {
    let mut m = w.clone();
    m.set_diagonal(d);
    m
}

fn projection_budget(n: usize) -> usize {
    match n {
        0..=16 => 2000,
        17..=64 => 500,
        65..=256 => 150,
        _ => 40,
    }
}

/// Alternating projections between `{W + D}` and the branch's rank-2 set.
fn complete_diagonal(w: &DMatrix<f64>, sign: Sign) -> Factors {
    let mut d = DVector::zeros(w.nrows());
    let mut best: Option<(f64, Factors)> = None;
    let mut last = f64::INFINITY;
    for _ in 0..projection_budget(w.nrows()) {
        let f = truncate(&with_diagonal(w, &d), sign);
        let r = f.residual(w);
        d = f.diagonal();
        if best.as_ref().is_none_or(|(b, _)| r < *b) {
            best = Some((r, f));
        }
        if r < 1e-14 || (last - r).abs() <= 1e-15 * last.max(1.0) {
            break;
        }
        last = r;
    }
    best.expect("at least one projection").1
}

/// Levenberg-Marquardt on `sum_{l<k} (w - u_l u_k - s v_l v_k)^2`.
fn polish(w: &DMatrix<f64>, start: Factors) -> Factors {
    let n = w.nrows();
    let s = start.s;
    let mut p = DVector::from_iterator(2 * n, start.u.iter().chain(start.v.iter()).copied());
    let cost = |p: &DVector<f64>| -> f64 {
        let mut acc = 0.0;
        for l in 0..n {
            for k in l + 1..n {
                let r = w[(l, k)] - p[l] * p[k] - s * p[n + l] * p[n + k];
                acc += r * r;
            }
        }
        acc
    };
    let mut f = cost(&p);
    let mut mu = 1e-3;
    for _ in 0..300 {
        if f < 1e-30 {
            break;
        }
        let mut jtj = DMatrix::<f64>::zeros(2 * n, 2 * n);
        let mut jtr = DVector::<f64>::zeros(2 * n);
        for l in 0..n {
            for k in l + 1..n {
                let r = w[(l, k)] - p[l] * p[k] - s * p[n + l] * p[n + k];
                let idx = [l, k, n + l, n + k];
                let grad = [-p[k], -p[l], -s * p[n + k], -s * p[n + l]];
                for a in 0..4 {
                    jtr[idx[a]] += grad[a] * r;
                    for b in 0..4 {
                        jtj[(idx[a], idx[b])] += grad[a] * grad[b];
                    }
                }
            }
        }
        let mut improved = false;
        while mu < 1e12 {
            let mut a = jtj.clone();
            for i in 0..2 * n {
                a[(i, i)] += mu * (1.0 + jtj[(i, i)]);
            }
            let Some(chol) = a.cholesky() else {
                mu *= 4.0;
                continue;
            };
            let step = chol.solve(&(-&jtr));
            let trial = &p + &step;
            let ft = cost(&trial);
            if ft < f {
                let rel = (f - ft) / f;
                p = trial;
                f = ft;
                mu = (mu / 3.0).max(1e-15);
                improved = rel > 1e-14;
                break;
            }
            mu *= 4.0;
        }
        if !improved {
            break;
        }
    }
    Factors {
        u: p.rows(0, n).into_owned(),
        v: p.rows(n, n).into_owned(),
        s,
    }
}

/// Random factors on the scale of the off-diagonal entries.
fn random_start(w: &DMatrix<f64>, s: f64, rng: &mut ChaCha8Rng) -> Factors {
    let n = w.nrows();
    let rms = (w.norm_squared() / (n * n.saturating_sub(1)).max(1) as f64).sqrt();
    let normal = Normal::new(0.0, rms.sqrt().max(1e-3)).expect("finite deviation");
    Factors {
        u: DVector::from_fn(n, |_, _| normal.sample(rng)),
        v: DVector::from_fn(n, |_, _| normal.sample(rng)),
        s,
    }
}

fn fit_branch(w: &DMatrix<f64>, sign: Sign) -> (f64, Factors, DVector<f64>) {
    let n = w.nrows();
    let mut f = complete_diagonal(w, sign);
    if n <= POLISH_LIMIT && f.residual(w) > 1e-13 {
        f = polish(w, f);
        if n <= MULTISTART_LIMIT {
            // the off-diagonal objective has spurious stationary points
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            for _ in 0..EXTRA_STARTS {
                if f.residual(w) <= 1e-13 {
                    break;
                }
                let g = polish(w, random_start(w, sign.value(), &mut rng));
                if g.residual(w) < f.residual(w) {
                    f = g;
                }
            }
        }
    }
    let d = f.diagonal();
    let f = truncate(&with_diagonal(w, &d), sign);
    (f.residual(w), f, d)
}

/// Rank-2 encoding approximating the instance's off-diagonal weights.
pub fn fit_rank2(inst: &MaxCutInstance) -> Result<Rank2Fit> {
    let n = inst.n();
    if n < 2 {
        return Err(Error::input("fit needs at least two vertices"));
    }
    if n > MAX_FIT_VERTICES {
        return Err(Error::TooLarge {
            solver: "fit_rank2",
            n,
            limit: MAX_FIT_VERTICES,
        });
    }
    let w = DMatrix::from_row_slice(n, n, &inst.to_dense());
    let (rp, fp, dp) = fit_branch(&w, Sign::Plus);
    let (rm, fm, dm) = fit_branch(&w, Sign::Minus);
    let (residual, f, d, sign) = if rp <= rm {
        (rp, fp, dp, Sign::Plus)
    } else {
        (rm, fm, dm, Sign::Minus)
    };

    let peak = f.u.iter().chain(f.v.iter()).fold(0.0f64, |m, a| m.max(a.abs()));
    let scale = if peak > 1.0 { 1.0 / peak } else { 1.0 };
    let eps: Vec<f64> = f.u.iter().map(|a| a * scale).collect();
    let eta: Vec<f64> = f.v.iter().map(|a| a * scale).collect();
    let encoding = Rank2Encoding::from_amplitudes(&eps, &eta, sign)?;
    Ok(Rank2Fit {
        encoding,
        residual,
        scale,
        diagonal: d.iter().copied().collect(),
    })
}
