//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use eulersim::graph::{MaxCutInstance, Rank2Encoding, SpinConfig};
use eulersim::optics::Complex64;

/// Dense weight lookup with no shortcuts.
pub fn dense(inst: &MaxCutInstance) -> Vec<Vec<f64>> {
    let n = inst.n();
    let mut w = vec![vec![0.0; n]; n];
    for e in inst.edges() {
        w[e.l][e.k] = e.w;
        w[e.k][e.l] = e.w;
    }
    w
}

pub fn cut_loop(w: &[Vec<f64>], x: &[i8]) -> f64 {
    let mut acc = 0.0;
    for l in 0..w.len() {
        for k in l + 1..w.len() {
            if x[l] != x[k] {
                acc += w[l][k];
            }
        }
    }
    acc
}

pub fn hamiltonian_loop(w: &[Vec<f64>], x: &[i8]) -> f64 {
    let mut acc = 0.0;
    for l in 0..w.len() {
        for k in l + 1..w.len() {
            acc += w[l][k] * f64::from(x[l]) * f64::from(x[k]);
        }
    }
    acc
}

pub fn total_loop(w: &[Vec<f64>]) -> f64 {
    let mut acc = 0.0;
    for l in 0..w.len() {
        for k in l + 1..w.len() {
            acc += w[l][k];
        }
    }
    acc
}

/// Quadrature Hamiltonian by pair loop: `-sum_{l<k} (eps eps x x + s eta eta y y)`.
pub fn quadrature_loop(enc: &Rank2Encoding, x: &SpinConfig) -> f64 {
    let y = enc.quadrature_spins(x).unwrap();
    let (e, h, s) = (enc.epsilon(), enc.eta(), enc.sign().value());
    let mut acc = 0.0;
    for l in 0..enc.n() {
        for k in l + 1..enc.n() {
            acc += e[l] * e[k] * x.value(l) * x.value(k) + s * h[l] * h[k] * y.value(l) * y.value(k);
        }
    }
    -acc
}

/// Maximum cut by plain enumeration of every configuration.
pub fn max_cut_enumerate(w: &[Vec<f64>]) -> f64 {
    let n = w.len();
    let mut best = f64::NEG_INFINITY;
    for bits in 0u64..(1 << n) {
        let x: Vec<i8> = (0..n).map(|l| if bits >> l & 1 == 1 { -1 } else { 1 }).collect();
        best = best.max(cut_loop(w, &x));
    }
    best
}

/// Textbook 2D DFT with the zero frequency moved to `(rows/2, cols/2)`.
pub fn naive_centered_dft(rows: usize, cols: usize, a: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); rows * cols];
    for u in 0..rows {
        for v in 0..cols {
            let fu = u as f64 - (rows / 2) as f64;
            let fv = v as f64 - (cols / 2) as f64;
            let mut acc = Complex64::default();
            for r in 0..rows {
                for c in 0..cols {
                    let ph = -2.0 * std::f64::consts::PI * (fu * r as f64 / rows as f64 + fv * c as f64 / cols as f64);
                    acc += a[r * cols + c] * Complex64::from_polar(1.0, ph);
                }
            }
            out[u * cols + v] = acc;
        }
    }
    out
}

/// `|sum_{j<m} exp(-2 pi i k j / len)|^2`, the diffraction profile of `m`
/// contiguous unit samples in a frame of `len`.
pub fn dirichlet_sq(m: usize, len: usize, k: i64) -> f64 {
    let x = std::f64::consts::PI * k as f64 / len as f64;
    if (k as f64 / len as f64).fract() == 0.0 {
        return (m * m) as f64;
    }
    let r = (m as f64 * x).sin() / x.sin();
    r * r
}

/// Cyclic Jacobi eigenvalues and eigenvectors (columns) of a symmetric matrix.
pub fn jacobi_eigen(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut m = a.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| m[i][j] * m[i][j]).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    ((0..n).map(|i| m[i][i]).collect(), v)
}

/// Off-diagonal Frobenius residual (both triangles) of the best two-term
/// truncation of `m` on one sign branch, compared against `w`.
pub fn truncation_residual(w: &[Vec<f64>], m: &[Vec<f64>], plus: bool) -> f64 {
    let n = w.len();
    let (vals, vecs) = jacobi_eigen(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
    let (i, j) = (order[0], if plus { order[1] } else { order[n - 1] });
    let li = vals[i].max(0.0);
    let lj = if plus { vals[j].max(0.0) } else { vals[j].min(0.0) };
    let mut acc = 0.0;
    for l in 0..n {
        for k in 0..n {
            if l != k {
                let fit = li * vecs[l][i] * vecs[k][i] + lj * vecs[l][j] * vecs[k][j];
                acc += (w[l][k] - fit).powi(2);
            }
        }
    }
    acc.sqrt()
}

/// Mean and unbiased variance.
pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, v)
}
