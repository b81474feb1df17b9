use std::f64::consts::{FRAC_PI_2, PI, TAU};

use super::geometry::MacropixelLayout;
use crate::error::{check_len, Error, Result};
use crate::graph::{Rank2Encoding, SpinConfig};

/// Phase pattern over the transform frame at sub-block resolution.
///
/// Phases lie in `[0, 2pi)`. Dark samples transmit nothing.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseMask {
    rows: usize,
    cols: usize,
    phase: Vec<f64>,
    live: Vec<bool>,
}

fn wrap(phase: f64) -> f64 {
    let p = phase.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if p >= TAU {
        0.0
    } else {
        p
    }
}

impl PhaseMask {
    /// Mask from raw row-major phases and a liveness map; phases are wrapped.
    pub fn from_phases(rows: usize, cols: usize, phase: Vec<f64>, live: Vec<bool>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::input("mask needs positive dimensions"));
        }
        check_len(rows * cols, phase.len())?;
        check_len(rows * cols, live.len())?;
        if phase.iter().any(|p| !p.is_finite()) {
            return Err(Error::input("mask phases must be finite"));
        }
        Ok(PhaseMask {
            rows,
            cols,
            phase: phase.into_iter().map(wrap).collect(),
            live,
        })
    }

    /// All-live mask at zero phase over the whole layout grid.
    pub fn uniform(layout: &MacropixelLayout) -> Self {
        let (rows, cols) = layout.frame();
        let (ar, ac) = layout.aperture();
        let (r0, c0) = layout.aperture_offset();
        let mut live = vec![false; rows * cols];
        for r in r0..r0 + ar {
            live[r * cols + c0..r * cols + c0 + ac].fill(true);
        }
        PhaseMask {
            rows,
            cols,
            phase: vec![0.0; rows * cols],
            live,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn phase(&self, r: usize, c: usize) -> f64 {
        self.phase[r * self.cols + c]
    }

    pub fn is_live(&self, r: usize, c: usize) -> bool {
        self.live[r * self.cols + c]
    }

    pub fn phases(&self) -> &[f64] {
        &self.phase
    }

    pub fn live(&self) -> &[bool] {
        &self.live
    }

    pub fn live_count(&self) -> usize {
        self.live.iter().filter(|&&b| b).count()
    }

    /// The four phases of one spin cell in `[top-left, top-right, bottom-left,
    /// bottom-right]` order.
    pub fn cell_phases(&self, layout: &MacropixelLayout, l: usize) -> [f64; 4] {
        let (r, c) = sub_block_origin(layout, l);
        [
            self.phase(r, c),
            self.phase(r, c + 1),
            self.phase(r + 1, c),
            self.phase(r + 1, c + 1),
        ]
    }
}

fn sub_block_origin(layout: &MacropixelLayout, l: usize) -> (usize, usize) {
    let (cr, cc) = layout.cell(l);
    let (r0, c0) = layout.aperture_offset();
    (r0 + 2 * cr, c0 + 2 * cc)
}

/// Writes spin `l`'s cell phases `[phi - alpha, theta - beta; phi + alpha, theta + beta]`.
fn write_cell(mask: &mut PhaseMask, layout: &MacropixelLayout, l: usize, phi: f64, theta: f64, alpha: f64, beta: f64) {
    let (r, c) = sub_block_origin(layout, l);
    let cols = mask.cols;
    let cells = [
        (r, c, phi - alpha),
        (r, c + 1, theta - beta),
        (r + 1, c, phi + alpha),
        (r + 1, c + 1, theta + beta),
    ];
    for (rr, cc, p) in cells {
        mask.phase[rr * cols + cc] = wrap(p);
        mask.live[rr * cols + cc] = true;
    }
}

/// Phase mask for an encoding and primary spin configuration.
///
/// `x = +1 -> phi = 0`, `x = -1 -> phi = pi`; the quadrature spins `y = A x`
/// map `+1 -> theta = pi/2`, `-1 -> theta = 3pi/2`. The four sub-blocks of a
/// cell sum to `2 (eps x + i eta y)`.
pub fn synthesize_mask(enc: &Rank2Encoding, x: &SpinConfig, layout: &MacropixelLayout) -> Result<PhaseMask> {
    check_len(enc.n(), x.len())?;
    check_len(layout.n(), x.len())?;
    let y = enc.quadrature_spins(x)?;
    let (rows, cols) = layout.frame();
    let mut mask = PhaseMask {
        rows,
        cols,
        phase: vec![0.0; rows * cols],
        live: vec![false; rows * cols],
    };
    let (alpha, beta) = (enc.alpha(), enc.beta());
    for l in 0..x.len() {
        let phi = if x.get(l) > 0 { 0.0 } else { PI };
        let theta = if y.get(l) > 0 { FRAC_PI_2 } else { 3.0 * FRAC_PI_2 };
        write_cell(&mut mask, layout, l, phi, theta, alpha[l], beta[l]);
    }
    Ok(mask)
}
