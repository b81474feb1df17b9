use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Modulator and lens parameters.
///
/// Only the pixel counts, macropixel size and padding affect the simulation;
/// wavelength, focal length and pixel pitch are carried as metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OpticalGeometry {
    pub slm_cols: usize,
    pub slm_rows: usize,
    /// Side of one spin cell in modulator pixels; must be even.
    pub macropixel: usize,
    pub wavelength_nm: f64,
    pub focal_length_mm: f64,
    pub pixel_pitch_um: f64,
    /// Transform frame size relative to the spin grid, per axis.
    pub pad_factor: usize,
}

impl Default for OpticalGeometry {
    fn default() -> Self {
        OpticalGeometry {
            slm_cols: 1920,
            slm_rows: 1080,
            macropixel: 10,
            wavelength_nm: 632.8,
            focal_length_mm: 150.0,
            pixel_pitch_um: 6.4,
            pad_factor: 2,
        }
    }
}

impl OpticalGeometry {
    pub fn validate(&self) -> Result<()> {
        if self.macropixel < 2 || self.macropixel % 2 != 0 {
            return Err(Error::params(format!(
                "macropixel must be a positive even number, got {}",
                self.macropixel
            )));
        }
        if self.slm_cols < self.macropixel || self.slm_rows < self.macropixel {
            return Err(Error::params(format!(
                "modulator {}x{} is smaller than one macropixel",
                self.slm_cols, self.slm_rows
            )));
        }
        if self.pad_factor == 0 || self.pad_factor > 16 {
            return Err(Error::params(format!(
                "pad_factor must lie in 1..=16, got {}",
                self.pad_factor
            )));
        }
        for (name, v) in [
            ("wavelength_nm", self.wavelength_nm),
            ("focal_length_mm", self.focal_length_mm),
            ("pixel_pitch_um", self.pixel_pitch_um),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::params(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Macropixel grid that fits on the modulator, as `(rows, cols)`.
    pub fn max_grid(&self) -> (usize, usize) {
        (self.slm_rows / self.macropixel, self.slm_cols / self.macropixel)
    }

    /// Square modulator area of `side` pixels per axis with other fields default.
    pub fn square(side: usize) -> Self {
        OpticalGeometry {
            slm_cols: side,
            slm_rows: side,
            ..Self::default()
        }
    }
}

/// Placement of spins on the macropixel grid.
///
/// Spin `l` occupies cell `(l / grid_cols, l % grid_cols)`; cells past `n` are
/// dark. Each cell is `2 x 2` sub-blocks, and the transform frame pads the
/// `2 grid_rows x 2 grid_cols` sub-block aperture by `pad` per axis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MacropixelLayout {
    n: usize,
    grid_rows: usize,
    grid_cols: usize,
    pad: usize,
}

/// Row-major layout on the smallest near-square grid that fits the modulator.
pub fn build_layout(n: usize, geometry: &OpticalGeometry) -> Result<MacropixelLayout> {
    geometry.validate()?;
    if n == 0 {
        return Err(Error::input("layout needs at least one spin"));
    }
    let (max_rows, max_cols) = geometry.max_grid();
    let side = (n as f64).sqrt().ceil() as usize;
    let side = if side * side < n { side + 1 } else { side };
    let cols = side.max(n.div_ceil(max_rows));
    if cols > max_cols {
        return Err(Error::params(format!(
            "{n} spins do not fit on a {max_rows}x{max_cols} macropixel grid"
        )));
    }
    let rows = n.div_ceil(cols);
    Ok(MacropixelLayout {
        n,
        grid_rows: rows,
        grid_cols: cols,
        pad: geometry.pad_factor,
    })
}

impl MacropixelLayout {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn grid_rows(&self) -> usize {
        self.grid_rows
    }

    pub fn grid_cols(&self) -> usize {
        self.grid_cols
    }

    pub fn pad(&self) -> usize {
        self.pad
    }

    /// Cell `(row, col)` of spin `l`.
    pub fn cell(&self, l: usize) -> (usize, usize) {
        debug_assert!(l < self.n);
        (l / self.grid_cols, l % self.grid_cols)
    }

    /// Spin occupying a cell, or `None` for a dark cell.
    pub fn spin_at(&self, row: usize, col: usize) -> Option<usize> {
        let l = row * self.grid_cols + col;
        (row < self.grid_rows && col < self.grid_cols && l < self.n).then_some(l)
    }

    pub fn dark_cells(&self) -> usize {
        self.grid_rows * self.grid_cols - self.n
    }

    /// Sub-block aperture `(rows, cols)`.
    pub fn aperture(&self) -> (usize, usize) {
        (2 * self.grid_rows, 2 * self.grid_cols)
    }

    /// Transform frame `(rows, cols)`.
    pub fn frame(&self) -> (usize, usize) {
        let (r, c) = self.aperture();
        (r * self.pad, c * self.pad)
    }

    /// Top-left frame index of the aperture.
    pub fn aperture_offset(&self) -> (usize, usize) {
        let (ar, ac) = self.aperture();
        let (fr, fc) = self.frame();
        ((fr - ar) / 2, (fc - ac) / 2)
    }
}
