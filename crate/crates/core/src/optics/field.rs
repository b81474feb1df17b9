use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::geometry::MacropixelLayout;
use super::mask::PhaseMask;
use crate::error::{check_len, Error, Result};

/// Complex field in the camera plane with the DC term at `(rows/2, cols/2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexField {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexField {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn at(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    pub fn center(&self) -> Complex64 {
        self.at(self.rows / 2, self.cols / 2)
    }

    pub fn energy(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn intensity(&self) -> IntensityImage {
        IntensityImage {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.norm_sqr()).collect(),
            normalized: false,
        }
    }
}

/// Real image over the camera plane, raw or max-normalized.
#[derive(Clone, Debug, PartialEq)]
pub struct IntensityImage {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    normalized: bool,
}

impl IntensityImage {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::input("image needs positive dimensions"));
        }
        check_len(rows * cols, data.len())?;
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("image values must be finite"));
        }
        Ok(IntensityImage {
            rows,
            cols,
            data,
            normalized: false,
        })
    }

    pub(crate) fn from_parts(rows: usize, cols: usize, data: Vec<f64>, normalized: bool) -> Self {
        debug_assert_eq!(rows * cols, data.len());
        IntensityImage {
            rows,
            cols,
            data,
            normalized,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn center(&self) -> f64 {
        self.at(self.rows / 2, self.cols / 2)
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Row-major index of the first maximum.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &v) in self.data.iter().enumerate() {
            if v > self.data[best] {
                best = i;
            }
        }
        best
    }
}

/// Reusable 2D transform for one frame size.
pub struct Propagator {
    rows: usize,
    cols: usize,
    row_fft: Arc<dyn Fft<f64>>,
    col_fft: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    work: Vec<Complex64>,
    transposed: Vec<Complex64>,
}

impl Propagator {
    pub fn new(rows: usize, cols: usize) -> Self {
        let mut planner = FftPlanner::new();
        let row_fft = planner.plan_fft_forward(cols);
        let col_fft = planner.plan_fft_forward(rows);
        let scratch_len = row_fft
            .get_inplace_scratch_len()
            .max(col_fft.get_inplace_scratch_len());
        Propagator {
            rows,
            cols,
            row_fft,
            col_fft,
            scratch: vec![Complex64::default(); scratch_len],
            work: vec![Complex64::default(); rows * cols],
            transposed: vec![Complex64::default(); rows * cols],
        }
    }

    pub fn for_layout(layout: &MacropixelLayout) -> Self {
        let (r, c) = layout.frame();
        Self::new(r, c)
    }

    /// Centered, unnormalized DFT of `exp(i phase)` over live samples.
    pub fn propagate(&mut self, mask: &PhaseMask) -> Result<ComplexField> {
        check_len(self.rows, mask.rows())?;
        check_len(self.cols, mask.cols())?;
        for ((w, &p), &live) in self.work.iter_mut().zip(mask.phases()).zip(mask.live()) {
            *w = if live {
                Complex64::from_polar(1.0, p)
            } else {
                Complex64::default()
            };
        }
        Ok(self.transform())
    }

    /// Centered, unnormalized DFT of an arbitrary row-major aperture.
    pub fn transform_aperture(&mut self, aperture: &[Complex64]) -> Result<ComplexField> {
        check_len(self.rows * self.cols, aperture.len())?;
        self.work.copy_from_slice(aperture);
        Ok(self.transform())
    }

    fn transform(&mut self) -> ComplexField {
        let (rows, cols) = (self.rows, self.cols);
        self.row_fft.process_with_scratch(&mut self.work, &mut self.scratch);
        for r in 0..rows {
            for c in 0..cols {
                self.transposed[c * rows + r] = self.work[r * cols + c];
            }
        }
        self.col_fft
            .process_with_scratch(&mut self.transposed, &mut self.scratch);
        let mut data = vec![Complex64::default(); rows * cols];
        let (hr, hc) = (rows / 2, cols / 2);
        for c in 0..cols {
            let sc = (c + hc) % cols;
            for r in 0..rows {
                let sr = (r + hr) % rows;
                data[sr * cols + sc] = self.transposed[c * rows + r];
            }
        }
        ComplexField { rows, cols, data }
    }
}

/// One-shot [`Propagator::propagate`].
pub fn propagate(mask: &PhaseMask) -> ComplexField {
    Propagator::new(mask.rows(), mask.cols())
        .propagate(mask)
        .expect("propagator sized to mask")
}

/// Focus of the unmodulated beam over every layout cell, max-normalized.
pub fn target_image(layout: &MacropixelLayout) -> IntensityImage {
    let mut image = propagate(&PhaseMask::uniform(layout)).intensity();
    let peak = image.max();
    image.data_mut().iter_mut().for_each(|v| *v /= peak);
    image.normalized = true;
    image
}

/// Euclidean norm of the pixelwise difference.
pub fn image_distance(a: &IntensityImage, b: &IntensityImage) -> Result<f64> {
    check_len(a.rows, b.rows)?;
    check_len(a.cols, b.cols)?;
    Ok(a.data
        .iter()
        .zip(&b.data)
        .map(|(p, q)| (p - q) * (p - q))
        .sum::<f64>()
        .sqrt())
}
