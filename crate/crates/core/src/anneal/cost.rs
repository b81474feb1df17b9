use rand::Rng;

use super::params::{AnnealParams, CostBackend, Objective};
use crate::error::{check_len, Error, Result};
use crate::graph::{Rank2Encoding, SpinConfig};
use crate::noise::{add_noise_with, normalize_image, scalar_noise};
use crate::optics::{
    field_readout, image_distance, synthesize_mask, IntensityImage, MacropixelLayout, Propagator,
};

/// Evaluates the machine's cost for spin configurations of one encoding.
///
/// Powers entering the Hamiltonian objective are divided by `n^2`, the DC
/// power of the unmodulated focus, so that noise levels refer to the same
/// scale as a normalized detector image.
pub(crate) struct CostModel<'a> {
    enc: &'a Rank2Encoding,
    layout: &'a MacropixelLayout,
    backend: CostBackend,
    objective: Objective,
    level: f64,
    sign: f64,
    reference: f64,
    eps: Vec<f64>,
    v: Vec<f64>,
    target: Option<&'a IntensityImage>,
    propagator: Option<Propagator>,
}

impl<'a> CostModel<'a> {
    pub(crate) fn new(
        enc: &'a Rank2Encoding,
        layout: &'a MacropixelLayout,
        params: &AnnealParams,
        target: Option<&'a IntensityImage>,
    ) -> Result<Self> {
        let n = enc.n();
        check_len(n, layout.n())?;
        params.validate(n)?;
        let backend = params.backend(n);
        let propagator = (backend == CostBackend::FullField).then(|| Propagator::for_layout(layout));
        if params.objective == Objective::ImageDistance && target.is_none() {
            return Err(Error::params("the image_distance objective needs a target image"));
        }
        Ok(CostModel {
            enc,
            layout,
            backend,
            objective: params.objective,
            level: params.noise.level,
            sign: enc.sign().value(),
            reference: (n as f64) * (n as f64),
            eps: enc.epsilon(),
            v: enc.coupled_eta(),
            target,
            propagator,
        })
    }

    /// `(sum eps x, sum v x)`, equal to the DC field quadratures.
    pub(crate) fn sums(&self, x: &SpinConfig) -> (f64, f64) {
        x.as_slice()
            .iter()
            .zip(self.eps.iter().zip(&self.v))
            .fold((0.0, 0.0), |(a, b), (&xi, (&e, &v))| {
                let xi = f64::from(xi);
                (a + e * xi, b + v * xi)
            })
    }

    /// Sums after flipping `flips`; `x_after` already holds the flipped spins.
    pub(crate) fn shifted(&self, sums: (f64, f64), x_after: &SpinConfig, flips: &[usize]) -> (f64, f64) {
        let (mut a, mut b) = sums;
        for &l in flips {
            let d = 2.0 * x_after.value(l);
            a += self.eps[l] * d;
            b += self.v[l] * d;
        }
        (a, b)
    }

    fn hamiltonian_cost<R: Rng + ?Sized>(&self, p_x: f64, p_y: f64, rng: &mut R) -> f64 {
        let nx = p_x / self.reference + scalar_noise(self.level, rng);
        let ny = p_y / self.reference + scalar_noise(self.level, rng);
        -(nx + self.sign * ny)
    }

    pub(crate) fn evaluate<R: Rng + ?Sized>(&mut self, x: &SpinConfig, sums: (f64, f64), rng: &mut R) -> Result<f64> {
        if self.backend == CostBackend::ClosedForm {
            return Ok(self.hamiltonian_cost(sums.0 * sums.0, sums.1 * sums.1, rng));
        }
        let mask = synthesize_mask(self.enc, x, self.layout)?;
        let field = self
            .propagator
            .as_mut()
            .expect("full-field backend owns a propagator")
            .propagate(&mask)?;
        match self.objective {
            Objective::Hamiltonian => {
                let r = field_readout(&field);
                Ok(self.hamiltonian_cost(r.p_x, r.p_y, rng))
            }
            Objective::ImageDistance => {
                let detected = normalize_image(&field.intensity())?;
                let noisy = add_noise_with(&detected, self.level, rng)?;
                image_distance(self.target.expect("target present"), &noisy)
            }
        }
    }
}
