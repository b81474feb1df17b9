use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::NoiseSpec;

/// Above this size the default backend is the closed-form readout.
pub const FULL_FIELD_LIMIT: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostBackend {
    /// Synthesize the mask and propagate it through the 2D transform.
    FullField,
    /// Evaluate the DC powers in closed form.
    ClosedForm,
}

impl CostBackend {
    pub fn for_size(n: usize) -> Self {
        if n > FULL_FIELD_LIMIT {
            CostBackend::ClosedForm
        } else {
            CostBackend::FullField
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CostBackend::FullField => "full_field",
            CostBackend::ClosedForm => "closed_form",
        }
    }
}

impl std::str::FromStr for CostBackend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full_field" => Ok(CostBackend::FullField),
            "closed_form" => Ok(CostBackend::ClosedForm),
            other => Err(Error::params(format!("unknown cost backend {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Distance between the detected image and the focused target image.
    ImageDistance,
    /// Quadrature-resolved DC powers `-(P_x + s P_y)`.
    #[default]
    Hamiltonian,
}

impl Objective {
    pub fn as_str(self) -> &'static str {
        match self {
            Objective::ImageDistance => "image_distance",
            Objective::Hamiltonian => "hamiltonian",
        }
    }
}

impl std::str::FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "image_distance" => Ok(Objective::ImageDistance),
            "hamiltonian" => Ok(Objective::Hamiltonian),
            other => Err(Error::params(format!("unknown objective {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnnealParams {
    pub iterations: usize,
    pub restarts: usize,
    pub initial_flip_fraction: f64,
    /// `None` means `1 / n`, capped at the initial fraction.
    pub final_flip_fraction: Option<f64>,
    /// `None` means the standard deviation of the warm-up costs.
    pub temperature_start: Option<f64>,
    pub cooling_rate: f64,
    pub warmup_proposals: usize,
    /// `None` picks by instance size, see [`CostBackend::for_size`].
    pub backend: Option<CostBackend>,
    pub objective: Objective,
    pub noise: NoiseSpec,
    pub seed: u64,
}

impl Default for AnnealParams {
    fn default() -> Self {
        AnnealParams {
            iterations: 100,
            restarts: 1,
            initial_flip_fraction: 0.5,
            final_flip_fraction: None,
            temperature_start: None,
            cooling_rate: 0.95,
            warmup_proposals: 20,
            backend: None,
            objective: Objective::default(),
            noise: NoiseSpec::none(),
            seed: 0,
        }
    }
}

impl AnnealParams {
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::params("iterations must be at least 1"));
        }
        if self.restarts == 0 {
            return Err(Error::params("restarts must be at least 1"));
        }
        let p0 = self.initial_flip_fraction;
        if !(p0 > 0.0 && p0 <= 1.0) {
            return Err(Error::params(format!("initial_flip_fraction must lie in (0, 1], got {p0}")));
        }
        let p1 = self.final_flip_fraction(n);
        if !(p1 > 0.0 && p1 <= p0) {
            return Err(Error::params(format!(
                "final_flip_fraction must lie in (0, initial_flip_fraction], got {p1}"
            )));
        }
        if !(self.cooling_rate > 0.0 && self.cooling_rate < 1.0) {
            return Err(Error::params(format!("cooling_rate must lie in (0, 1), got {}", self.cooling_rate)));
        }
        if let Some(t) = self.temperature_start {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::params(format!("temperature_start must be positive, got {t}")));
            }
        } else if self.warmup_proposals < 2 {
            return Err(Error::params("automatic temperature needs at least 2 warm-up proposals"));
        }
        self.noise.validate()?;
        if self.backend(n) == CostBackend::ClosedForm && self.objective == Objective::ImageDistance {
            return Err(Error::params("the image_distance objective requires the full_field backend"));
        }
        Ok(())
    }

    pub fn backend(&self, n: usize) -> CostBackend {
        self.backend.unwrap_or(CostBackend::for_size(n))
    }

    pub fn final_flip_fraction(&self, n: usize) -> f64 {
        self.final_flip_fraction
            .unwrap_or_else(|| (1.0 / n.max(1) as f64).min(self.initial_flip_fraction))
    }

    /// Flip fraction at iteration `t`, geometric from initial to final.
    pub fn flip_fraction(&self, n: usize, t: usize) -> f64 {
        let p0 = self.initial_flip_fraction;
        let p1 = self.final_flip_fraction(n);
        if self.iterations <= 1 {
            return p0;
        }
        let frac = t as f64 / (self.iterations - 1) as f64;
        p0 * (p1 / p0).powf(frac)
    }
}
