//! Digital Gaussian white noise on max-normalized detector images.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optics::IntensityImage;

/// Noise level is the variance of the zero-mean Gaussian added per pixel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub level: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(level: f64, seed: u64) -> Result<Self> {
        let spec = NoiseSpec { level, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn none() -> Self {
        NoiseSpec { level: 0.0, seed: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.level.is_finite() && (0.0..1.0).contains(&self.level)) {
            return Err(Error::params(format!(
                "noise level must lie in [0, 1), got {}",
                self.level
            )));
        }
        Ok(())
    }

    pub fn is_enabled(&self) -> bool {
        self.level > 0.0
    }

    pub fn std_dev(&self) -> f64 {
        self.level.sqrt()
    }
}

/// Divides by the maximum so it becomes 1.
pub fn normalize_image(image: &IntensityImage) -> Result<IntensityImage> {
    let peak = image.max();
    if !(peak > 0.0 && peak.is_finite()) {
        return Err(Error::input("cannot normalize an image without a positive maximum"));
    }
    let data = image.data().iter().map(|v| v / peak).collect();
    Ok(IntensityImage::from_parts(image.rows(), image.cols(), data, true))
}

/// Adds i.i.d. `N(0, level)` samples to every pixel; no clamping.
pub fn add_noise(image: &IntensityImage, spec: &NoiseSpec) -> Result<IntensityImage> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    add_noise_with(image, spec.level, &mut rng)
}

/// [`add_noise`] drawing from a caller-owned stream.
pub fn add_noise_with<R: Rng + ?Sized>(image: &IntensityImage, level: f64, rng: &mut R) -> Result<IntensityImage> {
    if !image.is_normalized() {
        return Err(Error::input("noise is defined on normalized images"));
    }
    NoiseSpec { level, seed: 0 }.validate()?;
    let mut out = IntensityImage::from_parts(image.rows(), image.cols(), image.data().to_vec(), false);
    if level > 0.0 {
        let normal = Normal::new(0.0, level.sqrt()).expect("valid deviation");
        for v in out.data_mut() {
            *v += normal.sample(rng);
        }
    }
    Ok(out)
}

/// One `N(0, level)` sample, or zero when noise is off.
pub(crate) fn scalar_noise<R: Rng + ?Sized>(level: f64, rng: &mut R) -> f64 {
    if level > 0.0 {
        Normal::new(0.0, level.sqrt()).expect("valid deviation").sample(rng)
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_bounds() {
        assert!(NoiseSpec::new(0.0, 1).is_ok());
        assert!(NoiseSpec::new(0.99, 1).is_ok());
        assert!(NoiseSpec::new(1.0, 1).is_err());
        assert!(NoiseSpec::new(-0.1, 1).is_err());
        assert!(NoiseSpec::new(f64::NAN, 1).is_err());
    }

    #[test]
    fn normalize_constant_and_idempotent() {
        let img = IntensityImage::new(2, 2, vec![3.0; 4]).unwrap();
        let n = normalize_image(&img).unwrap();
        assert!(n.data().iter().all(|&v| v == 1.0));
        let img = IntensityImage::new(1, 3, vec![0.5, 4.0, 2.0]).unwrap();
        let n = normalize_image(&img).unwrap();
        assert_eq!(normalize_image(&n).unwrap(), n);
        assert_eq!(n.argmax(), img.argmax());
        assert!(normalize_image(&IntensityImage::new(1, 2, vec![0.0, 0.0]).unwrap()).is_err());
    }

    #[test]
    fn zero_level_is_identity_and_requires_normalized() {
        let img = normalize_image(&IntensityImage::new(1, 3, vec![0.5, 4.0, 2.0]).unwrap()).unwrap();
        let out = add_noise(&img, &NoiseSpec::none()).unwrap();
        assert_eq!(out.data(), img.data());
        let raw = IntensityImage::new(1, 1, vec![1.0]).unwrap();
        assert!(add_noise(&raw, &NoiseSpec::none()).is_err());
    }

    #[test]
    fn same_seed_same_noise() {
        let img = normalize_image(&IntensityImage::new(4, 4, vec![1.0; 16]).unwrap()).unwrap();
        let spec = NoiseSpec::new(0.1, 42).unwrap();
        assert_eq!(add_noise(&img, &spec).unwrap(), add_noise(&img, &spec).unwrap());
        let other = NoiseSpec::new(0.1, 43).unwrap();
        assert_ne!(add_noise(&img, &spec).unwrap(), add_noise(&img, &other).unwrap());
    }
}
