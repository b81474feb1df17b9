use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A binary spin vector with every entry exactly `+1` or `-1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct SpinConfig(Vec<i8>);

impl SpinConfig {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if let Some(pos) = spins.iter().position(|&s| s != 1 && s != -1) {
            return Err(Error::input(format!(
                "spin {pos} is {}, expected +1 or -1",
                spins[pos]
            )));
        }
        Ok(SpinConfig(spins))
    }

    /// All spins set to the same value.
    pub fn aligned(n: usize, up: bool) -> Self {
        SpinConfig(vec![if up { 1 } else { -1 }; n])
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        SpinConfig((0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect())
    }

    /// Spin `l` is `-1` when bit `l` of `bits` is set.
    pub fn from_bits(n: usize, bits: u64) -> Self {
        debug_assert!(n <= 64);
        SpinConfig(
            (0..n)
                .map(|l| if (bits >> l) & 1 == 1 { -1 } else { 1 })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub fn get(&self, l: usize) -> i8 {
        self.0[l]
    }

    pub fn value(&self, l: usize) -> f64 {
        f64::from(self.0[l])
    }

    pub fn flip(&mut self, l: usize) {
        self.0[l] = -self.0[l];
    }

    pub fn flip_all(&mut self, indices: &[usize]) {
        for &l in indices {
            self.0[l] = -self.0[l];
        }
    }

    pub fn negated(&self) -> Self {
        SpinConfig(self.0.iter().map(|s| -s).collect())
    }

    /// Number of `+1` spins.
    pub fn count_up(&self) -> usize {
        self.0.iter().filter(|&&s| s == 1).count()
    }

    /// Number of positions at which `self` and `other` differ.
    pub fn hamming(&self, other: &SpinConfig) -> usize {
        self.0
            .iter()
            .zip(&other.0)
            .filter(|(a, b)| a != b)
            .count()
    }

    pub(crate) fn from_raw(spins: Vec<i8>) -> Self {
        debug_assert!(spins.iter().all(|&s| s == 1 || s == -1));
        SpinConfig(spins)
    }
}

impl TryFrom<Vec<i8>> for SpinConfig {
    type Error = Error;

    fn try_from(v: Vec<i8>) -> Result<Self> {
        SpinConfig::new(v)
    }
}

impl From<SpinConfig> for Vec<i8> {
    fn from(c: SpinConfig) -> Self {
        c.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_binary_entries() {
        assert!(SpinConfig::new(vec![1, -1, 1]).is_ok());
        assert!(SpinConfig::new(vec![1, 0]).is_err());
        assert!(SpinConfig::new(vec![2]).is_err());
    }

    #[test]
    fn bits_map_to_down_spins() {
        let c = SpinConfig::from_bits(4, 0b0101);
        assert_eq!(c.as_slice(), &[-1, 1, -1, 1]);
        assert_eq!(c.count_up(), 2);
    }

    #[test]
    fn serde_rejects_invalid_spin() {
        assert!(serde_json::from_str::<SpinConfig>("[1,-1]").is_ok());
        assert!(serde_json::from_str::<SpinConfig>("[1,3]").is_err());
    }
}
