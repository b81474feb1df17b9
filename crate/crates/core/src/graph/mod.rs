//! Max-cut instances, spin configurations and rank-2 encodings.

mod encoding;
mod fit;
mod generate;
mod instance;
mod io;
mod spin;

pub use encoding::{amplitude, AuxMap, Rank2Encoding, Sign, AMPLITUDE_ZERO};
pub use fit::{fit_rank2, Rank2Fit, MAX_FIT_VERTICES};
pub use generate::{generate, generate_instance, target_pairs, Family, GeneratorSpec};
pub use instance::{Edge, MaxCutInstance, Metadata};
pub use io::{parse_encoding, parse_instance, serialize_encoding, serialize_instance, MAX_PARSED_VERTICES};
pub use spin::SpinConfig;

pub(crate) use instance::{Couplings, EnergyTracker};

use crate::error::Result;

/// Total weight of cut pairs.
pub fn cut_value(inst: &MaxCutInstance, x: &SpinConfig) -> Result<f64> {
    inst.cut_value(x)
}

/// `sum_{l<k} w[l][k] x[l] x[k]`.
pub fn hamiltonian(inst: &MaxCutInstance, x: &SpinConfig) -> Result<f64> {
    inst.hamiltonian(x)
}

pub fn total_weight(inst: &MaxCutInstance) -> f64 {
    inst.total_weight()
}

/// Instance realized by an encoding, stored implicitly in `O(n)` memory.
pub fn weights_from_encoding(enc: &Rank2Encoding) -> MaxCutInstance {
    MaxCutInstance::from_encoding(enc)
}
