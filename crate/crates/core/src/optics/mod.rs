//! Phase-mask synthesis, Fourier-plane propagation and detector readouts.

mod export;
mod field;
mod geometry;
mod mask;
mod readout;

pub use rustfft::num_complex::Complex64;
pub use export::{encode_pgm16, encode_raw_image, parse_raw_image, MAX_RAW_PIXELS, RAW_MAGIC};
pub use field::{image_distance, propagate, target_image, ComplexField, IntensityImage, Propagator};
pub use geometry::{build_layout, MacropixelLayout, OpticalGeometry};
pub use mask::{synthesize_mask, PhaseMask};
pub use readout::{
    dc_readout, field_readout, hamiltonian_from_readout, incoherent_sums, quadrature_hamiltonian_readout,
    DcReadout, CELL_FIELD_GAIN,
};

