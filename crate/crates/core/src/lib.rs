//! Simulator of a quadrature spatial-Euler photonic Ising machine for
//! weighted Max-cut.

pub mod anneal;
pub mod baselines;
pub mod error;
pub mod graph;
pub mod noise;
pub mod optics;
pub mod report;

pub use error::{Error, Result};
pub use report::CutReport;
