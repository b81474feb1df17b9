use serde::{Deserialize, Serialize};

use super::field::ComplexField;
use crate::error::{check_len, Result};
use crate::graph::{Rank2Encoding, SpinConfig};

/// Sum of the four sub-block fields of one cell relative to `eps x + i eta y`.
pub const CELL_FIELD_GAIN: f64 = 2.0;

/// Quadrature-resolved power at the DC pixel, per unit cell field.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DcReadout {
    /// `(sum eps x)^2`
    pub p_x: f64,
    /// `(sum eta y)^2`
    pub p_y: f64,
}

impl DcReadout {
    /// Center intensity `P_x + P_y`.
    pub fn intensity(&self) -> f64 {
        self.p_x + self.p_y
    }
}

/// `sum_l eps[l] x[l]` and `sum_j eta[j] y[j]` with `y = A x`.
pub(crate) fn dc_sums(enc: &Rank2Encoding, x: &SpinConfig) -> Result<(f64, f64)> {
    check_len(enc.n(), x.len())?;
    let y = enc.quadrature_spins(x)?;
    let sx = enc
        .epsilon()
        .iter()
        .enumerate()
        .map(|(l, e)| e * x.value(l))
        .sum();
    let sy = enc.eta().iter().enumerate().map(|(j, e)| e * y.value(j)).sum();
    Ok((sx, sy))
}

/// Closed-form DC readout in `O(n)`; no transform is performed.
pub fn dc_readout(enc: &Rank2Encoding, x: &SpinConfig) -> Result<DcReadout> {
    let (sx, sy) = dc_sums(enc, x)?;
    Ok(DcReadout {
        p_x: sx * sx,
        p_y: sy * sy,
    })
}

/// DC readout recovered from a propagated field's center pixel.
pub fn field_readout(field: &ComplexField) -> DcReadout {
    let z = field.center() / CELL_FIELD_GAIN;
    DcReadout {
        p_x: z.re * z.re,
        p_y: z.im * z.im,
    }
}

/// `-sum_{l<k} (eps_l eps_k x_l x_k + s eta_l eta_k y_l y_k)` from the DC powers.
pub fn quadrature_hamiltonian_readout(enc: &Rank2Encoding, x: &SpinConfig) -> Result<f64> {
    let r = dc_readout(enc, x)?;
    Ok(hamiltonian_from_readout(enc, &r))
}

pub fn hamiltonian_from_readout(enc: &Rank2Encoding, r: &DcReadout) -> f64 {
    let (ce, ch) = incoherent_sums(enc);
    -0.5 * ((r.p_x - ce) + enc.sign().value() * (r.p_y - ch))
}

/// `(sum eps^2, sum eta^2)`.
pub fn incoherent_sums(enc: &Rank2Encoding) -> (f64, f64) {
    let ce = enc.epsilon().iter().map(|e| e * e).sum();
    let ch = enc.eta().iter().map(|e| e * e).sum();
    (ce, ch)
}
