//! Rank-2 spin-interaction encodings.
//!
//! Each spin `l` carries two extra phases `alpha[l]` and `beta[l]`. Averaging
//! the pure phases `exp(±i alpha)` gives the real amplitude `cos(alpha)`, so a
//! phase-only modulator realizes the amplitude `eps[l] = cos(alpha[l])` on the
//! primary spin and `eta[l] = cos(beta[l])` on its quadrature partner. The
//! couplings the machine can express are
//!
//! ```text
//! w[l][k] = eps[l] eps[k] + s * v[l] v[k],   v[l] = sigma[l] * eta[p(l)]
//! ```
//!
//! where `(p, sigma)` is the signed permutation relating the quadrature spins
//! `y` to the primary spins `x`, and `s` is the branch sign.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::spin::SpinConfig;
use crate::error::{check_len, Error, Result};

/// Amplitudes below this magnitude are snapped to exactly zero, so that
/// phases of `pi/2` yield exactly vanishing couplings.
pub const AMPLITUDE_ZERO: f64 = 1e-15;

/// Real amplitude realized by averaging the phases `±phase`.
pub fn amplitude(phase: f64) -> f64 {
    let c = phase.cos();
    if c.abs() < AMPLITUDE_ZERO {
        0.0
    } else {
        c
    }
}

/// Sign of the quadrature term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl TryFrom<i64> for Sign {
    type Error = Error;

    fn try_from(v: i64) -> Result<Self> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(Error::input(format!("sign must be +1 or -1, got {other}"))),
        }
    }
}

impl From<Sign> for i64 {
    fn from(s: Sign) -> i64 {
        s.as_i64()
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

impl std::str::FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+1" | "1" | "+" | "plus" => Ok(Sign::Plus),
            "-1" | "-" | "minus" => Ok(Sign::Minus),
            other => Err(Error::input(format!("sign must be +1 or -1, got {other:?}"))),
        }
    }
}

/// Signed permutation `A` with `(A x)[p(l)] = sigma[l] * x[l]`.
///
/// Signed permutations are exactly the linear maps sending every spin vector
/// to a spin vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuxMap {
    permutation: Vec<usize>,
    sigma: Vec<i8>,
}

impl AuxMap {
    pub fn identity(n: usize) -> Self {
        AuxMap {
            permutation: (0..n).collect(),
            sigma: vec![1; n],
        }
    }

    pub fn new(permutation: Vec<usize>, sigma: Vec<i8>) -> Result<Self> {
        check_len(permutation.len(), sigma.len())?;
        let n = permutation.len();
        let mut seen = vec![false; n];
        for &p in &permutation {
            if p >= n || seen[p] {
                return Err(Error::input(format!(
                    "permutation is not a bijection on 0..{n} (entry {p})"
                )));
            }
            seen[p] = true;
        }
        if sigma.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::input("sigma entries must be +1 or -1"));
        }
        Ok(AuxMap { permutation, sigma })
    }

    pub fn len(&self) -> usize {
        self.permutation.len()
    }

    pub fn is_empty(&self) -> bool {
        self.permutation.is_empty()
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn sigma(&self) -> &[i8] {
        &self.sigma
    }

    pub fn is_identity(&self) -> bool {
        self.permutation.iter().enumerate().all(|(i, &p)| i == p) && self.sigma.iter().all(|&s| s == 1)
    }

    pub fn apply(&self, x: &SpinConfig) -> Result<SpinConfig> {
        check_len(self.len(), x.len())?;
        let mut y = vec![1i8; x.len()];
        for (l, (&p, &s)) in self.permutation.iter().zip(&self.sigma).enumerate() {
            y[p] = s * x.get(l);
        }
        Ok(SpinConfig::from_raw(y))
    }
}

/// Per-spin phases, branch sign and auxiliary map.
#[derive(Clone, Debug, PartialEq)]
pub struct Rank2Encoding {
    alpha: Vec<f64>,
    beta: Vec<f64>,
    sign: Sign,
    aux: AuxMap,
}

impl Rank2Encoding {
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>, sign: Sign, aux: AuxMap) -> Result<Self> {
        check_len(alpha.len(), beta.len())?;
        check_len(alpha.len(), aux.len())?;
        if alpha.is_empty() {
            return Err(Error::input("encoding needs at least one spin"));
        }
        for (name, phases) in [("alpha", &alpha), ("beta", &beta)] {
            if let Some((l, a)) = phases
                .iter()
                .enumerate()
                .find(|(_, a)| !(a.is_finite() && (0.0..=PI).contains(*a)))
            {
                return Err(Error::input(format!("{name}[{l}] = {a} is outside [0, pi]")));
            }
        }
        Ok(Rank2Encoding {
            alpha,
            beta,
            sign,
            aux,
        })
    }

    /// Encoding with identity auxiliary map.
    pub fn with_identity(alpha: Vec<f64>, beta: Vec<f64>, sign: Sign) -> Result<Self> {
        let n = alpha.len();
        Self::new(alpha, beta, sign, AuxMap::identity(n))
    }

    /// Builds the phases from target amplitudes in `[-1, 1]`.
    pub fn from_amplitudes(eps: &[f64], eta: &[f64], sign: Sign) -> Result<Self> {
        let to_phase = |a: f64| -> Result<f64> {
            if !a.is_finite() || a.abs() > 1.0 + 1e-12 {
                return Err(Error::input(format!("amplitude {a} is outside [-1, 1]")));
            }
            Ok(a.clamp(-1.0, 1.0).acos())
        };
        let alpha = eps.iter().map(|&a| to_phase(a)).collect::<Result<Vec<_>>>()?;
        let beta = eta.iter().map(|&a| to_phase(a)).collect::<Result<Vec<_>>>()?;
        Self::with_identity(alpha, beta, sign)
    }

    pub fn n(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn aux(&self) -> &AuxMap {
        &self.aux
    }

    /// `eps[l] = cos(alpha[l])`.
    pub fn epsilon(&self) -> Vec<f64> {
        self.alpha.iter().map(|&a| amplitude(a)).collect()
    }

    /// `eta[l] = cos(beta[l])`, indexed by quadrature spin.
    pub fn eta(&self) -> Vec<f64> {
        self.beta.iter().map(|&b| amplitude(b)).collect()
    }

    /// Quadrature amplitude seen by primary spin `l`: `sigma[l] * eta[p(l)]`.
    pub fn coupled_eta(&self) -> Vec<f64> {
        let eta = self.eta();
        self.aux
            .permutation
            .iter()
            .zip(&self.aux.sigma)
            .map(|(&p, &s)| f64::from(s) * eta[p])
            .collect()
    }

    /// Quadrature spins `y = A x`.
    pub fn quadrature_spins(&self, x: &SpinConfig) -> Result<SpinConfig> {
        self.aux.apply(x)
    }

    /// Diagonal terms `eps^2 + s * v^2` implied by the encoding; they shift the
    /// Hamiltonian by a configuration-independent constant.
    pub fn diagonal(&self) -> Vec<f64> {
        let s = self.sign.value();
        self.epsilon()
            .iter()
            .zip(self.coupled_eta())
            .map(|(e, v)| e * e + s * v * v)
            .collect()
    }
}
