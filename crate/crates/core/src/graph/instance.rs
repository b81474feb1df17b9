use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::encoding::{Rank2Encoding, Sign};
use super::spin::SpinConfig;
use crate::error::{check_len, Error, Result};

/// Weighted unordered pair `{l, k}` with `l < k` (0-based).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub l: usize,
    pub k: usize,
    pub w: f64,
}

/// Free-form provenance record carried along with an instance.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata(BTreeMap<String, String>);

impl Metadata {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn insert(&mut self, key: impl Into<String>, value: impl ToString) {
        self.0.insert(key.into(), value.to_string());
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, Debug)]
pub(crate) struct SparseCouplings {
    pub(crate) edges: Vec<Edge>,
    pub(crate) offsets: Vec<usize>,
    pub(crate) adjacency: Vec<(usize, f64)>,
}

impl SparseCouplings {
    fn build(n: usize, edges: Vec<Edge>) -> Self {
        let mut degree = vec![0usize; n + 1];
        for e in &edges {
            degree[e.l + 1] += 1;
            degree[e.k + 1] += 1;
        }
        for i in 0..n {
            degree[i + 1] += degree[i];
        }
        let offsets = degree;
        let mut fill = offsets.clone();
        let mut adjacency = vec![(0usize, 0.0f64); 2 * edges.len()];
        for e in &edges {
            adjacency[fill[e.l]] = (e.k, e.w);
            fill[e.l] += 1;
            adjacency[fill[e.k]] = (e.l, e.w);
            fill[e.k] += 1;
        }
        SparseCouplings {
            edges,
            offsets,
            adjacency,
        }
    }

    pub(crate) fn neighbors(&self, l: usize) -> &[(usize, f64)] {
        &self.adjacency[self.offsets[l]..self.offsets[l + 1]]
    }
}

/// Implicit couplings `w[l][k] = u[l] u[k] + s v[l] v[k]`.
#[derive(Clone, Debug)]
pub(crate) struct LowRankCouplings {
    pub(crate) u: Vec<f64>,
    pub(crate) v: Vec<f64>,
    pub(crate) s: f64,
}

impl LowRankCouplings {
    #[inline]
    pub(crate) fn weight(&self, l: usize, k: usize) -> f64 {
        self.u[l] * self.u[k] + self.s * self.v[l] * self.v[k]
    }

    /// `sum_l u[l] x[l]` and `sum_l v[l] x[l]`.
    pub(crate) fn projections(&self, x: &[i8]) -> (f64, f64) {
        x.iter()
            .zip(self.u.iter().zip(&self.v))
            .fold((0.0, 0.0), |(a, b), (&xi, (&ui, &vi))| {
                let xi = f64::from(xi);
                (a + ui * xi, b + vi * xi)
            })
    }

    /// `sum_l u[l]^2 + s sum_l v[l]^2`.
    pub(crate) fn trace(&self) -> f64 {
        let uu: f64 = self.u.iter().map(|a| a * a).sum();
        let vv: f64 = self.v.iter().map(|a| a * a).sum();
        uu + self.s * vv
    }

    pub(crate) fn hamiltonian_from(&self, pu: f64, pv: f64) -> f64 {
        0.5 * (pu * pu + self.s * pv * pv - self.trace())
    }
}

#[derive(Clone, Debug)]
pub(crate) enum Couplings {
    Sparse(SparseCouplings),
    LowRank(LowRankCouplings),
}

/// Symmetric weighted graph with zero diagonal.
///
/// Weights are either stored as an explicit list of unordered pairs or, for
/// fully connected rank-2 instances, implicitly through the per-vertex
/// amplitudes (`O(n)` memory). Both forms answer every query identically.
#[derive(Clone, Debug)]
pub struct MaxCutInstance {
    n: usize,
    couplings: Couplings,
    metadata: Metadata,
}

impl MaxCutInstance {
    /// Builds an instance from 0-based unordered pairs. Pairs given as
    /// `(k, l)` with `k > l` are normalized; self-loops, out-of-range indices,
    /// duplicates and non-finite weights are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if n == 0 {
            return Err(Error::input("instance needs at least one vertex"));
        }
        let mut list = Vec::new();
        for (a, b, w) in edges {
            if a == b {
                return Err(Error::input(format!("self-loop at vertex {a}")));
            }
            let (l, k) = if a < b { (a, b) } else { (b, a) };
            if k >= n {
                return Err(Error::input(format!("vertex {k} out of range for n = {n}")));
            }
            if !w.is_finite() {
                return Err(Error::input(format!("non-finite weight on pair ({l}, {k})")));
            }
            list.push(Edge { l, k, w });
        }
        list.sort_by(|a, b| (a.l, a.k).cmp(&(b.l, b.k)));
        if let Some(d) = list.windows(2).find(|p| p[0].l == p[1].l && p[0].k == p[1].k) {
            return Err(Error::input(format!(
                "duplicate pair ({}, {})",
                d[0].l, d[0].k
            )));
        }
        Ok(MaxCutInstance {
            n,
            couplings: Couplings::Sparse(SparseCouplings::build(n, list)),
            metadata: Metadata::new(),
        })
    }

    /// Dense constructor from a weight function on `l < k`; zero weights are not stored.
    pub fn from_fn(n: usize, mut weight: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut edges = Vec::new();
        for l in 0..n {
            for k in l + 1..n {
                let w = weight(l, k);
                if w != 0.0 {
                    edges.push((l, k, w));
                }
            }
        }
        Self::from_edges(n, edges)
    }

    /// Couplings `w = u u^T + s v v^T` off the diagonal, stored implicitly.
    pub fn from_low_rank(u: Vec<f64>, v: Vec<f64>, sign: Sign) -> Result<Self> {
        check_len(u.len(), v.len())?;
        if u.is_empty() {
            return Err(Error::input("instance needs at least one vertex"));
        }
        if u.iter().chain(&v).any(|a| !a.is_finite()) {
            return Err(Error::input("non-finite amplitude"));
        }
        Ok(MaxCutInstance {
            n: u.len(),
            couplings: Couplings::LowRank(LowRankCouplings {
                u,
                v,
                s: sign.value(),
            }),
            metadata: Metadata::new(),
        })
    }

    /// Couplings realized by an encoding:
    /// `w[l][k] = eps[l] eps[k] + s sigma[l] sigma[k] eta[p(l)] eta[p(k)]`.
    pub fn from_encoding(enc: &Rank2Encoding) -> Self {
        let mut inst = Self::from_low_rank(enc.epsilon(), enc.coupled_eta(), enc.sign())
            .expect("encoding amplitudes are finite and non-empty");
        inst.metadata.insert("family", "rank2");
        inst
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn metadata(&self) -> &Metadata {
        &self.metadata
    }

    pub fn metadata_mut(&mut self) -> &mut Metadata {
        &mut self.metadata
    }

    pub fn with_metadata(mut self, metadata: Metadata) -> Self {
        self.metadata = metadata;
        self
    }

    pub(crate) fn couplings(&self) -> &Couplings {
        &self.couplings
    }

    /// True if weights are held implicitly in rank-2 form.
    pub fn is_low_rank(&self) -> bool {
        matches!(self.couplings, Couplings::LowRank(_))
    }

    pub fn weight(&self, l: usize, k: usize) -> f64 {
        if l == k {
            return 0.0;
        }
        match &self.couplings {
            Couplings::LowRank(lr) => lr.weight(l, k),
            Couplings::Sparse(sp) => {
                let (a, b) = if l < k { (l, k) } else { (k, l) };
                sp.neighbors(a)
                    .iter()
                    .find(|(j, _)| *j == b)
                    .map_or(0.0, |&(_, w)| w)
            }
        }
    }

    /// Stored pairs; for implicit instances, every pair with a nonzero weight.
    pub fn edges(&self) -> Box<dyn Iterator<Item = Edge> + '_> {
        match &self.couplings {
            Couplings::Sparse(sp) => Box::new(sp.edges.iter().copied()),
            Couplings::LowRank(lr) => {
                let n = self.n;
                Box::new((0..n).flat_map(move |l| {
                    (l + 1..n).filter_map(move |k| {
                        let w = lr.weight(l, k);
                        (w != 0.0).then_some(Edge { l, k, w })
                    })
                }))
            }
        }
    }

    /// Number of unordered pairs with a nonzero weight.
    pub fn nonzero_pairs(&self) -> usize {
        match &self.couplings {
            Couplings::Sparse(sp) => sp.edges.iter().filter(|e| e.w != 0.0).count(),
            Couplings::LowRank(_) => self.edges().count(),
        }
    }

    pub fn pair_count(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    /// Fraction of unordered pairs carrying a nonzero weight.
    pub fn density(&self) -> f64 {
        match self.pair_count() {
            0 => 0.0,
            pairs => self.nonzero_pairs() as f64 / pairs as f64,
        }
    }

    /// `S = sum_{l<k} w[l][k]`.
    pub fn total_weight(&self) -> f64 {
        match &self.couplings {
            Couplings::Sparse(sp) => sp.edges.iter().map(|e| e.w).sum(),
            Couplings::LowRank(lr) => {
                let su: f64 = lr.u.iter().sum();
                let sv: f64 = lr.v.iter().sum();
                lr.hamiltonian_from(su, sv)
            }
        }
    }

    /// Sum of `|w|` over pairs; used as a scale for tolerances.
    pub fn absolute_weight(&self) -> f64 {
        self.edges().map(|e| e.w.abs()).sum()
    }

    /// `W = sum over pairs with x[l] != x[k] of w[l][k]`.
    pub fn cut_value(&self, x: &SpinConfig) -> Result<f64> {
        check_len(self.n, x.len())?;
        let xs = x.as_slice();
        Ok(match &self.couplings {
            Couplings::Sparse(sp) => sp
                .edges
                .iter()
                .filter(|e| xs[e.l] != xs[e.k])
                .map(|e| e.w)
                .sum(),
            Couplings::LowRank(lr) => {
                let (pu, pv) = lr.projections(xs);
                0.5 * (self.total_weight() - lr.hamiltonian_from(pu, pv))
            }
        })
    }

    /// `H = sum_{l<k} w[l][k] x[l] x[k]`.
    pub fn hamiltonian(&self, x: &SpinConfig) -> Result<f64> {
        check_len(self.n, x.len())?;
        let xs = x.as_slice();
        Ok(match &self.couplings {
            Couplings::Sparse(sp) => sp
                .edges
                .iter()
                .map(|e| e.w * f64::from(xs[e.l] * xs[e.k]))
                .sum(),
            Couplings::LowRank(lr) => {
                let (pu, pv) = lr.projections(xs);
                lr.hamiltonian_from(pu, pv)
            }
        })
    }

    /// Local fields `h[l] = sum_{k != l} w[l][k] x[k]`.
    pub fn local_fields(&self, x: &SpinConfig) -> Result<Vec<f64>> {
        check_len(self.n, x.len())?;
        let xs = x.as_slice();
        Ok(match &self.couplings {
            Couplings::Sparse(sp) => (0..self.n)
                .map(|l| {
                    sp.neighbors(l)
                        .iter()
                        .map(|&(k, w)| w * f64::from(xs[k]))
                        .sum()
                })
                .collect(),
            Couplings::LowRank(lr) => {
                let (pu, pv) = lr.projections(xs);
                (0..self.n)
                    .map(|l| {
                        let self_term = (lr.u[l] * lr.u[l] + lr.s * lr.v[l] * lr.v[l]) * f64::from(xs[l]);
                        lr.u[l] * pu + lr.s * lr.v[l] * pv - self_term
                    })
                    .collect()
            }
        })
    }

    /// Materialized copy with explicit pair storage.
    pub fn to_sparse(&self) -> MaxCutInstance {
        match &self.couplings {
            Couplings::Sparse(_) => self.clone(),
            Couplings::LowRank(_) => {
                let edges: Vec<Edge> = self.edges().collect();
                MaxCutInstance {
                    n: self.n,
                    couplings: Couplings::Sparse(SparseCouplings::build(self.n, edges)),
                    metadata: self.metadata.clone(),
                }
            }
        }
    }

    /// Dense row-major `n x n` weight matrix with zero diagonal.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n;
        let mut m = vec![0.0; n * n];
        for e in self.edges() {
            m[e.l * n + e.k] = e.w;
            m[e.k * n + e.l] = e.w;
        }
        m
    }
}

impl PartialEq for MaxCutInstance {
    /// Equal vertex count, metadata and nonzero weights, independent of storage.
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.metadata == other.metadata
            && self
                .edges()
                .filter(|e| e.w != 0.0)
                .eq(other.edges().filter(|e| e.w != 0.0))
    }
}

/// Incrementally maintained Hamiltonian of one configuration under batch flips.
pub(crate) struct EnergyTracker<'a> {
    inst: &'a MaxCutInstance,
    total: f64,
    hamiltonian: f64,
    proj: (f64, f64),
    mark: Vec<bool>,
}

impl<'a> EnergyTracker<'a> {
    pub(crate) fn new(inst: &'a MaxCutInstance, x: &SpinConfig) -> Result<Self> {
        let hamiltonian = inst.hamiltonian(x)?;
        let proj = match inst.couplings() {
            Couplings::LowRank(lr) => lr.projections(x.as_slice()),
            Couplings::Sparse(_) => (0.0, 0.0),
        };
        Ok(EnergyTracker {
            inst,
            total: inst.total_weight(),
            hamiltonian,
            proj,
            mark: vec![false; inst.n()],
        })
    }

    pub(crate) fn hamiltonian(&self) -> f64 {
        self.hamiltonian
    }

    pub(crate) fn cut_value(&self) -> f64 {
        0.5 * (self.total - self.hamiltonian)
    }

    /// Applies the flip of `flips` (already applied to `x_after`) and updates the energy.
    pub(crate) fn commit(&mut self, x_after: &SpinConfig, flips: &[usize]) {
        let xs = x_after.as_slice();
        match self.inst.couplings() {
            Couplings::LowRank(lr) => {
                let (mut pu, mut pv) = self.proj;
                for &l in flips {
                    // x[l] was -xs[l] before the flip
                    let x = 2.0 * f64::from(xs[l]);
                    pu += lr.u[l] * x;
                    pv += lr.v[l] * x;
                }
                self.proj = (pu, pv);
                self.hamiltonian = lr.hamiltonian_from(pu, pv);
            }
            Couplings::Sparse(sp) => {
                for &l in flips {
                    self.mark[l] = true;
                }
                // boundary pairs (one endpoint flipped) change sign; walk the
                // smaller side of the partition
                let boundary = if flips.len() <= self.inst.n() / 2 {
                    boundary_sum(sp, xs, &self.mark, flips.iter().copied(), false)
                } else {
                    let outside = (0..self.inst.n()).filter(|&l| !self.mark[l]);
                    boundary_sum(sp, xs, &self.mark, outside, true)
                };
                for &l in flips {
                    self.mark[l] = false;
                }
                // post-flip boundary sum is `boundary`, pre-flip it was `-boundary`
                self.hamiltonian += 2.0 * boundary;
            }
        }
    }
}

fn boundary_sum(
    sp: &SparseCouplings,
    xs: &[i8],
    mark: &[bool],
    side: impl Iterator<Item = usize>,
    other_marked: bool,
) -> f64 {
    let mut acc = 0.0;
    for l in side {
        let xl = f64::from(xs[l]);
        for &(k, w) in sp.neighbors(l) {
            if mark[k] == other_marked {
                acc += w * xl * f64::from(xs[k]);
            }
        }
    }
    acc
}
