//! Stateful streaming partitioning of the spilled high-to-high edges.
//!
//! The state starts from the in-memory phase's cover bitsets and partition
//! sizes, so the first streamed edges already see where their endpoints are
//! replicated. Scoring is HDRF with exact full degrees.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitset::BitSet;
use crate::graph::{DegreeStats, HighDegreeSet, PrunedCsr};
use crate::id::VertexId;
use crate::nepp::PartitionState;
use crate::sink::AssignmentSink;

/// Full degree of any vertex.
pub trait DegreeLookup {
    fn degree(&self, v: usize) -> u64;
}

impl DegreeLookup for DegreeStats {
    fn degree(&self, v: usize) -> u64 {
        self.degrees.get(v).copied().unwrap_or(0)
    }
}

impl DegreeLookup for [u64] {
    fn degree(&self, v: usize) -> u64 {
        self.get(v).copied().unwrap_or(0)
    }
}

/// Degrees recovered after ingestion: low-degree vertices from their CSR
/// region length, high-degree vertices from the side table.
pub struct FullDegrees<'a, I> {
    pub csr: &'a PrunedCsr<I>,
    pub highs: &'a HighDegreeSet,
}

impl<I: VertexId> DegreeLookup for FullDegrees<'_, I> {
    fn degree(&self, v: usize) -> u64 {
        match self.highs.degree(v) {
            Some(d) => d,
            None if v < self.csr.num_vertices() => self.csr.region_len(v) as u64,
            None => 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HdrfParams {
    /// Weight of the balance term.
    pub lambda: f64,
    /// Keeps the balance denominator positive.
    pub epsilon: f64,
    /// Balance slack; partitions at `alpha * |E| / k` stop taking edges.
    pub alpha: f64,
}

impl Default for HdrfParams {
    fn default() -> Self {
        HdrfParams {
            lambda: 1.1,
            epsilon: 1.0,
            alpha: 1.05,
        }
    }
}

#[derive(Clone, Debug)]
pub struct StreamingState {
    pub cover: Vec<BitSet>,
    pub sizes: Vec<u64>,
    pub params: HdrfParams,
    /// `alpha * |E| / k` over all edges of the graph.
    pub max_size_bound: f64,
    /// Edges placed on the least-loaded partition because none was eligible.
    pub fallbacks: u64,
}

impl StreamingState {
    /// Continues from the in-memory phase.
    pub fn from_partition_state(state: &PartitionState, total_edges: u64, params: HdrfParams) -> Self {
        StreamingState {
            cover: state.cover.clone(),
            sizes: state.sizes.clone(),
            max_size_bound: params.alpha * total_edges as f64 / state.k as f64,
            params,
            fallbacks: 0,
        }
    }

    /// Empty state for pure streaming runs.
    pub fn fresh(k: usize, num_vertices: usize, total_edges: u64, params: HdrfParams) -> Self {
        StreamingState {
            cover: vec![BitSet::new(num_vertices); k],
            sizes: vec![0; k],
            max_size_bound: params.alpha * total_edges as f64 / k as f64,
            params,
            fallbacks: 0,
        }
    }

    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    /// A partition is eligible while one more edge keeps it within the bound.
    #[inline]
    pub fn is_eligible(&self, i: usize) -> bool {
        (self.sizes[i] + 1) as f64 <= self.max_size_bound
    }

    fn least_loaded(&self) -> usize {
        let mut best = 0;
        for (i, &s) in self.sizes.iter().enumerate() {
            if s < self.sizes[best] {
                best = i;
            }
        }
        best
    }

    #[inline]
    fn place<I: VertexId, A: AssignmentSink<I>>(&mut self, u: I, v: I, p: usize, sink: &mut A) {
        self.sizes[p] += 1;
        self.cover[p].insert(u.index());
        self.cover[p].insert(v.index());
        sink.assign(u, v, p as u32);
    }
}

/// HDRF score of placing `(u, v)` on partition `i`.
pub fn hdrf_score(u: usize, v: usize, du: u64, dv: u64, i: usize, st: &StreamingState) -> f64 {
    let (max, min) = size_extremes(&st.sizes);
    hdrf_score_with(u, v, du, dv, i, st, max, min)
}

#[allow(clippy::too_many_arguments)]
#[inline]
fn hdrf_score_with(u: usize, v: usize, du: u64, dv: u64, i: usize, st: &StreamingState, max: u64, min: u64) -> f64 {
    debug_assert!(du + dv > 0);
    let theta_u = du as f64 / (du + dv) as f64;
    let theta_v = 1.0 - theta_u;
    let cover = &st.cover[i];
    let g_u = if cover.contains(u) { 1.0 + (1.0 - theta_u) } else { 0.0 };
    let g_v = if cover.contains(v) { 1.0 + (1.0 - theta_v) } else { 0.0 };
    let balance = st.params.lambda * (max - st.sizes[i]) as f64 / (st.params.epsilon + (max - min) as f64);
    g_u + g_v + balance
}

fn size_extremes(sizes: &[u64]) -> (u64, u64) {
    let max = sizes.iter().copied().max().unwrap_or(0);
    let min = sizes.iter().copied().min().unwrap_or(0);
    (max, min)
}

/// Streams `edges` through HDRF. Each edge goes to the highest-scoring
/// eligible partition, lowest index on ties. Returns the number of edges
/// placed.
pub fn stream_partition<I, E, A, D>(
    edges: impl IntoIterator<Item = Result<(I, I), E>>,
    st: &mut StreamingState,
    degrees: &D,
    sink: &mut A,
) -> Result<u64, E>
where
    I: VertexId,
    A: AssignmentSink<I>,
    D: DegreeLookup + ?Sized,
{
    let mut placed = 0;
    for edge in edges {
        let (a, b) = edge?;
        let (u, v) = (a.index(), b.index());
        let (du, dv) = (degrees.degree(u), degrees.degree(v));
        let (max, min) = size_extremes(&st.sizes);
        let mut best: Option<(usize, f64)> = None;
        for i in 0..st.k() {
            if !st.is_eligible(i) {
                continue;
            }
            let score = hdrf_score_with(u, v, du, dv, i, st, max, min);
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((i, score));
            }
        }
        let target = match best {
            Some((i, _)) => i,
            None => {
                st.fallbacks += 1;
                st.least_loaded()
            }
        };
        st.place(a, b, target, sink);
        placed += 1;
    }
    Ok(placed)
}

/// Uniformly random partition per edge from a seeded generator.
pub fn random_assign<I, E, A>(
    edges: impl IntoIterator<Item = Result<(I, I), E>>,
    st: &mut StreamingState,
    seed: u64,
    sink: &mut A,
) -> Result<u64, E>
where
    I: VertexId,
    A: AssignmentSink<I>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = st.k();
    let mut placed = 0;
    for edge in edges {
        let (u, v) = edge?;
        let p = rng.gen_range(0..k);
        st.place(u, v, p, sink);
        placed += 1;
    }
    Ok(placed)
}

/// Hashes the endpoint with the smaller degree (smaller id on ties).
pub fn degree_hash_assign<I, E, A, D>(
    edges: impl IntoIterator<Item = Result<(I, I), E>>,
    st: &mut StreamingState,
    degrees: &D,
    sink: &mut A,
) -> Result<u64, E>
where
    I: VertexId,
    A: AssignmentSink<I>,
    D: DegreeLookup + ?Sized,
{
    let k = st.k() as u64;
    let mut placed = 0;
    for edge in edges {
        let (u, v) = edge?;
        let key = (degrees.degree(u.index()), u).min((degrees.degree(v.index()), v)).1;
        let p = (mix64(key.to_u64()) % k) as usize;
        st.place(u, v, p, sink);
        placed += 1;
    }
    Ok(placed)
}

/// SplitMix64 finalizer.
fn mix64(mut x: u64) -> u64 {
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}
