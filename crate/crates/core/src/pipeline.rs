//! End-to-end hybrid run: degrees, split, pruned CSR with spilling, NE++,
//! then streaming over the spilled edges.

use alloc::vec::Vec;
use core::fmt;

use crate::bitset::BitSet;
use crate::graph::{
    build_pruned_csr, classify_vertices, compute_degrees, estimate_memory, DegreeStats, EdgeSource, GraphError,
    HighDegreeSet, SpillSink,
};
use crate::id::VertexId;
use crate::nepp::{partition_in_memory, Diagnostics, Instrumentation, NeppError, PartitionState};
use crate::sink::AssignmentSink;
use crate::streaming::{degree_hash_assign, random_assign, stream_partition, FullDegrees, HdrfParams, StreamingState};

/// Spill storage that can be replayed once ingestion is done.
pub trait SpillStore<I: VertexId>: SpillSink<I> {
    type Replay<'a>: Iterator<Item = Result<(I, I), Self::Error>>
    where
        Self: 'a;

    fn replay(&mut self) -> Result<Self::Replay<'_>, Self::Error>;
}

type VecReplay<'a, I> = core::iter::Map<
    core::iter::Copied<core::slice::Iter<'a, (I, I)>>,
    fn((I, I)) -> Result<(I, I), core::convert::Infallible>,
>;

impl<I: VertexId> SpillStore<I> for Vec<(I, I)> {
    type Replay<'a> = VecReplay<'a, I>;

    fn replay(&mut self) -> Result<Self::Replay<'_>, core::convert::Infallible> {
        Ok(self
            .iter()
            .copied()
            .map(Ok as fn((I, I)) -> Result<(I, I), core::convert::Infallible>))
    }
}

/// How the spilled edges are placed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StreamingMode {
    Hdrf,
    Random { seed: u64 },
    DegreeHash,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HepConfig {
    pub k: usize,
    pub tau: f64,
    pub hdrf: HdrfParams,
    pub streaming: StreamingMode,
    pub instrument: Instrumentation,
}

impl HepConfig {
    pub fn new(k: usize, tau: f64) -> Self {
        HepConfig {
            k,
            tau,
            hdrf: HdrfParams::default(),
            streaming: StreamingMode::Hdrf,
            instrument: Instrumentation::default(),
        }
    }
}

/// Phases reported to a [`PhaseObserver`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Degrees,
    Build,
    InMemory,
    Streaming,
}

/// Hook for timing phases; the core crate has no clock.
pub trait PhaseObserver {
    fn begin(&mut self, _phase: Phase) {}
    fn end(&mut self, _phase: Phase) {}
}

impl PhaseObserver for () {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HepError<E> {
    Config(&'static str),
    Graph(GraphError<E>),
    InMemory(NeppError),
    Streaming(E),
}

impl<E: fmt::Display> fmt::Display for HepError<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HepError::Config(msg) => write!(f, "invalid configuration: {msg}"),
            HepError::Graph(e) => write!(f, "{e}"),
            HepError::InMemory(e) => write!(f, "in-memory phase: {e}"),
            HepError::Streaming(e) => write!(f, "streaming phase: {e}"),
        }
    }
}

/// Everything a run produces apart from the records themselves.
#[derive(Clone, Debug)]
pub struct HepRun {
    pub stats: DegreeStats,
    pub highs: HighDegreeSet,
    pub spilled: u64,
    pub num_inmem_edges: u64,
    /// Sizes after the in-memory phase.
    pub inmem_sizes: Vec<u64>,
    pub capacity: u64,
    pub exhausted_at: Option<usize>,
    pub cleaned_entries: u64,
    pub initial_entries: u64,
    pub spilled_over: u64,
    pub diagnostics: Diagnostics,
    pub core: BitSet,
    /// Final per-partition cover.
    pub cover: Vec<BitSet>,
    pub sizes: Vec<u64>,
    pub fallbacks: u64,
    pub max_size_bound: f64,
    pub estimated_bytes: u64,
    pub column_bytes: u64,
    pub csr_bytes: u64,
    pub bitset_bytes: u64,
}

impl HepRun {
    pub fn cleaned_fraction(&self) -> f64 {
        if self.initial_entries == 0 {
            0.0
        } else {
            self.cleaned_entries as f64 / self.initial_entries as f64
        }
    }

    pub fn replication_factor(&self) -> f64 {
        crate::metrics::replication_factor_from_cover(&self.cover, self.stats.num_active_vertices.max(1))
    }

    pub fn cover_counts(&self) -> Vec<u64> {
        self.cover.iter().map(|c| c.count_ones() as u64).collect()
    }
}

/// Runs the hybrid partitioner over `source`, spilling high-to-high edges to
/// `spill` and writing all assignments to `sink`.
pub fn run_hep<I, S, P, A, O>(
    source: &mut S,
    spill: &mut P,
    sink: &mut A,
    cfg: &HepConfig,
    observer: &mut O,
) -> Result<HepRun, HepError<S::Error>>
where
    I: VertexId,
    S: EdgeSource<I>,
    P: SpillStore<I, Error = S::Error>,
    A: AssignmentSink<I>,
    O: PhaseObserver + ?Sized,
{
    if cfg.k == 0 {
        return Err(HepError::Config("k must be at least 1"));
    }
    if cfg.tau.is_nan() || cfg.tau <= 0.0 {
        return Err(HepError::Config("tau must be positive"));
    }
    if cfg.hdrf.alpha.is_nan() || cfg.hdrf.alpha < 1.0 {
        return Err(HepError::Config("alpha must be at least 1"));
    }

    observer.begin(Phase::Degrees);
    let stats = compute_degrees(source).map_err(HepError::Graph)?;
    let highs = classify_vertices(&stats, cfg.tau);
    observer.end(Phase::Degrees);

    observer.begin(Phase::Build);
    let (mut csr, spilled) = build_pruned_csr(source, &stats, &highs, spill).map_err(HepError::Graph)?;
    observer.end(Phase::Build);

    observer.begin(Phase::InMemory);
    let state: PartitionState =
        partition_in_memory(&mut csr, &highs, cfg.k, sink, cfg.instrument).map_err(HepError::InMemory)?;
    observer.end(Phase::InMemory);

    observer.begin(Phase::Streaming);
    let mut st = StreamingState::from_partition_state(&state, stats.num_edges, cfg.hdrf);
    let edges = spill.replay().map_err(HepError::Streaming)?;
    match cfg.streaming {
        StreamingMode::Hdrf => {
            let degrees = FullDegrees {
                csr: &csr,
                highs: &highs,
            };
            stream_partition(edges, &mut st, &degrees, sink)
        }
        StreamingMode::Random { seed } => random_assign(edges, &mut st, seed, sink),
        StreamingMode::DegreeHash => {
            let degrees = FullDegrees {
                csr: &csr,
                highs: &highs,
            };
            degree_hash_assign(edges, &mut st, &degrees, sink)
        }
    }
    .map_err(HepError::Streaming)?;
    observer.end(Phase::Streaming);

    Ok(HepRun {
        estimated_bytes: estimate_memory(&stats, cfg.tau, cfg.k, I::BYTES),
        column_bytes: csr.column_bytes() as u64,
        csr_bytes: csr.structure_bytes() as u64,
        bitset_bytes: state.bitset_bytes() as u64,
        num_inmem_edges: csr.num_inmem_edges,
        inmem_sizes: state.sizes.clone(),
        capacity: state.capacity,
        exhausted_at: state.exhausted_at,
        cleaned_entries: state.cleaned_entries,
        initial_entries: state.initial_entries,
        spilled_over: state.spilled_over,
        diagnostics: state.diagnostics,
        core: state.core,
        cover: st.cover,
        sizes: st.sizes,
        fallbacks: st.fallbacks,
        max_size_bound: st.max_size_bound,
        stats,
        highs,
        spilled,
    })
}
