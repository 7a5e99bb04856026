//! In-memory neighborhood expansion over the pruned CSR.
//!
//! Partitions `0..k-1` are grown one after another from a core set `C` and a
//! per-partition secondary set `S_i`. High-degree vertices belong to every
//! `S_i` from the start: they are never expanded, never enter the heap and
//! their (absent) adjacency lists are never read. Assigned edges are not
//! invalidated eagerly; after each partition a clean-up pass strips entries
//! pointing into `C` or `S_i` from the lists of vertices left in `S_i \ C`,
//! which are the only lists a later partition can read again. The last
//! partition takes every remaining in-memory edge.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::bitset::BitSet;
use crate::graph::{HighDegreeSet, PrunedCsr};
use crate::heap::ExternalDegreeHeap;
use crate::id::VertexId;
use crate::sink::AssignmentSink;

/// Optional self-checks, off by default.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Instrumentation {
    /// Count adjacency reads of vertices that were already in the core when
    /// an earlier partition completed.
    pub access_log: bool,
    /// Recompute every heap key from scratch after each expansion step.
    pub recount_ext_degrees: bool,
    /// Scan cleaned lists after each clean-up for entries into `C ∪ S_i`.
    pub verify_cleanup: bool,
}

impl Instrumentation {
    pub fn all() -> Self {
        Instrumentation {
            access_log: true,
            recount_ext_degrees: true,
            verify_cleanup: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NeppError {
    InvalidK,
    /// The last partition received more than the capacity.
    LastPartitionOverflow {
        size: u64,
        capacity: u64,
    },
}

impl fmt::Display for NeppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NeppError::InvalidK => f.write_str("k must be at least 1"),
            NeppError::LastPartitionOverflow { size, capacity } => {
                write!(f, "last partition holds {size} edges, above capacity {capacity}")
            }
        }
    }
}

/// Violation counters gathered when [`Instrumentation`] is enabled.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Diagnostics {
    pub sealed_core_reads: u64,
    pub ext_degree_mismatches: u64,
    pub cleanup_leftovers: u64,
    pub adjacency_reads: u64,
}

/// State after the in-memory phase, handed on to streaming.
#[derive(Clone, Debug)]
pub struct PartitionState {
    pub k: usize,
    /// Global core set.
    pub core: BitSet,
    /// Per partition, every vertex incident to an edge assigned to it.
    pub cover: Vec<BitSet>,
    pub sizes: Vec<u64>,
    /// `ceil(num_inmem_edges / k)`.
    pub capacity: u64,
    /// Next id examined by sequential initialization.
    pub init_cursor: usize,
    /// Partition whose expansion ran out of seed vertices, if any.
    pub exhausted_at: Option<usize>,
    /// Column entries dropped by clean-up over the whole run.
    pub cleaned_entries: u64,
    /// Column length at the start of the run.
    pub initial_entries: u64,
    /// Edges redirected to a later partition because the current one was full.
    pub spilled_over: u64,
    /// Low-degree vertices that ended in some `S_i` but not in `C`.
    pub secondary_only: BitSet,
    pub diagnostics: Diagnostics,
}

impl PartitionState {
    /// Fraction of column entries removed by clean-up.
    pub fn cleaned_fraction(&self) -> f64 {
        if self.initial_entries == 0 {
            0.0
        } else {
            self.cleaned_entries as f64 / self.initial_entries as f64
        }
    }

    pub fn bitset_bytes(&self) -> usize {
        self.core.bytes() + self.cover.iter().map(BitSet::bytes).sum::<usize>()
    }
}

/// Runs NE++ on `csr`, writing every in-memory edge to `sink` exactly once.
///
/// The CSR's size fields are consumed by lazy removal; rebuild it before a
/// second run.
pub fn partition_in_memory<I, A>(
    csr: &mut PrunedCsr<I>,
    highs: &HighDegreeSet,
    k: usize,
    sink: &mut A,
    instrument: Instrumentation,
) -> Result<PartitionState, NeppError>
where
    I: VertexId,
    A: AssignmentSink<I>,
{
    if k == 0 {
        return Err(NeppError::InvalidK);
    }
    let mut run = Expansion::new(csr, highs, k, sink, instrument);
    for i in 0..k - 1 {
        if !run.expand_partition(i) {
            break;
        }
    }
    run.assign_remaining();
    run.finish()
}

struct Expansion<'a, I: VertexId, A> {
    csr: &'a mut PrunedCsr<I>,
    highs: &'a HighDegreeSet,
    sink: &'a mut A,
    k: usize,
    capacity: u64,
    core: BitSet,
    /// Low-degree members of `S_current`.
    member: BitSet,
    members: Vec<usize>,
    /// Low-degree endpoints of edges spilled into a partition before its
    /// expansion starts; they join that partition's secondary set.
    pending: Vec<Vec<usize>>,
    ever_secondary: BitSet,
    cover: Vec<BitSet>,
    sizes: Vec<u64>,
    heap: ExternalDegreeHeap,
    current: usize,
    cursor: usize,
    exhausted_at: Option<usize>,
    cleaned: u64,
    initial_entries: u64,
    spilled_over: u64,
    instrument: Instrumentation,
    sealed: BitSet,
    diag: Diagnostics,
}

impl<'a, I: VertexId, A: AssignmentSink<I>> Expansion<'a, I, A> {
    fn new(
        csr: &'a mut PrunedCsr<I>,
        highs: &'a HighDegreeSet,
        k: usize,
        sink: &'a mut A,
        instrument: Instrumentation,
    ) -> Self {
        let n = csr.num_vertices();
        let initial_entries = (0..n).map(|v| csr.valid_degree(v) as u64).sum();
        Expansion {
            capacity: csr.num_inmem_edges.div_ceil(k as u64),
            csr,
            highs,
            sink,
            k,
            core: BitSet::new(n),
            member: BitSet::new(n),
            members: Vec::new(),
            pending: vec![Vec::new(); k],
            ever_secondary: BitSet::new(n),
            cover: vec![BitSet::new(n); k],
            sizes: vec![0; k],
            heap: ExternalDegreeHeap::new(n),
            current: 0,
            cursor: 0,
            exhausted_at: None,
            cleaned: 0,
            initial_entries,
            spilled_over: 0,
            sealed: BitSet::new(if instrument.access_log { n } else { 0 }),
            instrument,
            diag: Diagnostics::default(),
        }
    }

    #[inline]
    fn is_high(&self, v: usize) -> bool {
        self.highs.contains(v)
    }

    /// `v ∈ C ∪ S_current`, with high-degree vertices always inside.
    #[inline]
    fn is_interior(&self, v: usize) -> bool {
        self.highs.contains(v) || self.core.contains(v) || self.member.contains(v)
    }

    #[inline]
    fn log_read(&mut self, v: usize) {
        if self.instrument.access_log {
            self.diag.adjacency_reads += 1;
            if self.sealed.contains(v) {
                self.diag.sealed_core_reads += 1;
            }
        }
    }

    fn join_secondary(&mut self, v: usize) {
        if self.member.insert(v) {
            self.members.push(v);
            self.ever_secondary.insert(v);
        }
    }

    /// Expands partition `i` until it is full. Returns `false` once no seed
    /// vertex is left, which ends the in-memory phase.
    fn expand_partition(&mut self, i: usize) -> bool {
        self.current = i;
        for v in core::mem::take(&mut self.pending[i]) {
            self.join_secondary(v);
        }
        while self.sizes[i] < self.capacity {
            if let Some((v, _)) = self.heap.pop() {
                self.move_to_core(v);
            } else if let Some(seed) = self.initialize() {
                if !self.member.contains(seed) {
                    self.move_to_secondary(seed, false);
                }
                self.move_to_core(seed);
            } else {
                self.exhausted_at = Some(i);
                break;
            }
            if self.instrument.recount_ext_degrees {
                self.recount();
            }
        }
        self.clean_up();
        self.heap.clear();
        for v in self.members.drain(..) {
            self.member.remove(v);
        }
        if self.instrument.access_log {
            self.sealed.union_with(&self.core);
        }
        self.exhausted_at.is_none()
    }

    /// Sequential search for the next low-degree, non-core vertex with at
    /// least one valid entry. Vertices passed over join the core so the
    /// cursor never has to return to them.
    fn initialize(&mut self) -> Option<usize> {
        let n = self.csr.num_vertices();
        while self.cursor < n {
            let v = self.cursor;
            if self.is_high(v) || self.core.contains(v) {
                self.cursor += 1;
                continue;
            }
            self.log_read(v);
            if self.csr.valid_degree(v) == 0 {
                self.core.insert(v);
                self.cursor += 1;
                continue;
            }
            return Some(v);
        }
        None
    }

    fn move_to_core(&mut self, v: usize) {
        debug_assert!(!self.is_high(v) && !self.core.contains(v));
        self.core.insert(v);
        self.log_read(v);
        let out = self.csr.out_range(v);
        let inn = self.csr.in_range(v);
        for pos in out.chain(inn) {
            let u = self.csr.column[pos].index();
            if !self.is_interior(u) {
                self.move_to_secondary(u, true);
            }
        }
    }

    /// Adds `v` to `S_current`, assigning its edges into `C ∪ S_current`.
    fn move_to_secondary(&mut self, v: usize, into_heap: bool) {
        debug_assert!(!self.is_interior(v));
        self.join_secondary(v);
        self.log_read(v);
        let mut ext = self.csr.valid_degree(v) as u64;
        let out = self.csr.out_range(v);
        let out_end = out.end;
        let inn = self.csr.in_range(v);
        for pos in out.chain(inn) {
            let u = self.csr.column[pos].index();
            if !self.is_interior(u) {
                continue;
            }
            ext -= 1;
            if self.heap.contains(u) {
                self.heap.decrement(u);
            }
            if pos < out_end {
                self.assign(v, u);
            } else {
                self.assign(u, v);
            }
        }
        if into_heap {
            self.heap.push(v, ext);
        }
    }

    /// Assigns `(x, y)` to the current partition, or spills it to the next
    /// partition with room when the current one is full.
    fn assign(&mut self, x: usize, y: usize) {
        let mut target = self.current;
        if self.sizes[target] >= self.capacity {
            target += 1;
            while target < self.k - 1 && self.sizes[target] >= self.capacity {
                target += 1;
            }
            self.spilled_over += 1;
            for w in [x, y] {
                if !self.is_high(w) {
                    self.pending[target].push(w);
                }
            }
        }
        self.sizes[target] += 1;
        self.cover[target].insert(x);
        self.cover[target].insert(y);
        self.sink.assign(I::from_index(x), I::from_index(y), target as u32);
    }

    /// Strips entries into `C ∪ S_current` from every list of `S_current \ C`.
    fn clean_up(&mut self) {
        let highs = self.highs;
        for idx in 0..self.members.len() {
            let v = self.members[idx];
            if self.core.contains(v) {
                continue;
            }
            let (core, member) = (&self.core, &self.member);
            let removed = self
                .csr
                .remove_valid_where(v, |u| highs.contains(u) || core.contains(u) || member.contains(u));
            self.cleaned += removed as u64;
        }
        if self.instrument.verify_cleanup {
            for &v in &self.members {
                if self.core.contains(v) {
                    continue;
                }
                let leftovers = self
                    .csr
                    .out_valid(v)
                    .iter()
                    .chain(self.csr.in_valid(v))
                    .filter(|u| self.is_interior(u.index()))
                    .count();
                self.diag.cleanup_leftovers += leftovers as u64;
            }
        }
    }

    /// Last partition: every valid entry still held by a non-core low-degree
    /// vertex. Low-low edges are taken from the out-sublist only, so each is
    /// seen once; edges to high-degree vertices are taken from either
    /// sublist since the other side has no list.
    fn assign_remaining(&mut self) {
        let last = self.k - 1;
        self.current = last;
        for v in 0..self.csr.num_vertices() {
            if self.is_high(v) || self.core.contains(v) {
                continue;
            }
            if self.csr.valid_degree(v) == 0 {
                continue;
            }
            self.log_read(v);
            for pos in self.csr.out_range(v) {
                let u = self.csr.column[pos].index();
                self.assign_to(last, v, u);
            }
            for pos in self.csr.in_range(v) {
                let u = self.csr.column[pos].index();
                if self.is_high(u) {
                    self.assign_to(last, u, v);
                }
            }
        }
    }

    fn assign_to(&mut self, p: usize, x: usize, y: usize) {
        self.sizes[p] += 1;
        self.cover[p].insert(x);
        self.cover[p].insert(y);
        self.sink.assign(I::from_index(x), I::from_index(y), p as u32);
    }

    fn recount(&mut self) {
        let mut mismatches = 0;
        for (v, key) in self.heap.iter() {
            let actual = self
                .csr
                .out_valid(v)
                .iter()
                .chain(self.csr.in_valid(v))
                .filter(|u| !self.is_interior(u.index()))
                .count() as u64;
            if actual != key {
                mismatches += 1;
            }
        }
        self.diag.ext_degree_mismatches += mismatches;
    }

    fn finish(self) -> Result<PartitionState, NeppError> {
        let last = self.k - 1;
        if self.sizes[last] > self.capacity {
            return Err(NeppError::LastPartitionOverflow {
                size: self.sizes[last],
                capacity: self.capacity,
            });
        }
        let mut secondary_only = self.ever_secondary;
        for v in self.core.iter_ones() {
            secondary_only.remove(v);
        }
        Ok(PartitionState {
            k: self.k,
            core: self.core,
            cover: self.cover,
            sizes: self.sizes,
            capacity: self.capacity,
            init_cursor: self.cursor,
            exhausted_at: self.exhausted_at,
            cleaned_entries: self.cleaned,
            initial_entries: self.initial_entries,
            spilled_over: self.spilled_over,
            secondary_only,
            diagnostics: self.diag,
        })
    }
}
