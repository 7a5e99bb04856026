//! Ingestion: degree statistics, high/low-degree split, pruned CSR
//! construction with high-to-high spilling, and memory planning.
//!
//! The CSR keeps, for every low-degree vertex, an out-sublist (neighbors for
//! which the vertex was the left-hand endpoint in the input) followed by an
//! in-sublist. High-degree vertices own no entries: edges to them are reached
//! from the low-degree side, and edges between two of them are written to the
//! spill sink instead.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::convert::Infallible;
use core::fmt;

use crate::bitset::BitSet;
use crate::id::VertexId;

/// Sequential, restartable source of `(u, v)` edges.
///
/// Construction reads the source twice: once for degrees and once to fill the
/// column array.
pub trait EdgeSource<I: VertexId> {
    type Error;
    type Edges<'a>: Iterator<Item = Result<(I, I), Self::Error>>
    where
        Self: 'a;

    fn edges(&mut self) -> Result<Self::Edges<'_>, Self::Error>;
}

type SliceEdges<'s, I> =
    core::iter::Map<core::iter::Copied<core::slice::Iter<'s, (I, I)>>, fn((I, I)) -> Result<(I, I), Infallible>>;

impl<'s, I: VertexId> EdgeSource<I> for &'s [(I, I)] {
    type Error = Infallible;
    type Edges<'a>
        = SliceEdges<'s, I>
    where
        Self: 'a;

    fn edges(&mut self) -> Result<Self::Edges<'_>, Infallible> {
        Ok(self.iter().copied().map(Ok as fn((I, I)) -> Result<(I, I), Infallible>))
    }
}

/// Destination for edges between two high-degree vertices.
pub trait SpillSink<I: VertexId> {
    type Error;

    fn push(&mut self, u: I, v: I) -> Result<(), Self::Error>;
}

impl<I: VertexId> SpillSink<I> for Vec<(I, I)> {
    type Error = Infallible;

    fn push(&mut self, u: I, v: I) -> Result<(), Infallible> {
        Vec::push(self, (u, v));
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphError<E> {
    /// The edge source failed.
    Source(E),
    /// The spill sink failed.
    Spill(E),
    /// Column offsets do not fit the configured id width.
    OffsetOverflow { entries: u64, id_bytes: usize },
    /// The second pass saw different edges than the first.
    SourceChanged,
}

impl<E: fmt::Display> fmt::Display for GraphError<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::Source(e) => write!(f, "edge source: {e}"),
            GraphError::Spill(e) => write!(f, "spill sink: {e}"),
            GraphError::OffsetOverflow { entries, id_bytes } => write!(
                f,
                "{entries} column entries do not fit {id_bytes}-byte offsets; use a wider id type"
            ),
            GraphError::SourceChanged => f.write_str("edge source yielded different edges on the second pass"),
        }
    }
}

/// Per-vertex degrees and the aggregates derived from them.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeStats {
    /// Degree per vertex id in `0..num_vertices`.
    pub degrees: Vec<u64>,
    /// Size of the id space, `max_id + 1`.
    pub num_vertices: usize,
    /// Vertices with degree at least one.
    pub num_active_vertices: usize,
    /// Edges excluding self-loops.
    pub num_edges: u64,
    /// Skipped self-loop records.
    pub self_loops: u64,
    /// `2 * num_edges / num_active_vertices`, or 0 for an empty graph.
    pub mean_degree: f64,
    /// Degree to vertex count, active vertices only.
    pub histogram: BTreeMap<u64, u64>,
    /// `(c, sum of d(v) over d(v) <= c)` for every distinct degree `c`,
    /// ascending.
    pub suffix_volume: Vec<(u64, u64)>,
}

impl DegreeStats {
    pub fn from_degrees(degrees: Vec<u64>, self_loops: u64) -> Self {
        let num_vertices = degrees.len();
        let mut histogram = BTreeMap::new();
        let mut volume = 0u64;
        for &d in &degrees {
            if d > 0 {
                *histogram.entry(d).or_insert(0u64) += 1;
            }
            volume += d;
        }
        let num_active_vertices = histogram.values().sum::<u64>() as usize;
        let num_edges = volume / 2;
        let mean_degree = if num_active_vertices == 0 {
            0.0
        } else {
            volume as f64 / num_active_vertices as f64
        };
        let mut running = 0u64;
        let suffix_volume = histogram
            .iter()
            .map(|(&d, &count)| {
                running += d * count;
                (d, running)
            })
            .collect();
        DegreeStats {
            degrees,
            num_vertices,
            num_active_vertices,
            num_edges,
            self_loops,
            mean_degree,
            histogram,
            suffix_volume,
        }
    }

    pub fn max_degree(&self) -> u64 {
        self.histogram.keys().next_back().copied().unwrap_or(0)
    }

    /// Sum of degrees over vertices with degree at most `cutoff`.
    pub fn volume_up_to(&self, cutoff: u64) -> u64 {
        match self.suffix_volume.partition_point(|&(d, _)| d <= cutoff) {
            0 => 0,
            i => self.suffix_volume[i - 1].1,
        }
    }

    /// Column entries a pruned CSR would hold for `tau`.
    pub fn low_volume(&self, tau: f64) -> u64 {
        let threshold = tau * self.mean_degree;
        let i = self
            .suffix_volume
            .partition_point(|&(d, _)| !is_high_degree(d, threshold));
        match i {
            0 => 0,
            i => self.suffix_volume[i - 1].1,
        }
    }
}

#[inline]
fn is_high_degree(degree: u64, threshold: f64) -> bool {
    degree as f64 > threshold
}

/// First pass over the edge list.
///
/// Self-loops are tallied in `self_loops` and contribute to neither degrees
/// nor the edge count. Parallel edges count individually.
pub fn compute_degrees<I, S>(source: &mut S) -> Result<DegreeStats, GraphError<S::Error>>
where
    I: VertexId,
    S: EdgeSource<I>,
{
    let mut degrees: Vec<u64> = Vec::new();
    let mut self_loops = 0u64;
    for edge in source.edges().map_err(GraphError::Source)? {
        let (u, v) = edge.map_err(GraphError::Source)?;
        let (u, v) = (u.index(), v.index());
        let hi = u.max(v);
        if hi >= degrees.len() {
            degrees.resize(hi + 1, 0);
        }
        if u == v {
            self_loops += 1;
            continue;
        }
        degrees[u] += 1;
        degrees[v] += 1;
    }
    Ok(DegreeStats::from_degrees(degrees, self_loops))
}

/// Vertices whose degree exceeds `tau` times the mean degree.
#[derive(Clone, Debug, PartialEq)]
pub struct HighDegreeSet {
    pub membership: BitSet,
    /// Smallest degree classified high, if any vertex is.
    pub threshold_degree: Option<u64>,
    pub tau: f64,
    /// Exact degrees of members; the pruned CSR cannot reproduce them.
    pub side_degrees: BTreeMap<usize, u64>,
}

impl HighDegreeSet {
    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        self.membership.contains(v)
    }

    pub fn len(&self) -> usize {
        self.side_degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.side_degrees.is_empty()
    }

    pub fn degree(&self, v: usize) -> Option<u64> {
        self.side_degrees.get(&v).copied()
    }
}

/// Splits vertices by `d(v) > tau * mean_degree`. `tau` must be positive;
/// `f64::INFINITY` yields an empty set.
pub fn classify_vertices(stats: &DegreeStats, tau: f64) -> HighDegreeSet {
    debug_assert!(tau > 0.0, "tau must be positive");
    let threshold = tau * stats.mean_degree;
    let mut membership = BitSet::new(stats.num_vertices);
    let mut side_degrees = BTreeMap::new();
    let mut threshold_degree: Option<u64> = None;
    for (v, &d) in stats.degrees.iter().enumerate() {
        if d > 0 && is_high_degree(d, threshold) {
            membership.insert(v);
            side_degrees.insert(v, d);
            threshold_degree = Some(threshold_degree.map_or(d, |t| t.min(d)));
        }
    }
    HighDegreeSet {
        membership,
        threshold_degree,
        tau,
        side_degrees,
    }
}

/// CSR over low-degree vertices only, with lazily shrinking sublists.
///
/// Vertex `v` owns the column region `[index_out[v], region_end(v))`: the
/// out-sublist starts at `index_out[v]`, the in-sublist at `index_in[v]`.
/// Valid entries of each sublist occupy its prefix, `out_size[v]` and
/// `in_size[v]` long.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrunedCsr<I> {
    pub index_out: Vec<I>,
    pub index_in: Vec<I>,
    pub column: Vec<I>,
    pub out_size: Vec<I>,
    pub in_size: Vec<I>,
    pub num_inmem_edges: u64,
}

impl<I: VertexId> PrunedCsr<I> {
    pub fn num_vertices(&self) -> usize {
        self.index_out.len()
    }

    /// End of `v`'s column region.
    #[inline]
    pub fn region_end(&self, v: usize) -> usize {
        match self.index_out.get(v + 1) {
            Some(next) => next.index(),
            None => self.column.len(),
        }
    }

    /// Original number of entries of `v`, equal to `d(v)` for low-degree
    /// vertices and zero for high-degree ones.
    #[inline]
    pub fn region_len(&self, v: usize) -> usize {
        self.region_end(v) - self.index_out[v].index()
    }

    #[inline]
    pub fn out_valid(&self, v: usize) -> &[I] {
        let start = self.index_out[v].index();
        &self.column[start..start + self.out_size[v].index()]
    }

    #[inline]
    pub fn in_valid(&self, v: usize) -> &[I] {
        let start = self.index_in[v].index();
        &self.column[start..start + self.in_size[v].index()]
    }

    #[inline]
    pub fn out_range(&self, v: usize) -> core::ops::Range<usize> {
        let start = self.index_out[v].index();
        start..start + self.out_size[v].index()
    }

    #[inline]
    pub fn in_range(&self, v: usize) -> core::ops::Range<usize> {
        let start = self.index_in[v].index();
        start..start + self.in_size[v].index()
    }

    #[inline]
    pub fn valid_degree(&self, v: usize) -> usize {
        self.out_size[v].index() + self.in_size[v].index()
    }

    /// Drops every valid entry of `v` for which `remove` holds, keeping the
    /// relative order of survivors. Returns the number of entries dropped.
    pub fn remove_valid_where(&mut self, v: usize, mut remove: impl FnMut(usize) -> bool) -> usize {
        let out = self.out_range(v);
        let kept_out = compact(&mut self.column[out.clone()], &mut remove);
        let inn = self.in_range(v);
        let kept_in = compact(&mut self.column[inn.clone()], &mut remove);
        self.out_size[v] = I::from_index(kept_out);
        self.in_size[v] = I::from_index(kept_in);
        (out.len() - kept_out) + (inn.len() - kept_in)
    }

    /// Bytes of the column array.
    pub fn column_bytes(&self) -> usize {
        self.column.len() * I::BYTES
    }

    /// Bytes of the column, both index arrays and both size arrays.
    pub fn structure_bytes(&self) -> usize {
        (self.column.len() + 4 * self.index_out.len()) * I::BYTES
    }
}

fn compact<I: VertexId>(list: &mut [I], remove: &mut impl FnMut(usize) -> bool) -> usize {
    let mut write = 0;
    for read in 0..list.len() {
        let u = list[read];
        if !remove(u.index()) {
            list[write] = u;
            write += 1;
        }
    }
    write
}

/// Second pass: fills the pruned CSR and spills high-to-high edges.
///
/// For input edge `(u, v)` a low-degree `u` gets `v` in its out-sublist and a
/// low-degree `v` gets `u` in its in-sublist; when both are high the edge goes
/// to `spill`. Entries appear in input order. Returns the CSR and the number
/// of spilled edges.
pub fn build_pruned_csr<I, S, K>(
    source: &mut S,
    stats: &DegreeStats,
    highs: &HighDegreeSet,
    spill: &mut K,
) -> Result<(PrunedCsr<I>, u64), GraphError<S::Error>>
where
    I: VertexId,
    S: EdgeSource<I>,
    K: SpillSink<I, Error = S::Error>,
{
    let n = stats.num_vertices;
    let mut index_out = Vec::with_capacity(n);
    let mut total = 0u64;
    for (v, &d) in stats.degrees.iter().enumerate() {
        index_out.push(total);
        if !highs.contains(v) {
            total += d;
        }
    }
    if total > I::max_value() {
        return Err(GraphError::OffsetOverflow {
            entries: total,
            id_bytes: I::BYTES,
        });
    }
    let index_out: Vec<I> = index_out.into_iter().map(|o| I::from_index(o as usize)).collect();
    let mut column = vec![I::default(); total as usize];
    // out_size counts forward from the region start, in_size backward from
    // the region end; the split point is only known after the pass.
    let mut out_size = vec![I::default(); n];
    let mut in_size = vec![I::default(); n];
    let region_end = |v: usize, index_out: &[I]| match index_out.get(v + 1) {
        Some(next) => next.index(),
        None => total as usize,
    };

    let mut spilled = 0u64;
    let mut inmem = 0u64;
    for edge in source.edges().map_err(GraphError::Source)? {
        let (a, b) = edge.map_err(GraphError::Source)?;
        let (u, v) = (a.index(), b.index());
        if u == v {
            continue;
        }
        if u >= n || v >= n {
            return Err(GraphError::SourceChanged);
        }
        let (u_high, v_high) = (highs.contains(u), highs.contains(v));
        if u_high && v_high {
            spill.push(a, b).map_err(GraphError::Spill)?;
            spilled += 1;
            continue;
        }
        inmem += 1;
        if !u_high {
            let filled = out_size[u].index();
            let pos = index_out[u].index() + filled;
            if pos >= region_end(u, &index_out) - in_size[u].index() {
                return Err(GraphError::SourceChanged);
            }
            column[pos] = b;
            out_size[u] = I::from_index(filled + 1);
        }
        if !v_high {
            let filled = in_size[v].index();
            let end = region_end(v, &index_out);
            if end - filled <= index_out[v].index() + out_size[v].index() {
                return Err(GraphError::SourceChanged);
            }
            column[end - filled - 1] = a;
            in_size[v] = I::from_index(filled + 1);
        }
    }
    if spilled + inmem != stats.num_edges {
        return Err(GraphError::SourceChanged);
    }

    let mut index_in = Vec::with_capacity(n);
    for v in 0..n {
        let start = index_out[v].index() + out_size[v].index();
        let end = region_end(v, &index_out);
        if end - start != in_size[v].index() {
            return Err(GraphError::SourceChanged);
        }
        column[start..end].reverse();
        index_in.push(I::from_index(start));
    }

    Ok((
        PrunedCsr {
            index_out,
            index_in,
            column,
            out_size,
            in_size,
            num_inmem_edges: inmem,
        },
        spilled,
    ))
}

/// Bytes needed by the pruned CSR, size fields, bitsets and heap for a given
/// `tau`: `sum_{low} d(v) * b + 6 |V| b + ceil(|V| (k + 1) / 8)`.
pub fn estimate_memory(stats: &DegreeStats, tau: f64, k: usize, id_bytes: usize) -> u64 {
    memory_for_column(stats, stats.low_volume(tau), k, id_bytes)
}

fn fixed_bytes(stats: &DegreeStats, k: usize, id_bytes: usize) -> u64 {
    let n = stats.num_vertices as u64;
    6 * n * id_bytes as u64 + (n * (k as u64 + 1)).div_ceil(8)
}

fn memory_for_column(stats: &DegreeStats, column_entries: u64, k: usize, id_bytes: usize) -> u64 {
    column_entries * id_bytes as u64 + fixed_bytes(stats, k, id_bytes)
}

/// One candidate split for memory planning.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FootprintRow {
    /// Largest degree still classified low; 0 when every vertex is high.
    pub max_low_degree: u64,
    /// Largest `tau` producing this split (`INFINITY` when nothing is pruned).
    pub tau: f64,
    pub column_entries: u64,
    pub bytes: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TauPlan {
    Feasible(FootprintRow),
    /// Even a fully pruned column exceeds the budget.
    Infeasible {
        fixed_bytes: u64,
    },
}

impl TauPlan {
    pub fn tau(&self) -> Option<f64> {
        match self {
            TauPlan::Feasible(row) => Some(row.tau),
            TauPlan::Infeasible { .. } => None,
        }
    }
}

/// Largest `tau` such that `degree` still counts as high, i.e.
/// `degree > tau * mean` holds in floating point.
fn largest_tau_below(degree: u64, mean: f64) -> f64 {
    let d = degree as f64;
    let mut tau = d / mean;
    while d <= tau * mean {
        tau = tau.next_down();
    }
    tau
}

/// Memory footprint for every distinct split, ascending by `max_low_degree`.
///
/// Any `tau` between two adjacent distinct degrees produces the same split, so
/// one row per distinct degree (plus the fully pruned row) is exhaustive.
pub fn footprint_table(stats: &DegreeStats, k: usize, id_bytes: usize) -> Vec<FootprintRow> {
    let mut rows = Vec::with_capacity(stats.suffix_volume.len() + 1);
    let cutoffs = core::iter::once((0u64, 0u64)).chain(stats.suffix_volume.iter().copied());
    let next_degrees = stats
        .suffix_volume
        .iter()
        .map(|&(d, _)| Some(d))
        .chain(core::iter::once(None));
    for ((cutoff, volume), next) in cutoffs.zip(next_degrees) {
        let tau = match next {
            Some(d) => largest_tau_below(d, stats.mean_degree),
            None => f64::INFINITY,
        };
        rows.push(FootprintRow {
            max_low_degree: cutoff,
            tau,
            column_entries: volume,
            bytes: memory_for_column(stats, volume, k, id_bytes),
        });
    }
    rows
}

/// Chooses the largest `tau` whose estimated footprint fits `budget` bytes.
pub fn plan_tau(stats: &DegreeStats, budget: u64, k: usize, id_bytes: usize) -> TauPlan {
    let fixed = fixed_bytes(stats, k, id_bytes);
    if stats.num_active_vertices == 0 {
        return if fixed <= budget {
            TauPlan::Feasible(FootprintRow {
                max_low_degree: 0,
                tau: f64::INFINITY,
                column_entries: 0,
                bytes: fixed,
            })
        } else {
            TauPlan::Infeasible { fixed_bytes: fixed }
        };
    }
    footprint_table(stats, k, id_bytes)
        .into_iter()
        .rev()
        .find(|row| row.bytes <= budget)
        .map_or(TauPlan::Infeasible { fixed_bytes: fixed }, TauPlan::Feasible)
}
