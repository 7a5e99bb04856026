//! Partition quality and validity: replication factor, edge and vertex
//! balance, exactly-once validation and per-degree diagnostics.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::bitset::BitSet;
use crate::id::VertexId;
use crate::sink::Record;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MetricsError {
    /// A record names partition `partition` but only `k` exist.
    PartitionOutOfRange {
        partition: u32,
        k: usize,
    },
    EmptyAssignment,
}

impl fmt::Display for MetricsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricsError::PartitionOutOfRange { partition, k } => {
                write!(f, "partition id {partition} out of range for k = {k}")
            }
            MetricsError::EmptyAssignment => f.write_str("assignment is empty"),
        }
    }
}

/// Per-partition sets of covered vertices built from records.
pub fn cover_sets<I: VertexId>(
    records: &[Record<I>],
    k: usize,
    num_vertices: usize,
) -> Result<Vec<BitSet>, MetricsError> {
    let mut cover = vec![BitSet::new(num_vertices); k];
    for r in records {
        let p = r.partition as usize;
        if p >= k {
            return Err(MetricsError::PartitionOutOfRange {
                partition: r.partition,
                k,
            });
        }
        cover[p].insert(r.u.index());
        cover[p].insert(r.v.index());
    }
    Ok(cover)
}

/// `sum_i |V(p_i)| / num_active_vertices`, computed from the records.
pub fn replication_factor<I: VertexId>(
    records: &[Record<I>],
    k: usize,
    num_active_vertices: usize,
) -> Result<f64, MetricsError> {
    if records.is_empty() || num_active_vertices == 0 {
        return Err(MetricsError::EmptyAssignment);
    }
    let num_vertices = records
        .iter()
        .map(|r| r.u.index().max(r.v.index()) + 1)
        .max()
        .unwrap_or(0);
    let cover = cover_sets(records, k, num_vertices)?;
    Ok(replication_factor_from_cover(&cover, num_active_vertices))
}

/// Same quantity from cover bitsets maintained during partitioning.
pub fn replication_factor_from_cover(cover: &[BitSet], num_active_vertices: usize) -> f64 {
    let replicas: usize = cover.iter().map(BitSet::count_ones).sum();
    replicas as f64 / num_active_vertices as f64
}

/// `k * max_i |p_i| / |E|`.
pub fn edge_balance(sizes: &[u64]) -> f64 {
    let total: u64 = sizes.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let max = sizes.iter().copied().max().unwrap_or(0);
    sizes.len() as f64 * max as f64 / total as f64
}

/// Population standard deviation over mean of per-partition covered-vertex
/// counts; 0 when the mean is 0.
pub fn vertex_balance(cover_counts: &[u64]) -> f64 {
    if cover_counts.is_empty() {
        return 0.0;
    }
    let n = cover_counts.len() as f64;
    let mean = cover_counts.iter().sum::<u64>() as f64 / n;
    if mean == 0.0 {
        return 0.0;
    }
    let var = cover_counts
        .iter()
        .map(|&c| {
            let d = c as f64 - mean;
            d * d
        })
        .sum::<f64>()
        / n;
    libm::sqrt(var) / mean
}

/// Outcome of comparing an assignment with the input edge multiset.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    /// Input edges (excluding self-loops) with no record.
    pub missing: u64,
    /// Extra records for edges that exist in the input.
    pub duplicated: u64,
    /// Records for edges absent from the input.
    pub alien: u64,
    /// Records whose partition id is `>= k`.
    pub out_of_range: u64,
    pub sizes: Vec<u64>,
    pub input_edges: u64,
    pub records: u64,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.missing == 0 && self.duplicated == 0 && self.alien == 0 && self.out_of_range == 0
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} input edges, {} records: missing {}, duplicated {}, alien {}, out-of-range {}",
            self.input_edges, self.records, self.missing, self.duplicated, self.alien, self.out_of_range
        )
    }
}

#[inline]
fn undirected<I: VertexId>(u: I, v: I) -> (I, I) {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Checks that records cover the input edges exactly once. Edges are
/// compared as undirected pairs with multiplicity; input self-loops are
/// ignored.
pub fn validate<I: VertexId>(
    records: &[Record<I>],
    k: usize,
    input: impl IntoIterator<Item = (I, I)>,
) -> ValidationReport {
    let mut expected: Vec<(I, I)> = input
        .into_iter()
        .filter(|(u, v)| u != v)
        .map(|(u, v)| undirected(u, v))
        .collect();
    expected.sort_unstable();
    let mut sizes = vec![0u64; k];
    let mut out_of_range = 0;
    let mut got: Vec<(I, I)> = Vec::with_capacity(records.len());
    for r in records {
        match sizes.get_mut(r.partition as usize) {
            Some(s) => *s += 1,
            None => out_of_range += 1,
        }
        got.push(undirected(r.u, r.v));
    }
    got.sort_unstable();

    let mut report = ValidationReport {
        sizes,
        out_of_range,
        input_edges: expected.len() as u64,
        records: records.len() as u64,
        ..Default::default()
    };
    let (mut i, mut j) = (0, 0);
    while i < expected.len() || j < got.len() {
        let key = match (expected.get(i), got.get(j)) {
            (Some(a), Some(b)) => *a.min(b),
            (Some(a), None) => *a,
            (None, Some(b)) => *b,
            (None, None) => unreachable!(),
        };
        let mut want = 0u64;
        while expected.get(i) == Some(&key) {
            want += 1;
            i += 1;
        }
        let mut have = 0u64;
        while got.get(j) == Some(&key) {
            have += 1;
            j += 1;
        }
        if want == 0 {
            report.alien += have;
        } else if have < want {
            report.missing += want - have;
        } else {
            report.duplicated += have - want;
        }
    }
    report
}

/// Mean replication of the vertices whose degree falls in `[lo, hi]`.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeBucket {
    pub lo: u64,
    pub hi: u64,
    pub vertices: u64,
    pub mean_replication: f64,
}

/// Buckets `[1,10]`, `[11,100]`, `[101,1000]`, ... up to the largest degree.
pub fn degree_bucket_report(cover: &[BitSet], degrees: &[u64]) -> Vec<DegreeBucket> {
    let max = degrees.iter().copied().max().unwrap_or(0);
    let mut buckets: Vec<DegreeBucket> = Vec::new();
    let (mut lo, mut hi) = (1u64, 10u64);
    while lo <= max {
        buckets.push(DegreeBucket {
            lo,
            hi,
            vertices: 0,
            mean_replication: 0.0,
        });
        lo = hi + 1;
        hi = hi.saturating_mul(10);
    }
    let mut replicas = vec![0u64; buckets.len()];
    for (v, &d) in degrees.iter().enumerate() {
        if d == 0 {
            continue;
        }
        let b = bucket_index(d);
        buckets[b].vertices += 1;
        replicas[b] += cover.iter().filter(|c| v < c.len() && c.contains(v)).count() as u64;
    }
    for (bucket, r) in buckets.iter_mut().zip(replicas) {
        if bucket.vertices > 0 {
            bucket.mean_replication = r as f64 / bucket.vertices as f64;
        }
    }
    buckets
}

fn bucket_index(d: u64) -> usize {
    let mut b = 0;
    let mut hi = 10u64;
    while d > hi {
        b += 1;
        hi = hi.saturating_mul(10);
    }
    b
}

/// Mean degree of core vertices against vertices left only in a secondary set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoreSecondaryDegrees {
    pub core_mean: f64,
    pub secondary_mean: f64,
    pub core_vertices: u64,
    pub secondary_vertices: u64,
}

/// Averages degrees over `core` and over covered-but-not-core vertices
/// (including high-degree vertices, which are secondary by construction).
pub fn core_vs_secondary_degrees(core: &BitSet, cover: &[BitSet], degrees: &[u64]) -> CoreSecondaryDegrees {
    let (mut cs, mut cn, mut ss, mut sn) = (0u64, 0u64, 0u64, 0u64);
    for (v, &d) in degrees.iter().enumerate() {
        if d == 0 {
            continue;
        }
        if core.contains(v) {
            cs += d;
            cn += 1;
        } else if cover.iter().any(|c| c.contains(v)) {
            ss += d;
            sn += 1;
        }
    }
    let mean = |s: u64, n: u64| if n == 0 { 0.0 } else { s as f64 / n as f64 };
    CoreSecondaryDegrees {
        core_mean: mean(cs, cn),
        secondary_mean: mean(ss, sn),
        core_vertices: cn,
        secondary_vertices: sn,
    }
}
