//! Independent implementations used to check the partitioner: plain
//! neighborhood expansion over an unpruned graph with eager per-edge
//! invalidation, exhaustive search for tiny instances, and deterministic
//! graph generators.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;
use core::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::id::VertexId;
use crate::sink::AssignmentSink;

struct Adjacency {
    /// Per vertex: (neighbor, edge id, vertex is the left-hand endpoint).
    lists: Vec<Vec<(usize, usize, bool)>>,
}

impl Adjacency {
    fn new<I: VertexId>(edges: &[(I, I)]) -> Self {
        let n = edges
            .iter()
            .map(|&(u, v)| u.index().max(v.index()) + 1)
            .max()
            .unwrap_or(0);
        let mut outs = vec![Vec::new(); n];
        let mut ins = vec![Vec::new(); n];
        for (eid, &(u, v)) in edges.iter().enumerate() {
            let (u, v) = (u.index(), v.index());
            if u == v {
                continue;
            }
            outs[u].push((v, eid, true));
            ins[v].push((u, eid, false));
        }
        let lists = outs
            .into_iter()
            .zip(ins)
            .map(|(mut o, i)| {
                o.extend(i);
                o
            })
            .collect();
        Adjacency { lists }
    }
}

/// Neighborhood expansion on the full graph, every vertex treated as
/// low-degree. Assigned edges are invalidated immediately in a per-edge flag
/// array. Tie-breaks, seeding and the last-partition rule match
/// [`crate::nepp`], so outputs are expected to coincide record for record.
/// Returns the per-partition sizes.
pub fn reference_ne<I: VertexId, A: AssignmentSink<I>>(edges: &[(I, I)], k: usize, sink: &mut A) -> Vec<u64> {
    assert!(k >= 1);
    let adj = Adjacency::new(edges);
    let n = adj.lists.len();
    let m = edges.iter().filter(|(u, v)| u != v).count() as u64;
    let mut ne = ReferenceNe {
        edges,
        adj: &adj,
        valid: vec![true; edges.len()],
        core: vec![false; n],
        member: vec![false; n],
        members: Vec::new(),
        pending: vec![Vec::new(); k],
        ext: vec![None; n],
        heap: BinaryHeap::new(),
        sizes: vec![0; k],
        capacity: m.div_ceil(k as u64),
        current: 0,
        k,
        cursor: 0,
        sink,
    };
    'partitions: for i in 0..k - 1 {
        ne.current = i;
        for v in core::mem::take(&mut ne.pending[i]) {
            ne.join(v);
        }
        while ne.sizes[i] < ne.capacity {
            if let Some(v) = ne.pop_min() {
                ne.move_to_core(v);
                continue;
            }
            match ne.next_seed() {
                Some(seed) => {
                    if !ne.member[seed] {
                        ne.move_to_secondary(seed, false);
                    }
                    ne.move_to_core(seed);
                }
                None => break 'partitions,
            }
        }
        ne.heap.clear();
        ne.ext.iter_mut().for_each(|e| *e = None);
        for v in core::mem::take(&mut ne.members) {
            ne.member[v] = false;
        }
    }
    let last = k - 1;
    for v in 0..n {
        if ne.core[v] {
            continue;
        }
        for &(u, eid, is_out) in &adj.lists[v] {
            if is_out && ne.valid[eid] {
                ne.valid[eid] = false;
                ne.sizes[last] += 1;
                ne.sink.assign(I::from_index(v), I::from_index(u), last as u32);
            }
        }
    }
    ne.sizes
}

struct ReferenceNe<'a, I, A> {
    edges: &'a [(I, I)],
    adj: &'a Adjacency,
    valid: Vec<bool>,
    core: Vec<bool>,
    member: Vec<bool>,
    members: Vec<usize>,
    pending: Vec<Vec<usize>>,
    ext: Vec<Option<u64>>,
    heap: BinaryHeap<Reverse<(u64, usize)>>,
    sizes: Vec<u64>,
    capacity: u64,
    current: usize,
    k: usize,
    cursor: usize,
    sink: &'a mut A,
}

impl<I: VertexId, A: AssignmentSink<I>> ReferenceNe<'_, I, A> {
    fn join(&mut self, v: usize) {
        if !self.member[v] {
            self.member[v] = true;
            self.members.push(v);
        }
    }

    fn valid_degree(&self, v: usize) -> u64 {
        self.adj.lists[v].iter().filter(|e| self.valid[e.1]).count() as u64
    }

    fn pop_min(&mut self) -> Option<usize> {
        while let Some(Reverse((key, v))) = self.heap.pop() {
            if self.ext[v] == Some(key) {
                self.ext[v] = None;
                return Some(v);
            }
        }
        None
    }

    fn next_seed(&mut self) -> Option<usize> {
        while self.cursor < self.adj.lists.len() {
            let v = self.cursor;
            if self.core[v] {
                self.cursor += 1;
            } else if self.valid_degree(v) == 0 {
                self.core[v] = true;
                self.cursor += 1;
            } else {
                return Some(v);
            }
        }
        None
    }

    fn move_to_core(&mut self, v: usize) {
        self.core[v] = true;
        for idx in 0..self.adj.lists[v].len() {
            let (u, eid, _) = self.adj.lists[v][idx];
            if self.valid[eid] && !self.core[u] && !self.member[u] {
                self.move_to_secondary(u, true);
            }
        }
    }

    fn move_to_secondary(&mut self, v: usize, into_heap: bool) {
        self.join(v);
        let mut ext = self.valid_degree(v);
        for idx in 0..self.adj.lists[v].len() {
            let (u, eid, _) = self.adj.lists[v][idx];
            if !self.valid[eid] || !(self.core[u] || self.member[u]) {
                continue;
            }
            ext -= 1;
            if let Some(key) = self.ext[u] {
                self.ext[u] = Some(key - 1);
                self.heap.push(Reverse((key - 1, u)));
            }
            self.valid[eid] = false;
            let (a, b) = self.edges[eid];
            self.assign(a.index(), b.index());
        }
        if into_heap {
            self.ext[v] = Some(ext);
            self.heap.push(Reverse((ext, v)));
        }
    }

    fn assign(&mut self, x: usize, y: usize) {
        let mut target = self.current;
        if self.sizes[target] >= self.capacity {
            target += 1;
            while target < self.k - 1 && self.sizes[target] >= self.capacity {
                target += 1;
            }
            self.pending[target].push(x);
            self.pending[target].push(y);
        }
        self.sizes[target] += 1;
        self.sink.assign(I::from_index(x), I::from_index(y), target as u32);
    }
}

/// Exhaustive search input: at most [`TinyInstance::MAX_EDGES`] edges and
/// [`TinyInstance::MAX_K`] partitions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TinyInstance {
    pub edges: Vec<(u32, u32)>,
    pub k: usize,
    /// Largest allowed partition size.
    pub cap: usize,
}

impl TinyInstance {
    pub const MAX_EDGES: usize = 16;
    pub const MAX_K: usize = 4;
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleError {
    TooLarge {
        edges: usize,
        k: usize,
    },
    /// `k * cap` is smaller than the edge count.
    Infeasible,
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::TooLarge { edges, k } => write!(
                f,
                "instance with {edges} edges and k = {k} exceeds enumeration bounds ({} edges, k = {})",
                TinyInstance::MAX_EDGES,
                TinyInstance::MAX_K
            ),
            OracleError::Infeasible => f.write_str("no assignment satisfies the capacity"),
        }
    }
}

/// Minimum replication factor over all capacity-respecting assignments,
/// with one witness (partition per edge, in input order).
pub fn brute_force_optimal(inst: &TinyInstance) -> Result<(f64, Vec<u32>), OracleError> {
    let edges: Vec<(usize, usize)> = inst
        .edges
        .iter()
        .filter(|(u, v)| u != v)
        .map(|&(u, v)| (u as usize, v as usize))
        .collect();
    if edges.len() > TinyInstance::MAX_EDGES || inst.k > TinyInstance::MAX_K || inst.k == 0 {
        return Err(OracleError::TooLarge {
            edges: edges.len(),
            k: inst.k,
        });
    }
    if inst.k * inst.cap < edges.len() {
        return Err(OracleError::Infeasible);
    }
    let n = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
    let mut active = vec![false; n];
    for &(u, v) in &edges {
        active[u] = true;
        active[v] = true;
    }
    let num_active = active.iter().filter(|&&a| a).count();
    if edges.is_empty() {
        return Ok((1.0, Vec::new()));
    }

    let mut search = Search {
        edges: &edges,
        k: inst.k,
        cap: inst.cap,
        incidence: vec![vec![0u32; n]; inst.k],
        sizes: vec![0; inst.k],
        choice: vec![0; edges.len()],
        best: usize::MAX,
        witness: Vec::new(),
    };
    search.descend(0, 0, 0);
    Ok((search.best as f64 / num_active as f64, search.witness))
}

struct Search<'a> {
    edges: &'a [(usize, usize)],
    k: usize,
    cap: usize,
    incidence: Vec<Vec<u32>>,
    sizes: Vec<usize>,
    choice: Vec<u32>,
    best: usize,
    witness: Vec<u32>,
}

impl Search<'_> {
    /// Partitions are interchangeable, so edge `j` only tries partitions up to
    /// one past the highest used so far.
    fn descend(&mut self, j: usize, used: usize, replicas: usize) {
        if replicas >= self.best {
            return;
        }
        if j == self.edges.len() {
            self.best = replicas;
            self.witness = self.choice.clone();
            return;
        }
        let (u, v) = self.edges[j];
        for p in 0..(used + 1).min(self.k) {
            if self.sizes[p] >= self.cap {
                continue;
            }
            let added = (self.incidence[p][u] == 0) as usize + (self.incidence[p][v] == 0) as usize;
            self.incidence[p][u] += 1;
            self.incidence[p][v] += 1;
            self.sizes[p] += 1;
            self.choice[j] = p as u32;
            self.descend(j + 1, used.max(p + 1), replicas + added);
            self.incidence[p][u] -= 1;
            self.incidence[p][v] -= 1;
            self.sizes[p] -= 1;
        }
    }
}

/// Named deterministic test shapes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    /// `n` vertices in a line.
    Path(usize),
    /// Center 0 with `n` leaves.
    Star(usize),
    /// Complete graph on `n` vertices.
    Clique(usize),
    /// `w x h` lattice.
    Grid(usize, usize),
}

pub fn gen_named<I: VertexId>(shape: Shape) -> Vec<(I, I)> {
    let e = |u: usize, v: usize| (I::from_index(u), I::from_index(v));
    match shape {
        Shape::Path(n) => (1..n).map(|v| e(v - 1, v)).collect(),
        Shape::Star(leaves) => (1..=leaves).map(|l| e(0, l)).collect(),
        Shape::Clique(n) => (0..n).flat_map(|u| (u + 1..n).map(move |v| e(u, v))).collect(),
        Shape::Grid(w, h) => {
            let mut edges = Vec::new();
            for y in 0..h {
                for x in 0..w {
                    let v = y * w + x;
                    if x + 1 < w {
                        edges.push(e(v, v + 1));
                    }
                    if y + 1 < h {
                        edges.push(e(v, v + w));
                    }
                }
            }
            edges
        }
    }
}

/// Vertex-disjoint union; each graph's ids are shifted past the previous one.
pub fn disjoint_union<I: VertexId>(graphs: &[Vec<(I, I)>]) -> Vec<(I, I)> {
    let mut out = Vec::new();
    let mut offset = 0;
    for g in graphs {
        let n = g.iter().map(|&(u, v)| u.index().max(v.index()) + 1).max().unwrap_or(0);
        out.extend(
            g.iter()
                .map(|&(u, v)| (I::from_index(u.index() + offset), I::from_index(v.index() + offset))),
        );
        offset += n;
    }
    out
}

/// Uniform random simple graph with `m` edges on `n` vertices.
pub fn gen_uniform<I: VertexId>(n: usize, m: usize, seed: u64) -> Vec<(I, I)> {
    assert!(n >= 2);
    let max_edges = n * (n - 1) / 2;
    let m = m.min(max_edges);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = alloc::collections::BTreeSet::new();
    let mut edges = Vec::with_capacity(m);
    while edges.len() < m {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v && seen.insert((u.min(v), u.max(v))) {
            edges.push((I::from_index(u), I::from_index(v)));
        }
    }
    edges
}

/// Preferential attachment with an additive attractiveness offset.
///
/// Vertices arrive one at a time and attach to existing vertices with
/// probability proportional to `degree + offset`, where the offset is chosen
/// so the degree distribution tail decays like `d^-exponent`
/// (`exponent > 2`). Vertex ids and edge order are shuffled afterwards so
/// that hubs are not clustered at low ids. Produces exactly `m` edges on at
/// most `n` vertices, no self-loops, and no parallel edges unless the
/// requested density forces them.
pub fn gen_power_law<I: VertexId>(n: usize, m: usize, exponent: f64, seed: u64) -> Vec<(I, I)> {
    assert!(n >= 2 && m >= 1, "need at least two vertices and one edge");
    assert!(exponent > 2.0, "exponent must exceed 2");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let arrivals = n - 1;
    let per = (m / arrivals).max(1) as f64;
    let offset = (exponent - 3.0) * per;

    // one entry per edge endpoint, so uniform picks are degree-proportional
    let mut endpoints: Vec<usize> = Vec::with_capacity(2 * m);
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(m);
    let mut degree = vec![0usize; n];
    let mut targets: Vec<usize> = Vec::new();
    let base = m / arrivals;
    let extra = m % arrivals;
    let mut carry = 0usize;
    for t in 1..n {
        let quota = base + usize::from(t > arrivals - extra) + carry;
        let take = quota.min(t);
        carry = quota - take;
        targets.clear();
        let mut attempts = 0;
        while targets.len() < take {
            let candidate = pick(&mut rng, &endpoints, &degree, t, offset);
            attempts += 1;
            if !targets.contains(&candidate) || attempts > 64 * take {
                targets.push(candidate);
            }
        }
        for &u in &targets {
            edges.push((t, u));
            endpoints.push(t);
            endpoints.push(u);
            degree[t] += 1;
            degree[u] += 1;
        }
    }
    debug_assert_eq!(edges.len() + carry, m);

    let mut relabel: Vec<usize> = (0..n).collect();
    relabel.shuffle(&mut rng);
    edges.shuffle(&mut rng);
    edges
        .into_iter()
        .map(|(a, b)| {
            let (a, b) = if rng.gen::<bool>() { (a, b) } else { (b, a) };
            (I::from_index(relabel[a]), I::from_index(relabel[b]))
        })
        .collect()
}

fn pick(rng: &mut ChaCha8Rng, endpoints: &[usize], degree: &[usize], existing: usize, offset: f64) -> usize {
    if endpoints.is_empty() {
        return rng.gen_range(0..existing);
    }
    let volume = endpoints.len() as f64;
    if offset >= 0.0 {
        // mixture: degree-proportional part plus uniform part
        let p_degree = volume / (volume + offset * existing as f64);
        if rng.gen::<f64>() < p_degree {
            endpoints[rng.gen_range(0..endpoints.len())]
        } else {
            rng.gen_range(0..existing)
        }
    } else {
        // rejection: accept a degree-proportional pick with w(d) / d, where
        // w(d) = max(d + offset, 1) keeps early low-degree vertices reachable
        loop {
            let v = endpoints[rng.gen_range(0..endpoints.len())];
            let d = degree[v] as f64;
            let accept = (d + offset).max(1.0) / d;
            if rng.gen::<f64>() < accept {
                return v;
            }
        }
    }
}
