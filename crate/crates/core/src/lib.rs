//! Hybrid edge partitioning for power-law graphs.
//!
//! Edges incident to at least one low-degree vertex are partitioned in memory
//! by neighborhood expansion ([`nepp`]) over a pruned CSR ([`graph`]); edges
//! between two high-degree vertices are spilled during ingestion and placed
//! afterwards by an HDRF streaming pass ([`streaming`]) that starts from the
//! in-memory phase's replication state.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, timing and the
//! command line live in the `hep` companion crate.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bitset;
pub mod graph;
pub mod heap;
pub mod id;
pub mod metrics;
pub mod nepp;
pub mod oracle;
pub mod pipeline;
pub mod sink;
pub mod streaming;

pub use bitset::BitSet;
pub use graph::{
    build_pruned_csr, classify_vertices, compute_degrees, estimate_memory, footprint_table, plan_tau, DegreeStats,
    EdgeSource, GraphError, HighDegreeSet, PrunedCsr, SpillSink, TauPlan,
};
pub use id::VertexId;
pub use nepp::{partition_in_memory, Instrumentation, PartitionState};
pub use pipeline::{run_hep, HepConfig, HepError, HepRun, StreamingMode};
pub use sink::{AssignmentSink, Record};
pub use streaming::{HdrfParams, StreamingState};
