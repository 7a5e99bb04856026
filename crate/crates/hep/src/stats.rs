//! The stats document: one JSON object per run, suitable for plotting
//! scripts. Wall times live under `timings` and are the only fields that vary
//! between identical runs.

use serde::{Serialize, Serializer};

use hep_core::metrics::{
    core_vs_secondary_degrees, degree_bucket_report, edge_balance, replication_factor_from_cover, vertex_balance,
};
use hep_core::{BitSet, DegreeStats, HepRun};

fn tau_value<S: Serializer>(tau: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match tau {
        Some(t) if t.is_infinite() => s.serialize_str("inf"),
        Some(t) => s.serialize_f64(*t),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Timings {
    pub degrees_s: f64,
    pub build_s: f64,
    pub in_memory_s: f64,
    pub streaming_s: f64,
    pub planning_s: f64,
    pub total_s: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Memory {
    pub estimated_bytes: u64,
    pub estimated_column_bytes: u64,
    pub measured_column_bytes: u64,
    /// Column plus index and size arrays.
    pub measured_csr_bytes: u64,
    pub measured_bitset_bytes: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Bucket {
    pub min_degree: u64,
    pub max_degree: u64,
    pub vertices: u64,
    pub mean_replication: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoreSecondary {
    pub core_vertices: u64,
    pub core_mean_degree: f64,
    pub secondary_vertices: u64,
    pub secondary_mean_degree: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct InMemory {
    pub tau_auto: bool,
    pub memory_budget: Option<u64>,
    pub high_degree_vertices: u64,
    pub spilled_edges: u64,
    pub in_memory_edges: u64,
    pub capacity: u64,
    pub in_memory_sizes: Vec<u64>,
    pub exhausted_at: Option<usize>,
    pub spilled_over: u64,
    pub initial_entries: u64,
    pub cleaned_entries: u64,
    pub cleaned_fraction: f64,
    pub memory: Memory,
    pub core_vs_secondary: CoreSecondary,
    pub sealed_core_reads: Option<u64>,
    pub ext_degree_mismatches: Option<u64>,
    pub cleanup_leftovers: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StatsDoc {
    pub mode: String,
    pub streaming: Option<String>,
    pub k: usize,
    #[serde(serialize_with = "tau_value")]
    pub tau: Option<f64>,
    pub alpha: f64,
    pub lambda: f64,
    pub epsilon: f64,
    pub seed: Option<u64>,
    pub id_bytes: usize,
    pub num_vertices: usize,
    pub num_active_vertices: usize,
    pub num_edges: u64,
    pub self_loops: u64,
    pub mean_degree: f64,
    pub max_degree: u64,
    pub replication_factor: f64,
    pub edge_balance: f64,
    pub vertex_balance: f64,
    pub sizes: Vec<u64>,
    pub cover_counts: Vec<u64>,
    pub max_size_bound: Option<f64>,
    pub fallbacks: u64,
    pub warnings: Vec<String>,
    pub degree_buckets: Vec<Bucket>,
    pub hep: Option<InMemory>,
    pub timings: Timings,
}

impl StatsDoc {
    /// Fields shared by every mode, from final sizes and covers.
    pub fn from_cover(
        mode: &str,
        stats: &DegreeStats,
        k: usize,
        sizes: Vec<u64>,
        cover: &[BitSet],
        id_bytes: usize,
    ) -> Self {
        let cover_counts: Vec<u64> = cover.iter().map(|c| c.count_ones() as u64).collect();
        let rf = if stats.num_active_vertices == 0 {
            0.0
        } else {
            replication_factor_from_cover(cover, stats.num_active_vertices)
        };
        StatsDoc {
            mode: mode.to_string(),
            streaming: None,
            k,
            tau: None,
            alpha: 0.0,
            lambda: 0.0,
            epsilon: 0.0,
            seed: None,
            id_bytes,
            num_vertices: stats.num_vertices,
            num_active_vertices: stats.num_active_vertices,
            num_edges: stats.num_edges,
            self_loops: stats.self_loops,
            mean_degree: stats.mean_degree,
            max_degree: stats.max_degree(),
            replication_factor: rf,
            edge_balance: edge_balance(&sizes),
            vertex_balance: vertex_balance(&cover_counts),
            sizes,
            cover_counts,
            max_size_bound: None,
            fallbacks: 0,
            warnings: Vec::new(),
            degree_buckets: degree_bucket_report(cover, &stats.degrees)
                .into_iter()
                .map(|b| Bucket {
                    min_degree: b.lo,
                    max_degree: b.hi,
                    vertices: b.vertices,
                    mean_replication: b.mean_replication,
                })
                .collect(),
            hep: None,
            timings: Timings::default(),
        }
    }

    pub fn from_hep_run(run: &HepRun, k: usize, tau: f64, id_bytes: usize, debug: bool) -> Self {
        let mut doc = StatsDoc::from_cover("hep", &run.stats, k, run.sizes.clone(), &run.cover, id_bytes);
        doc.tau = Some(tau);
        doc.max_size_bound = Some(run.max_size_bound);
        doc.fallbacks = run.fallbacks;
        if run.fallbacks > 0 {
            doc.warnings.push(format!(
                "{} streamed edges found no partition below the balance bound and went to the least-loaded one",
                run.fallbacks
            ));
        }
        let cs = core_vs_secondary_degrees(&run.core, &run.cover, &run.stats.degrees);
        let estimated_column_bytes = run.stats.low_volume(tau) * id_bytes as u64;
        doc.hep = Some(InMemory {
            tau_auto: false,
            memory_budget: None,
            high_degree_vertices: run.highs.len() as u64,
            spilled_edges: run.spilled,
            in_memory_edges: run.num_inmem_edges,
            capacity: run.capacity,
            in_memory_sizes: run.inmem_sizes.clone(),
            exhausted_at: run.exhausted_at,
            spilled_over: run.spilled_over,
            initial_entries: run.initial_entries,
            cleaned_entries: run.cleaned_entries,
            cleaned_fraction: run.cleaned_fraction(),
            memory: Memory {
                estimated_bytes: run.estimated_bytes,
                estimated_column_bytes,
                measured_column_bytes: run.column_bytes,
                measured_csr_bytes: run.csr_bytes,
                measured_bitset_bytes: run.bitset_bytes,
            },
            core_vs_secondary: CoreSecondary {
                core_vertices: cs.core_vertices,
                core_mean_degree: cs.core_mean,
                secondary_vertices: cs.secondary_vertices,
                secondary_mean_degree: cs.secondary_mean,
            },
            sealed_core_reads: debug.then_some(run.diagnostics.sealed_core_reads),
            ext_degree_mismatches: debug.then_some(run.diagnostics.ext_degree_mismatches),
            cleanup_leftovers: debug.then_some(run.diagnostics.cleanup_leftovers),
        });
        doc
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("stats serialize");
        s.push('\n');
        s
    }

    /// Short human-readable summary.
    pub fn summary(&self) -> String {
        let mut out = format!(
            "mode {}  k {}  edges {}  vertices {} (active {})\n\
             replication factor {:.4}  edge balance {:.4}  vertex balance {:.4}\n",
            self.mode,
            self.k,
            self.num_edges,
            self.num_vertices,
            self.num_active_vertices,
            self.replication_factor,
            self.edge_balance,
            self.vertex_balance
        );
        if let Some(h) = &self.hep {
            out.push_str(&format!(
                "tau {}  high-degree {}  spilled {}  cleaned {:.4}  est. {} B  column {} B\n",
                match self.tau {
                    Some(t) if t.is_infinite() => "inf".to_string(),
                    Some(t) => format!("{t}"),
                    None => "-".to_string(),
                },
                h.high_degree_vertices,
                h.spilled_edges,
                h.cleaned_fraction,
                h.memory.estimated_bytes,
                h.memory.measured_column_bytes
            ));
        }
        for w in &self.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        out
    }
}
