//! Command implementations behind the CLI.

use std::path::{Path, PathBuf};
use std::time::Instant;

use hep_core::graph::{footprint_table, plan_tau, FootprintRow, GraphError, TauPlan};
use hep_core::metrics::{cover_sets, validate, ValidationReport};
use hep_core::nepp::NeppError;
use hep_core::oracle::{gen_named, gen_power_law, gen_uniform, reference_ne, Shape};
use hep_core::pipeline::{Phase, PhaseObserver};
use hep_core::streaming::{degree_hash_assign, random_assign};
use hep_core::{
    compute_degrees, run_hep, AssignmentSink, BitSet, DegreeStats, EdgeSource, HdrfParams, HepConfig, HepError,
    Instrumentation, Record, StreamingMode, StreamingState, VertexId,
};

use crate::assignment::{read_header, read_records, AssignmentWriter};
use crate::edgelist::{read_text_edge_list, write_edge_list, EdgeFile};
use crate::error::FileError;
use crate::spill::SpillFile;
use crate::stats::StatsDoc;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("no tau fits the memory budget of {budget} bytes; a fully pruned run needs {fixed_bytes}")]
    Infeasible { budget: u64, fixed_bytes: u64 },
    #[error(transparent)]
    File(#[from] FileError),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("{0}")]
    Usage(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Validation(_) => 1,
            RunError::Infeasible { .. } => 2,
            RunError::File(_) => 3,
            RunError::Internal(_) => 4,
            RunError::Usage(_) => 64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IdWidth {
    U32,
    U64,
}

impl IdWidth {
    pub fn bytes(self) -> usize {
        match self {
            IdWidth::U32 => 4,
            IdWidth::U64 => 8,
        }
    }

    pub fn from_bytes(b: usize) -> Option<Self> {
        match b {
            4 => Some(IdWidth::U32),
            8 => Some(IdWidth::U64),
            _ => None,
        }
    }
}

macro_rules! with_width {
    ($w:expr, $f:ident ( $($arg:expr),* )) => {
        match $w {
            IdWidth::U32 => $f::<u32>($($arg),*),
            IdWidth::U64 => $f::<u64>($($arg),*),
        }
    };
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TauSetting {
    Value(f64),
    Auto { budget: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Hep,
    ReferenceNe,
    Random,
    DegreeHash,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Streaming {
    Hdrf,
    Random,
}

#[derive(Clone, Debug)]
pub struct PartitionConfig {
    pub input: PathBuf,
    pub output: PathBuf,
    pub k: usize,
    pub tau: TauSetting,
    pub alpha: f64,
    pub id_width: IdWidth,
    pub spill: Option<PathBuf>,
    pub keep_spill: bool,
    pub stats: Option<PathBuf>,
    pub mode: Mode,
    pub streaming: Streaming,
    pub debug: bool,
    pub seed: u64,
}

impl PartitionConfig {
    pub fn new(input: impl Into<PathBuf>, output: impl Into<PathBuf>, k: usize, tau: TauSetting) -> Self {
        PartitionConfig {
            input: input.into(),
            output: output.into(),
            k,
            tau,
            alpha: HdrfParams::default().alpha,
            id_width: IdWidth::U32,
            spill: None,
            keep_spill: false,
            stats: None,
            mode: Mode::Hep,
            streaming: Streaming::Hdrf,
            debug: false,
            seed: 0,
        }
    }

    fn spill_path(&self) -> PathBuf {
        self.spill.clone().unwrap_or_else(|| {
            let mut p = self.output.clone().into_os_string();
            p.push(".spill");
            p.into()
        })
    }
}

/// Records per-phase wall time.
#[derive(Default)]
struct PhaseTimer {
    started: Option<Instant>,
    secs: [f64; 4],
}

impl PhaseObserver for PhaseTimer {
    fn begin(&mut self, _phase: Phase) {
        self.started = Some(Instant::now());
    }

    fn end(&mut self, phase: Phase) {
        let dt = self.started.take().map_or(0.0, |t| t.elapsed().as_secs_f64());
        let slot = match phase {
            Phase::Degrees => 0,
            Phase::Build => 1,
            Phase::InMemory => 2,
            Phase::Streaming => 3,
        };
        self.secs[slot] += dt;
    }
}

/// Sink wrapper that keeps cover sets and sizes for baselines that do not
/// track them.
struct Tracking<'a, S> {
    inner: &'a mut S,
    cover: Vec<BitSet>,
    sizes: Vec<u64>,
}

impl<I: VertexId, S: AssignmentSink<I>> AssignmentSink<I> for Tracking<'_, S> {
    fn assign(&mut self, u: I, v: I, partition: u32) {
        let p = partition as usize;
        self.sizes[p] += 1;
        self.cover[p].insert(u.index());
        self.cover[p].insert(v.index());
        self.inner.assign(u, v, partition);
    }
}

fn check_config(cfg: &PartitionConfig) -> Result<(), RunError> {
    if cfg.k == 0 || cfg.k > u32::MAX as usize {
        return Err(RunError::Usage("k must be between 1 and 2^32 - 1".into()));
    }
    if !cfg.alpha.is_finite() || cfg.alpha < 1.0 {
        return Err(RunError::Usage("alpha must be a finite number >= 1".into()));
    }
    if let TauSetting::Value(t) = cfg.tau {
        if t.is_nan() || t <= 0.0 {
            return Err(RunError::Usage("tau must be positive".into()));
        }
    }
    Ok(())
}

pub fn run_partition(cfg: &PartitionConfig) -> Result<StatsDoc, RunError> {
    check_config(cfg)?;
    let started = Instant::now();
    let mut doc = with_width!(cfg.id_width, partition_with(cfg))?;
    doc.timings.total_s = started.elapsed().as_secs_f64();
    if let Some(path) = &cfg.stats {
        std::fs::write(path, doc.to_json()).map_err(|e| FileError::io(path, e))?;
    }
    Ok(doc)
}

fn map_hep_error(e: HepError<FileError>) -> RunError {
    match e {
        HepError::Config(msg) => RunError::Usage(msg.into()),
        HepError::Graph(GraphError::Source(e) | GraphError::Spill(e)) | HepError::Streaming(e) => RunError::File(e),
        HepError::Graph(e @ GraphError::OffsetOverflow { .. }) => RunError::Usage(e.to_string()),
        HepError::Graph(GraphError::SourceChanged) => RunError::Internal("input changed between passes".into()),
        HepError::InMemory(e @ NeppError::LastPartitionOverflow { .. }) => RunError::Internal(e.to_string()),
        HepError::InMemory(NeppError::InvalidK) => RunError::Usage("k must be at least 1".into()),
    }
}

fn partition_with<I: VertexId>(cfg: &PartitionConfig) -> Result<StatsDoc, RunError> {
    let mut source = EdgeFile::<I>::open(&cfg.input)?;
    let params = HdrfParams {
        alpha: cfg.alpha,
        ..HdrfParams::default()
    };
    let k32 = cfg.k as u32;
    let mut doc = match cfg.mode {
        Mode::Hep => {
            let mut planning_s = 0.0;
            let (tau, budget) = match cfg.tau {
                TauSetting::Value(t) => (t, None),
                TauSetting::Auto { budget } => {
                    let t0 = Instant::now();
                    let stats = compute_degrees(&mut source).map_err(|e| map_hep_error(HepError::Graph(e)))?;
                    let plan = plan_tau(&stats, budget, cfg.k, I::BYTES);
                    planning_s = t0.elapsed().as_secs_f64();
                    match plan {
                        TauPlan::Feasible(row) => (row.tau, Some(budget)),
                        TauPlan::Infeasible { fixed_bytes } => {
                            return Err(RunError::Infeasible { budget, fixed_bytes })
                        }
                    }
                }
            };
            let hcfg = HepConfig {
                k: cfg.k,
                tau,
                hdrf: params,
                streaming: match cfg.streaming {
                    Streaming::Hdrf => StreamingMode::Hdrf,
                    Streaming::Random => StreamingMode::Random { seed: cfg.seed },
                },
                instrument: if cfg.debug {
                    Instrumentation::all()
                } else {
                    Instrumentation::default()
                },
            };
            let mut spill = SpillFile::<I>::create(cfg.spill_path(), cfg.keep_spill)?;
            let mut out = AssignmentWriter::<I>::create(&cfg.output, k32)?;
            let mut timer = PhaseTimer::default();
            let run = run_hep(&mut source, &mut spill, &mut out, &hcfg, &mut timer).map_err(map_hep_error)?;
            let written = out.finish()?;
            if written != run.stats.num_edges || run.sizes.iter().sum::<u64>() != run.stats.num_edges {
                return Err(RunError::Internal(format!(
                    "{written} records written for {} edges",
                    run.stats.num_edges
                )));
            }
            if cfg.debug {
                let d = &run.diagnostics;
                if d.sealed_core_reads + d.ext_degree_mismatches + d.cleanup_leftovers > 0 {
                    return Err(RunError::Internal(format!(
                        "instrumentation reported violations: {d:?}"
                    )));
                }
            }
            spill.mark_success();
            let mut doc = StatsDoc::from_hep_run(&run, cfg.k, tau, I::BYTES, cfg.debug);
            doc.streaming = Some(match cfg.streaming {
                Streaming::Hdrf => "hdrf".into(),
                Streaming::Random => "random".into(),
            });
            if cfg.streaming == Streaming::Random {
                doc.seed = Some(cfg.seed);
            }
            if let Some(h) = doc.hep.as_mut() {
                h.tau_auto = budget.is_some();
                h.memory_budget = budget;
            }
            doc.timings.degrees_s = timer.secs[0];
            doc.timings.build_s = timer.secs[1];
            doc.timings.in_memory_s = timer.secs[2];
            doc.timings.streaming_s = timer.secs[3];
            doc.timings.planning_s = planning_s;
            doc
        }
        Mode::ReferenceNe => {
            let edges = source.read_all()?;
            let stats = degrees_of(&edges);
            let mut out = AssignmentWriter::<I>::create(&cfg.output, k32)?;
            let t0 = Instant::now();
            let mut track = tracking(&mut out, cfg.k, stats.num_vertices);
            reference_ne(&edges, cfg.k, &mut track);
            let (cover, sizes) = (track.cover, track.sizes);
            let elapsed = t0.elapsed().as_secs_f64();
            out.finish()?;
            let mut doc = StatsDoc::from_cover("reference-ne", &stats, cfg.k, sizes, &cover, I::BYTES);
            doc.timings.in_memory_s = elapsed;
            doc
        }
        Mode::Random | Mode::DegreeHash => {
            let stats = compute_degrees(&mut source).map_err(|e| map_hep_error(HepError::Graph(e)))?;
            let mut st = StreamingState::fresh(cfg.k, stats.num_vertices, stats.num_edges, params);
            let mut out = AssignmentWriter::<I>::create(&cfg.output, k32)?;
            let t0 = Instant::now();
            let edges = source.edges()?.filter(|e| !matches!(e, Ok((u, v)) if u == v));
            if cfg.mode == Mode::Random {
                random_assign(edges, &mut st, cfg.seed, &mut out)?;
            } else {
                degree_hash_assign(edges, &mut st, &stats, &mut out)?;
            }
            let elapsed = t0.elapsed().as_secs_f64();
            out.finish()?;
            let name = if cfg.mode == Mode::Random {
                "random"
            } else {
                "degree-hash"
            };
            let mut doc = StatsDoc::from_cover(name, &stats, cfg.k, st.sizes.clone(), &st.cover, I::BYTES);
            if cfg.mode == Mode::Random {
                doc.seed = Some(cfg.seed);
            }
            doc.timings.streaming_s = elapsed;
            doc
        }
    };
    doc.alpha = params.alpha;
    doc.lambda = params.lambda;
    doc.epsilon = params.epsilon;
    Ok(doc)
}

fn tracking<S>(inner: &mut S, k: usize, n: usize) -> Tracking<'_, S> {
    Tracking {
        inner,
        cover: vec![BitSet::new(n); k],
        sizes: vec![0; k],
    }
}

fn degrees_of<I: VertexId>(edges: &[(I, I)]) -> DegreeStats {
    compute_degrees(&mut &edges[..]).expect("slice source cannot fail")
}

/// Output of `plan-tau`.
#[derive(Clone, Debug)]
pub struct PlanReport {
    pub plan: TauPlan,
    pub table: Vec<FootprintRow>,
    pub wall_s: f64,
}

pub fn run_plan_tau(input: &Path, k: usize, budget: u64, width: IdWidth) -> Result<PlanReport, RunError> {
    if k == 0 {
        return Err(RunError::Usage("k must be at least 1".into()));
    }
    with_width!(width, plan_with(input, k, budget))
}

fn plan_with<I: VertexId>(input: &Path, k: usize, budget: u64) -> Result<PlanReport, RunError> {
    let t0 = Instant::now();
    let mut source = EdgeFile::<I>::open(input)?;
    let stats = compute_degrees(&mut source).map_err(|e| map_hep_error(HepError::Graph(e)))?;
    let plan = plan_tau(&stats, budget, k, I::BYTES);
    let table = footprint_table(&stats, k, I::BYTES);
    Ok(PlanReport {
        plan,
        table,
        wall_s: t0.elapsed().as_secs_f64(),
    })
}

pub fn run_validate(input: &Path, assignment: &Path) -> Result<ValidationReport, RunError> {
    let header = read_header(assignment)?;
    let width = IdWidth::from_bytes(header.id_bytes as usize).expect("checked by read_header");
    let report = with_width!(width, validate_with(input, assignment))?;
    if report.is_valid() {
        Ok(report)
    } else {
        Err(RunError::Validation(report.to_string()))
    }
}

fn validate_with<I: VertexId>(input: &Path, assignment: &Path) -> Result<ValidationReport, RunError> {
    let edges = EdgeFile::<I>::open(input)?.read_all()?;
    let (header, records) = read_records::<I>(assignment)?;
    Ok(validate(&records, header.k as usize, edges))
}

/// Recomputes quality metrics from an assignment file. Degrees come from
/// `input` when given, otherwise from the records themselves.
pub fn run_stats(assignment: &Path, input: Option<&Path>) -> Result<StatsDoc, RunError> {
    let header = read_header(assignment)?;
    let width = IdWidth::from_bytes(header.id_bytes as usize).expect("checked by read_header");
    with_width!(width, stats_with(assignment, input))
}

fn stats_with<I: VertexId>(assignment: &Path, input: Option<&Path>) -> Result<StatsDoc, RunError> {
    let (header, records) = read_records::<I>(assignment)?;
    let k = header.k as usize;
    let stats = match input {
        Some(p) => degrees_of(&EdgeFile::<I>::open(p)?.read_all()?),
        None => degrees_of(&records.iter().map(|r| (r.u, r.v)).collect::<Vec<_>>()),
    };
    let n = stats.num_vertices.max(
        records
            .iter()
            .map(|r| r.u.index().max(r.v.index()) + 1)
            .max()
            .unwrap_or(0),
    );
    let cover = cover_sets(&records, k, n).map_err(|e| RunError::Validation(e.to_string()))?;
    let mut sizes = vec![0u64; k];
    for r in &records {
        sizes[r.partition as usize] += 1;
    }
    Ok(StatsDoc::from_cover("assignment", &stats, k, sizes, &cover, I::BYTES))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GenSpec {
    Named(Shape),
    PowerLaw {
        n: usize,
        m: usize,
        exponent: f64,
        seed: u64,
    },
    Uniform {
        n: usize,
        m: usize,
        seed: u64,
    },
}

pub fn generate<I: VertexId>(spec: GenSpec) -> Vec<(I, I)> {
    match spec {
        GenSpec::Named(shape) => gen_named(shape),
        GenSpec::PowerLaw { n, m, exponent, seed } => gen_power_law(n, m, exponent, seed),
        GenSpec::Uniform { n, m, seed } => gen_uniform(n, m, seed),
    }
}

pub fn run_gen(spec: GenSpec, output: &Path, width: IdWidth) -> Result<u64, RunError> {
    if let GenSpec::PowerLaw { n, m, exponent, .. } = spec {
        if n < 2 || m < 1 || exponent.is_nan() || exponent <= 2.0 {
            return Err(RunError::Usage(
                "power-law needs n >= 2, m >= 1 and exponent > 2".into(),
            ));
        }
    }
    if let GenSpec::Uniform { n, .. } = spec {
        if n < 2 {
            return Err(RunError::Usage("uniform needs n >= 2".into()));
        }
    }
    Ok(match width {
        IdWidth::U32 => write_edge_list(output, generate::<u32>(spec))?,
        IdWidth::U64 => write_edge_list(output, generate::<u64>(spec))?,
    })
}

pub fn run_convert(input: &Path, output: &Path, width: IdWidth) -> Result<u64, RunError> {
    Ok(match width {
        IdWidth::U32 => write_edge_list(output, read_text_edge_list::<u32>(input)?)?,
        IdWidth::U64 => write_edge_list(output, read_text_edge_list::<u64>(input)?)?,
    })
}

/// Records of an assignment file, for callers that know the width.
pub fn load_assignment<I: VertexId>(path: &Path) -> Result<Vec<Record<I>>, RunError> {
    Ok(read_records::<I>(path)?.1)
}

/// Parses a byte count with an optional binary suffix: `512`, `64K`, `1.5G`.
pub fn parse_bytes(s: &str) -> Result<u64, String> {
    let t = s.trim();
    let (num, mult) = match t.char_indices().last() {
        Some((i, c)) if c.is_ascii_alphabetic() => {
            let m: u64 = match c.to_ascii_uppercase() {
                'B' => 1,
                'K' => 1 << 10,
                'M' => 1 << 20,
                'G' => 1 << 30,
                'T' => 1 << 40,
                _ => return Err(format!("unknown size suffix in {s:?}")),
            };
            (&t[..i], m)
        }
        _ => (t, 1),
    };
    let v: f64 = num.trim().parse().map_err(|_| format!("invalid byte count {s:?}"))?;
    if !v.is_finite() || v < 0.0 {
        return Err(format!("invalid byte count {s:?}"));
    }
    Ok((v * mult as f64).floor() as u64)
}
