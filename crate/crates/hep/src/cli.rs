//! Argument parsing and dispatch for the `hep` binary.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hep_core::graph::TauPlan;
use hep_core::oracle::Shape;

use crate::run::{
    parse_bytes, run_convert, run_gen, run_partition, run_plan_tau, run_stats, run_validate, GenSpec, IdWidth, Mode,
    PartitionConfig, RunError, Streaming, TauSetting,
};

#[derive(Parser, Debug)]
#[command(name = "hep", version, about = "Hybrid edge partitioner for large power-law graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Partition a binary edge list into k parts.
    Partition(PartitionArgs),
    /// Pick the largest tau whose estimated footprint fits a memory budget.
    PlanTau(PlanArgs),
    /// Check that an assignment covers every input edge exactly once.
    Validate(ValidateArgs),
    /// Recompute quality metrics from an assignment file.
    Stats(StatsArgs),
    /// Write a generated graph as a binary edge list.
    Gen(GenArgs),
    /// Convert a text edge list to the binary format.
    Convert(ConvertArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Hep,
    ReferenceNe,
    Random,
    DegreeHash,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StreamingArg {
    Hdrf,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ShapeArg {
    Path,
    Star,
    Clique,
    Grid,
    PowerLaw,
    Uniform,
}

fn parse_width(s: &str) -> Result<IdWidth, String> {
    match s {
        "4" => Ok(IdWidth::U32),
        "8" => Ok(IdWidth::U64),
        _ => Err("id width must be 4 or 8".into()),
    }
}

fn parse_tau(s: &str) -> Result<TauArg, String> {
    match s.to_ascii_lowercase().as_str() {
        "inf" | "infinity" => Ok(TauArg::Value(f64::INFINITY)),
        "auto" => Ok(TauArg::Auto),
        other => match other.parse::<f64>() {
            Ok(t) if t > 0.0 => Ok(TauArg::Value(t)),
            _ => Err(format!("tau must be a positive number, inf or auto, got {s:?}")),
        },
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TauArg {
    Value(f64),
    Auto,
}

#[derive(Args, Debug)]
pub struct PartitionArgs {
    /// Binary edge list.
    #[arg(short, long)]
    pub input: PathBuf,
    /// Number of partitions.
    #[arg(short, long, value_parser = clap::value_parser!(u32).range(1..))]
    pub k: u32,
    /// Degree threshold factor: a number, `inf`, or `auto` (needs --memory).
    #[arg(long, default_value = "10", value_parser = parse_tau)]
    pub tau: TauArg,
    /// Memory budget for `--tau auto`, e.g. 512M.
    #[arg(long, value_parser = parse_bytes)]
    pub memory: Option<u64>,
    /// Streaming balance slack.
    #[arg(long, default_value_t = 1.05)]
    pub alpha: f64,
    /// Vertex id width in bytes (4 or 8).
    #[arg(long = "id-bytes", default_value = "4", value_parser = parse_width)]
    pub id_width: IdWidth,
    /// Assignment file to write.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Spill file for high-to-high edges; defaults to `<output>.spill`.
    #[arg(long)]
    pub spill: Option<PathBuf>,
    /// Keep the spill file after a successful run.
    #[arg(long)]
    pub keep_spill: bool,
    /// Stats document (JSON).
    #[arg(long)]
    pub stats: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "hep")]
    pub mode: ModeArg,
    /// How `hep` mode places spilled edges.
    #[arg(long, value_enum, default_value = "hdrf")]
    pub streaming: StreamingArg,
    /// Access logging and recount checks in the in-memory phase.
    #[arg(long)]
    pub debug: bool,
    /// Seed for random placement.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct PlanArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long, value_parser = clap::value_parser!(u32).range(1..))]
    pub k: u32,
    /// Memory budget, e.g. 272, 64K, 2G.
    #[arg(long, value_parser = parse_bytes)]
    pub memory: u64,
    #[arg(long = "id-bytes", default_value = "4", value_parser = parse_width)]
    pub id_width: IdWidth,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub assignment: PathBuf,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    #[arg(short, long)]
    pub assignment: PathBuf,
    /// Edge list for degrees; without it degrees come from the records.
    #[arg(short, long)]
    pub input: Option<PathBuf>,
    /// Write the document here instead of stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub shape: ShapeArg,
    /// Vertex count (path, clique, power-law, uniform) or leaves (star).
    #[arg(short, long, default_value_t = 0)]
    pub n: usize,
    /// Edge count (power-law, uniform).
    #[arg(short, long, default_value_t = 0)]
    pub m: usize,
    /// Grid width and height.
    #[arg(long, default_value_t = 0)]
    pub width: usize,
    #[arg(long, default_value_t = 0)]
    pub height: usize,
    /// Power-law tail exponent.
    #[arg(long, default_value_t = 2.5)]
    pub exponent: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "id-bytes", default_value = "4", value_parser = parse_width)]
    pub id_width: IdWidth,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Args, Debug)]
pub struct ConvertArgs {
    /// Text edge list.
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long = "id-bytes", default_value = "4", value_parser = parse_width)]
    pub id_width: IdWidth,
}

/// Runs a parsed command, printing results to stdout.
pub fn execute(cli: Cli) -> Result<(), RunError> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let print = |out: &mut std::io::StdoutLock, s: &str| {
        let _ = out.write_all(s.as_bytes());
    };
    match cli.command {
        Command::Partition(a) => {
            let tau = match (a.tau, a.memory) {
                (TauArg::Value(t), _) => TauSetting::Value(t),
                (TauArg::Auto, Some(budget)) => TauSetting::Auto { budget },
                (TauArg::Auto, None) => return Err(RunError::Usage("--tau auto needs --memory".into())),
            };
            let cfg = PartitionConfig {
                input: a.input,
                output: a.output,
                k: a.k as usize,
                tau,
                alpha: a.alpha,
                id_width: a.id_width,
                spill: a.spill,
                keep_spill: a.keep_spill,
                stats: a.stats,
                mode: match a.mode {
                    ModeArg::Hep => Mode::Hep,
                    ModeArg::ReferenceNe => Mode::ReferenceNe,
                    ModeArg::Random => Mode::Random,
                    ModeArg::DegreeHash => Mode::DegreeHash,
                },
                streaming: match a.streaming {
                    StreamingArg::Hdrf => Streaming::Hdrf,
                    StreamingArg::Random => Streaming::Random,
                },
                debug: a.debug,
                seed: a.seed,
            };
            let doc = run_partition(&cfg)?;
            print(&mut out, &doc.summary());
        }
        Command::PlanTau(a) => {
            let report = run_plan_tau(&a.input, a.k as usize, a.memory, a.id_width)?;
            let mut s = String::from("max_low_degree\ttau\tcolumn_entries\tbytes\n");
            for row in &report.table {
                s.push_str(&format!(
                    "{}\t{}\t{}\t{}\n",
                    row.max_low_degree,
                    fmt_tau(row.tau),
                    row.column_entries,
                    row.bytes
                ));
            }
            match report.plan {
                TauPlan::Feasible(row) => {
                    s.push_str(&format!(
                        "chosen tau {} ({} bytes of {} budget)\nplanning time {:.6} s\n",
                        fmt_tau(row.tau),
                        row.bytes,
                        a.memory,
                        report.wall_s
                    ));
                    print(&mut out, &s);
                }
                TauPlan::Infeasible { fixed_bytes } => {
                    s.push_str(&format!("planning time {:.6} s\n", report.wall_s));
                    print(&mut out, &s);
                    return Err(RunError::Infeasible {
                        budget: a.memory,
                        fixed_bytes,
                    });
                }
            }
        }
        Command::Validate(a) => {
            let report = run_validate(&a.input, &a.assignment)?;
            print(&mut out, &format!("valid: {report}\n"));
        }
        Command::Stats(a) => {
            let doc = run_stats(&a.assignment, a.input.as_deref())?;
            match a.output {
                Some(p) => {
                    std::fs::write(&p, doc.to_json())
                        .map_err(|e| crate::error::FileError::Io { path: p, source: e })?;
                    print(&mut out, &doc.summary());
                }
                None => print(&mut out, &doc.to_json()),
            }
        }
        Command::Gen(a) => {
            let spec = match a.shape {
                ShapeArg::Path => GenSpec::Named(Shape::Path(a.n)),
                ShapeArg::Star => GenSpec::Named(Shape::Star(a.n)),
                ShapeArg::Clique => GenSpec::Named(Shape::Clique(a.n)),
                ShapeArg::Grid => GenSpec::Named(Shape::Grid(a.width, a.height)),
                ShapeArg::PowerLaw => GenSpec::PowerLaw {
                    n: a.n,
                    m: a.m,
                    exponent: a.exponent,
                    seed: a.seed,
                },
                ShapeArg::Uniform => GenSpec::Uniform {
                    n: a.n,
                    m: a.m,
                    seed: a.seed,
                },
            };
            let written = run_gen(spec, &a.output, a.id_width)?;
            print(&mut out, &format!("wrote {written} edges to {}\n", a.output.display()));
        }
        Command::Convert(a) => {
            let written = run_convert(&a.input, &a.output, a.id_width)?;
            print(&mut out, &format!("wrote {written} edges to {}\n", a.output.display()));
        }
    }
    Ok(())
}

fn fmt_tau(t: f64) -> String {
    if t.is_infinite() {
        "inf".into()
    } else {
        format!("{t}")
    }
}
