//! File formats, pipeline driver and command-line front end for the hybrid
//! edge partitioner in `hep-core`.

pub mod assignment;
pub mod cli;
pub mod edgelist;
pub mod error;
pub mod run;
pub mod spill;
pub mod stats;

pub use assignment::{read_records, AssignmentWriter};
pub use edgelist::{write_edge_list, EdgeFile};
pub use error::FileError;
pub use run::{run_partition, IdWidth, Mode, PartitionConfig, RunError, Streaming, TauSetting};
pub use spill::SpillFile;
pub use stats::StatsDoc;
