//! Batched prefix-array access for the positional Burrows-Wheeler transform.
//!
//! A [`PbwtIndex`] keeps every PBWT column run-length compressed, each run
//! tagged with the prefix-array entry at its last position. From that alone,
//! [`prefix::sweep`] rebuilds `a_0, ..., a_l` one after another in time
//! proportional to the number of runs, and [`divergence::sweep_with_divergence`]
//! additionally rebuilds the absolute divergence arrays. [`report`] uses the
//! sweep to answer a whole batch of SMEM intervals at constant cost per
//! reported haplotype.

pub mod cli;
pub mod divergence;
pub mod error;
pub mod format;
pub mod index;
pub mod panel;
pub mod prefix;
pub mod report;
pub mod smem;
pub mod stats;
pub mod tree;
pub mod verify;

pub use error::{Error, Result};
pub use index::{build_full_arrays, build_index, FullArrays, PbwtIndex, RleColumn, Run};
pub use panel::{parse_panel, parse_queries, HaplotypePanel, QuerySet};
pub use prefix::{PieceLayout, PrefixListWorkspace};
pub use report::{compute_threshold, BatchPolicy, EndpointRequest, ReportEntry};
pub use smem::{SmemBatchInput, SmemRecord};
pub use stats::OpCounts;
