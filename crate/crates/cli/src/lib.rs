//! Command implementations behind the `cosafe-tamp` binary.
//!
//! Every command writes to caller-supplied streams and returns its exit code,
//! so the binary is a thin argument parser over this crate.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod report;
pub mod svg;

pub use commands::{bench, check_trajectory, BenchRow, BenchSummary, CheckFailure};
pub use report::{Outcome, RunReport};

pub const EXIT_SOLVED: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_TIMEOUT: i32 = 4;
pub const EXIT_DIVERGENCE: i32 = 5;
pub const EXIT_REJECTED: i32 = 6;
