//! Experiment harness for fire dynamics on random recursive trees.
//!
//! The algorithms live in [`firetree_core`]; this crate adds what needs the
//! standard library: a deterministic parallel trial runner, goodness-of-fit
//! tests with p-values, text formats for trees and outcomes, and the named
//! experiments behind the `firetree` command-line tool.

pub mod config;
mod error;
pub mod experiments;
pub mod report;
pub mod runner;
pub mod stats;
pub mod textio;

pub use config::{ExperimentConfig, Regime, RegimeClass};
pub use error::{Error, Result};
pub use report::ExperimentReport;
pub use stats::{TestReport, Verdict};
