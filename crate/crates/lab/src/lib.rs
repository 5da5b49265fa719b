//! Study harness: TOML configurations, sweep execution with resumable points,
//! the `LLSNAP01` snapshot container, and CSV/JSON/gnuplot reports.

pub mod config;
pub mod error;
pub mod report;
pub mod snapshot;
pub mod study;
pub mod suites;

pub use config::{StudyConfig, StudyKind};
pub use error::{LabError, Result};
pub use report::{Check, PointResult, StudyReport};
pub use study::{run_study, RunOptions};
