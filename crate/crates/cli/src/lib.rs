//! Manifest-driven front end for `qclass-core`: expression parsing,
//! manifest loading, task execution and JSON reports.

pub mod conventions;
pub mod expr;
pub mod manifest;
pub mod report;
pub mod run;

pub use expr::{parse_expression, ParseError};
pub use manifest::{load_manifest, parse_manifest, LoadError, Manifest};
pub use report::{Report, Status, TensorJson};
pub use run::{run_tasks, RunOptions};

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const LOAD_ERROR: i32 = 2;
}
