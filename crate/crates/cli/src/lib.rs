//! Command-line front end for `cnp-core`.
//!
//! Instances are JSON documents `{schema_version: 1, kind, payload}` checked
//! against `schemas/instance.schema.json` before anything is computed;
//! reports follow `schemas/report.schema.json` and are byte-identical for
//! identical input (unless wall time is requested).

// `!(x >= 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod complex;
pub mod error;
pub mod instance;
pub mod output;
pub mod payload;
pub mod weak_hardy;

pub use commands::{execute, Outcome, RunOptions, Status};
pub use error::{CliError, Result};
pub use instance::{Instance, Kind};
