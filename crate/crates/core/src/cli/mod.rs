//! Batch front-end behind the `sptmbqc` binary.
//!
//! Each command reads a [`RunConfig`], writes JSON (and for `sweep`, CSV) into the output
//! directory and reports whether every check it performed passed. Output files carry a
//! [`Header`] with the crate version, seed, configuration hash and group-element order.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{build_state, execute, obtain_state, run_protocol, Command, CommandOutcome, StateMetadata, StateOrigin};
pub use config::{Model, Overrides, RunConfig, StateParams, StateSource, OUT_ENV};
pub use output::{to_json, Header};
