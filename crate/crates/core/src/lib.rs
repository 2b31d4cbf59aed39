//! Measurement-based quantum computation on spin-1 chains with symmetry-protected
//! topological order.
//!
//! The crate is organised bottom-up:
//!
//! * [`qcore`]: tensor-product registers, dense state vectors, local operators.
//! * [`states`]: the boundary-decorated AKLT state, Haldane-family Hamiltonians, ground states.
//! * [`mbqc`]: adaptive single-site measurement protocols, exact path sums, teleportation.
//! * [`observables`]: string order parameters and the closed-form single-rotation readout.
//! * [`algebra`]: the (Z₂)^m logical-operator framework, transfer matrices, channels and
//!   block-local measurement.
//! * [`cli`]: configuration files and the batch commands behind the `sptmbqc` binary.

pub mod algebra;
pub mod cli;
pub mod error;
pub mod kv;
pub mod mbqc;
pub mod observables;
pub mod qcore;
pub mod rng;
pub mod states;
pub mod tolerances;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
