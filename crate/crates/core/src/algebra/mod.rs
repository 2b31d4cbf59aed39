//! The `(Z₂)^m` logical-operator calculus for symmetric resource chains.
//!
//! A [`RepresentationBundle`] carries the symmetry data of one chain; everything else
//! (logical operators, transfer matrices, effective channels, block-local measurements and
//! the verification report) is computed from it and a resource state.

pub mod blocklocal;
pub mod bundle;
pub mod channel;
pub mod group;
pub mod logical;
pub mod transfer;

pub use bundle::{parse_bundle, spin1_bundle, spin1_parts, BundleParts, BundleSummary, RepresentationBundle, SymmetrySign};
pub use group::{Group, GroupElement};
pub use logical::{initial_expectations, logical_subspace, tbar, LogicalFrame, LogicalSubspace};
pub use transfer::{
    evolved_expectations, lk_rk_beta, mk_matrix, EvolvedExpectations, Gate, LkRk, MkMatrix, OperatorMatrix,
};
pub use channel::{cptp_apply, cptp_heisenberg, unitarity_scaling, ChannelParams, UnitarityPoint};
pub use blocklocal::{
    block_local_distribution, block_local_measure, sample_block_local, BlockLocalDistribution, BlockOutcome, TildeOperators,
};
pub mod verify;
pub use verify::{verify_bundle, CheckResult, VerifyOptions, VerifyReport};
