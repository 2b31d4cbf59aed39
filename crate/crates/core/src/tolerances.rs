//! Numerical tolerances shared by every module.

/// Norm preservation and Hermiticity of expectation values.
pub const NORM: f64 = 1e-12;
/// Identities between small operators (projectors, commutators of local ops).
pub const OPERATOR: f64 = 1e-13;
/// Physics-level assertions on chain observables.
pub const PHYSICS: f64 = 1e-10;
/// Below this total weight a collapse is treated as a null state.
pub const NULL_PROBABILITY: f64 = 1e-14;
/// Gaps smaller than this mark a ground state as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-6;
/// Requested eigenpair residual.
pub const EIGEN_RESIDUAL: f64 = 1e-9;
