//! Resource states: valence-bond construction, Hamiltonians, ground states, symmetry checks.

pub mod aklt;
pub mod eigen;
pub mod hamiltonian;
pub mod storage;
pub mod symmetry;
pub mod vbs;

pub use aklt::build_aklt_prime;
pub use eigen::{ground_state, GroundState, Solver};
pub use hamiltonian::{build_hamiltonian, BulkCoupling, HamiltonianParams, SparseHamiltonian};
pub use storage::{load_state, save_state};
pub use symmetry::{symmetry_residuals, u_alpha, AxisSymmetry};
pub use vbs::{AkltChain, DenseSource, ExpectationSource};
