//! Mixed-dimension tensor-product spaces, state vectors and the spin operator zoo.

pub mod linalg;
pub mod operator;
pub mod register;
pub mod spin;
pub mod state;

pub use linalg::{CMatrix, CVector, C64};
pub use operator::{LocalOperator, OperatorString, OperatorSum};
pub use register::{flat_index, ChainSpec, Register};
pub use spin::{pair_projector, pair_projectors, pauli, spin1, spin_operators, Axis, SpinOperators};
pub use state::StateVector;

use crate::error::Result;

/// `(I ⊗ … ⊗ op ⊗ … ⊗ I)|state>`.
pub fn apply_local(state: &StateVector, op: &LocalOperator) -> Result<StateVector> {
    state.apply_local(op)
}

/// `<state| ops |state>`.
pub fn expectation(state: &StateVector, ops: &OperatorString) -> Result<C64> {
    state.expectation(ops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::op_norm;

    #[test]
    fn spins_on_different_sites_commute() {
        let reg = Register::new(vec![2, 3, 3, 2]).unwrap();
        let s = spin1();
        for a in Axis::ALL {
            for b in Axis::ALL {
                let sa = OperatorString::single(1, s.s(a).clone()).unwrap().to_dense(&reg).unwrap();
                let sb = OperatorString::single(2, s.s(b).clone()).unwrap().to_dense(&reg).unwrap();
                assert!(op_norm(&(&sa * &sb - &sb * &sa)) < 1e-14);
            }
        }
    }
}
