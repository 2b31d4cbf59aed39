//! Measurement bases for spin-1 sites and boundary qubits.

use crate::qcore::linalg::{exp_i_hermitian, CVector};
use crate::qcore::spin::{pauli_eigenstate, spin1, spin1_zero_projection, Axis};

/// The basis `{e^{iS^γθ/2}|S^a=0>}` for outcomes `a = x, y, z`, in that order.
///
/// The half angle makes a basis tilted by θ implement a logical rotation by θ:
/// for γ = z, `|x,(z,θ)> = cos(θ/2)|S^x=0> + sin(θ/2)|S^y=0>` up to the gauge phase.
pub fn rotated_spin1_basis(gamma: Axis, theta: f64) -> [CVector; 3] {
    let rot = exp_i_hermitian(spin1().s(gamma), theta / 2.0);
    Axis::ALL.map(|a| &rot * spin1_zero_projection(a))
}

/// Site-0 measurement states. Outcome `s0` prepares the logical state `(B)^{s0}|β+>` on the
/// virtual partner of site 0, which means site 0 itself is found with eigenvalue `−(−1)^{s0}`.
pub fn boundary_basis(axis: Axis) -> [CVector; 2] {
    [pauli_eigenstate(axis, -1), pauli_eigenstate(axis, 1)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::{fidelity, identity, op_norm, CMatrix};
    use proptest::prelude::*;

    #[test]
    fn zero_angle_is_the_cartesian_basis() {
        let b = rotated_spin1_basis(Axis::Y, 0.0);
        for (a, v) in Axis::ALL.iter().zip(&b) {
            assert!((v - spin1_zero_projection(*a)).norm() < 1e-15);
        }
    }

    #[test]
    fn z_outcome_is_invariant_under_z_rotation() {
        let b = rotated_spin1_basis(Axis::Z, 1.234);
        assert!((fidelity(&b[2], &spin1_zero_projection(Axis::Z)) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn quarter_turn_overlap() {
        let b = rotated_spin1_basis(Axis::Z, std::f64::consts::FRAC_PI_2);
        let ov = b[0].dotc(&spin1_zero_projection(Axis::X)).norm();
        assert!((ov - std::f64::consts::FRAC_PI_4.cos()).abs() < 1e-13);
    }

    proptest! {
        #[test]
        fn bases_are_complete(g in 0usize..3, theta in -7.0f64..7.0) {
            let b = rotated_spin1_basis(Axis::ALL[g], theta);
            let sum: CMatrix = b.iter().map(|v| v * v.adjoint()).sum();
            prop_assert!(op_norm(&(sum - identity(3))) < 1e-13);
            for i in 0..3 {
                for j in 0..i {
                    prop_assert!(b[i].dotc(&b[j]).norm() < 1e-13);
                }
            }
        }
    }
}
