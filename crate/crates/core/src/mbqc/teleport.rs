//! Three-qubit teleportation through a tilted Bell measurement.
//!
//! Qubit `a` holds `|ψ>`, qubits `b, c` share a singlet. Measuring `(a, b)` in the triplet
//! basis tilted by θ about γ plus the singlet leaves on `c`:
//! * outcome γ: `σ^γ|ψ>`;
//! * outcome α ≠ γ: `σ^α e^{−iσ^γθ/2}|ψ>`;
//! * singlet outcome: `|ψ>`.

use serde::{Deserialize, Serialize};

use super::basis::rotated_spin1_basis;
use crate::error::{Error, Result};
use crate::qcore::linalg::{exp_i_hermitian, fidelity, kron, CVector, ZERO};
use crate::qcore::spin::{pauli, singlet, triplet_isometry, Axis};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BellOutcome {
    Triplet(Axis),
    Singlet,
}

impl BellOutcome {
    pub const ALL: [BellOutcome; 4] =
        [BellOutcome::Triplet(Axis::X), BellOutcome::Triplet(Axis::Y), BellOutcome::Triplet(Axis::Z), BellOutcome::Singlet];
}

#[derive(Debug, Clone, PartialEq)]
pub struct TeleportBranch {
    pub outcome: BellOutcome,
    /// Normalized state of qubit c (zero vector when the branch has no weight).
    pub post_state: CVector,
    pub probability: f64,
}

/// Two-qubit measurement states on `(a, b)`: tilted triplet then singlet.
pub fn bell_basis(gamma: Axis, theta: f64) -> [CVector; 4] {
    let w = triplet_isometry();
    let [x, y, z] = rotated_spin1_basis(gamma, theta);
    [w.adjoint() * x, w.adjoint() * y, w.adjoint() * z, singlet()]
}

/// Measures `(a, b)` of the 8-dimensional state `a ⊗ b ⊗ c` (a most significant).
pub fn teleport_step(state: &CVector, gamma: Axis, theta: f64) -> Result<Vec<TeleportBranch>> {
    if state.len() != 8 {
        return Err(Error::DimensionMismatch(format!("teleportation needs 3 qubits, got dimension {}", state.len())));
    }
    let norm = state.norm_squared();
    // Weight of the singlet on (b, c).
    let s = singlet();
    let mut bc_weight = 0.0;
    for a in 0..2 {
        let mut ov = ZERO;
        for bc in 0..4 {
            ov += s[bc].conj() * state[4 * a + bc];
        }
        bc_weight += ov.norm_sqr();
    }
    if bc_weight / norm < 1.0 - 1e-10 {
        return Err(Error::Precondition(format!("qubits b, c are not in the singlet (weight {:.3e})", bc_weight / norm)));
    }
    let basis = bell_basis(gamma, theta);
    Ok(BellOutcome::ALL
        .iter()
        .zip(basis.iter())
        .map(|(&outcome, bra)| {
            let mut c = CVector::zeros(2);
            for ab in 0..4 {
                let b = bra[ab].conj();
                for q in 0..2 {
                    c[q] += b * state[2 * ab + q];
                }
            }
            let p = c.norm_squared() / norm;
            let post = if p > 0.0 { c.normalize() } else { c };
            TeleportBranch { outcome, post_state: post, probability: p }
        })
        .collect())
}

/// The state predicted on qubit c for each outcome.
pub fn predicted_post_state(psi: &CVector, outcome: BellOutcome, gamma: Axis, theta: f64) -> CVector {
    match outcome {
        BellOutcome::Singlet => psi.clone(),
        BellOutcome::Triplet(a) if a == gamma => pauli(a) * psi,
        BellOutcome::Triplet(a) => pauli(a) * exp_i_hermitian(&pauli(gamma), -theta / 2.0) * psi,
    }
}

/// `|ψ>_a ⊗ singlet_{bc}`.
pub fn teleport_input(psi: &CVector) -> CVector {
    let a = crate::qcore::linalg::CMatrix::from_column_slice(2, 1, psi.as_slice());
    let bc = crate::qcore::linalg::CMatrix::from_column_slice(4, 1, singlet().as_slice());
    let joint = kron(&a, &bc);
    CVector::from_column_slice(joint.as_slice())
}

/// Largest `1 − fidelity` over outcomes with nonzero weight.
pub fn teleport_fidelity_defect(psi: &CVector, gamma: Axis, theta: f64) -> Result<f64> {
    let branches = teleport_step(&teleport_input(psi), gamma, theta)?;
    Ok(branches
        .iter()
        .filter(|b| b.probability > 1e-14)
        .map(|b| 1.0 - fidelity(&b.post_state, &predicted_post_state(psi, b.outcome, gamma, theta)))
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::C64;
    use rand::{Rng, SeedableRng};

    fn random_qubit(rng: &mut impl Rng) -> CVector {
        CVector::from_column_slice(&[
            C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5),
            C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5),
        ])
        .normalize()
    }

    #[test]
    fn zero_angle_gives_pauli_byproducts() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let psi = random_qubit(&mut rng);
        let branches = teleport_step(&teleport_input(&psi), Axis::Z, 0.0).unwrap();
        let x = branches.iter().find(|b| b.outcome == BellOutcome::Triplet(Axis::X)).unwrap();
        assert!((fidelity(&x.post_state, &(pauli(Axis::X) * &psi)) - 1.0).abs() < 1e-12);
        let total: f64 = branches.iter().map(|b| b.probability).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matching_outcome_ignores_angle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let psi = random_qubit(&mut rng);
        for theta in [0.3, 1.7, -2.2] {
            let branches = teleport_step(&teleport_input(&psi), Axis::Z, theta).unwrap();
            let z = &branches[2];
            assert!((fidelity(&z.post_state, &(pauli(Axis::Z) * &psi)) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn all_outcomes_match_prediction() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let psi = random_qubit(&mut rng);
            for gamma in Axis::ALL {
                let theta = rng.gen::<f64>() * 6.0 - 3.0;
                assert!(teleport_fidelity_defect(&psi, gamma, theta).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_broken_resource() {
        let mut s = CVector::zeros(8);
        s[0] = C64::new(1.0, 0.0);
        assert!(matches!(teleport_step(&s, Axis::Z, 0.1), Err(Error::Precondition(_))));
    }
}
