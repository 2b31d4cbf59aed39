//! The Z₂×Z₂ symmetry `U_α = −σ₀^α ⊗ Π_j e^{iπS_j^α} ⊗ σ_{N+1}^α`.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::qcore::linalg::real;
use crate::qcore::spin::{pauli, spin_operators, Axis};
use crate::qcore::{ChainSpec, OperatorString, StateVector};

pub fn u_alpha(spec: &ChainSpec, axis: Axis) -> OperatorString {
    let bulk = spin_operators(spec.bulk_dim()).map(|s| s.pi_rotation(axis).clone());
    let mut pairs = vec![(0, pauli(axis))];
    if let Ok(rot) = bulk {
        pairs.extend((1..=spec.n_bulk()).map(|j| (j, rot.clone())));
    }
    pairs.push((spec.right_site(), pauli(axis)));
    OperatorString::product_of(pairs).expect("sites increase").scaled(real(-1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisSymmetry {
    pub axis: Axis,
    /// `‖U|ψ> − <ψ|U|ψ>|ψ>‖`.
    pub residual: f64,
    pub expectation: f64,
    /// `<ψ|U|ψ>` rounded to ±1.
    pub sign: i8,
}

pub fn symmetry_residuals(state: &StateVector) -> Result<Vec<AxisSymmetry>> {
    let spec = state.chain_spec()?;
    Axis::ALL
        .iter()
        .map(|&axis| {
            let u = u_alpha(&spec, axis);
            let moved = state.apply_string(&u)?;
            let ev = state.inner(&moved)?;
            let residual = moved
                .amplitudes()
                .iter()
                .zip(state.amplitudes())
                .map(|(m, s)| (m - ev * s).norm_sqr())
                .sum::<f64>()
                .sqrt();
            Ok(AxisSymmetry { axis, residual, expectation: ev.re, sign: if ev.re >= 0.0 { 1 } else { -1 } })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::{C64, ONE, ZERO};
    use crate::qcore::spin::pauli_eigenstate;
    use crate::qcore::CVector;
    use crate::states::aklt::build_aklt_prime;

    #[test]
    fn aklt_prime_is_invariant() {
        let psi = build_aklt_prime(4).unwrap();
        for r in symmetry_residuals(&psi).unwrap() {
            assert!(r.residual < 1e-10, "{r:?}");
            assert_eq!(r.sign, 1);
        }
    }

    #[test]
    fn random_state_is_not_symmetric() {
        use rand::{Rng, SeedableRng};
        let spec = ChainSpec::spin1(3).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let amps: Vec<C64> = (0..spec.total_dim()).map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
        let psi = StateVector::normalized(spec.register().clone(), amps).unwrap();
        assert!(symmetry_residuals(&psi).unwrap().iter().all(|r| r.residual > 0.1));
    }

    #[test]
    fn m_zero_product_is_z_symmetric() {
        let spec = ChainSpec::spin1(3).unwrap();
        let zero = CVector::from_column_slice(&[ZERO, ONE, ZERO]);
        let up = pauli_eigenstate(Axis::Z, 1);
        let down = pauli_eigenstate(Axis::Z, -1);
        let psi = StateVector::product(spec.register().clone(), &[up, zero.clone(), zero.clone(), zero, down]).unwrap();
        let z = symmetry_residuals(&psi).unwrap()[2];
        assert!(z.residual < 1e-12);
    }
}
