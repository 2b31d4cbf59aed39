//! Valence-bond construction of the boundary-decorated AKLT state.

use crate::error::{Error, Result};
use crate::qcore::linalg::{C64, ZERO};
use crate::qcore::spin::{singlet, triplet_isometry};
use crate::qcore::{ChainSpec, StateVector};

/// Largest bulk length built densely (dimension 4·3^N).
pub const MAX_DENSE_BULK: usize = 13;

/// The AKLT state with spin-1/2 sites attached at both ends.
///
/// Virtual qubits `0, (1L,1R), …, (NL,NR), N+1` are paired in singlets
/// `(0,1L), (1R,2L), …, (NR,N+1)`; each bulk pair is mapped onto its triplet (a spin-1 site)
/// from left to right, and the result is normalized once.
pub fn build_aklt_prime(n_bulk: usize) -> Result<StateVector> {
    if n_bulk > MAX_DENSE_BULK {
        return Err(Error::InvalidParameter(format!(
            "N = {n_bulk} exceeds the dense memory budget (N ≤ {MAX_DENSE_BULK})"
        )));
    }
    let spec = ChainSpec::spin1(n_bulk)?;
    let w = triplet_isometry();
    let bond = singlet();
    let s = |a: usize, b: usize| bond[2 * a + b];

    // Amplitudes over (physical prefix, dangling virtual qubit); starts with the (0, 1L) singlet.
    let mut amps: Vec<C64> = bond.iter().cloned().collect();
    for _ in 0..n_bulk {
        let prefix = amps.len() / 2;
        let mut next = vec![ZERO; prefix * 3 * 2];
        for p in 0..prefix {
            for left in 0..2 {
                let a = amps[2 * p + left];
                if a == ZERO {
                    continue;
                }
                for right in 0..2 {
                    for m in 0..3 {
                        let wv = w[(m, 2 * left + right)];
                        if wv == ZERO {
                            continue;
                        }
                        for dangling in 0..2 {
                            next[(p * 3 + m) * 2 + dangling] += wv * a * s(right, dangling);
                        }
                    }
                }
            }
        }
        amps = next;
    }
    StateVector::normalized(spec.register().clone(), amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::real;
    use crate::qcore::spin::{pauli, spin1, Axis};
    use crate::qcore::OperatorString;

    /// Total spin squared through the Casimir of the summed spin operators.
    fn total_spin_squared(psi: &StateVector) -> f64 {
        let n = psi.register().n_sites();
        let s1 = spin1();
        let mut total = 0.0;
        for axis in Axis::ALL {
            let local = |site: usize| {
                if site == 0 || site == n - 1 {
                    pauli(axis) * real(0.5)
                } else {
                    s1.s(axis).clone()
                }
            };
            let mut v = vec![ZERO; psi.dim()];
            for site in 0..n {
                let t = psi.apply_string(&OperatorString::single(site, local(site)).unwrap()).unwrap();
                v.iter_mut().zip(t.amplitudes()).for_each(|(a, b)| *a += b);
            }
            total += v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        }
        total
    }

    #[test]
    fn single_site_state_is_a_total_singlet() {
        let psi = build_aklt_prime(1).unwrap();
        assert_eq!(psi.dim(), 12);
        assert!(psi.is_normalized());
        assert!(total_spin_squared(&psi) < 1e-12);
    }

    #[test]
    fn longer_chains_are_singlets_too() {
        for n in 2..=4 {
            assert!(total_spin_squared(&build_aklt_prime(n).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn memory_budget_is_enforced() {
        assert!(build_aklt_prime(MAX_DENSE_BULK + 1).is_err());
    }
}
