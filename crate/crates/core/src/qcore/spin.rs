//! Spin-1/2 and spin-1 operators.
//!
//! Spin-1 basis order is (m=+1, m=0, m=-1); qubit basis is (|0> = up, |1> = down).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::linalg::{c, exp_i_hermitian, identity, kron, real, CMatrix, CVector, I, ONE, ZERO};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "z" => Ok(Axis::Z),
            other => Err(Error::InvalidParameter(format!("unknown axis '{other}'"))),
        }
    }
}

pub fn pauli(axis: Axis) -> CMatrix {
    match axis {
        Axis::X => CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        Axis::Y => CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
        Axis::Z => CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
    }
}

/// Eigenvector of a Pauli matrix with eigenvalue `sign` (+1 or -1).
pub fn pauli_eigenstate(axis: Axis, sign: i8) -> CVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let v = match (axis, sign >= 0) {
        (Axis::X, true) => [real(h), real(h)],
        (Axis::X, false) => [real(h), real(-h)],
        (Axis::Y, true) => [real(h), c(0.0, h)],
        (Axis::Y, false) => [real(h), c(0.0, -h)],
        (Axis::Z, true) => [ONE, ZERO],
        (Axis::Z, false) => [ZERO, ONE],
    };
    CVector::from_column_slice(&v)
}

/// Spin matrices of one site with their pi-rotations.
#[derive(Debug, Clone)]
pub struct SpinOperators {
    components: [CMatrix; 3],
    rotations: [CMatrix; 3],
}

impl SpinOperators {
    pub fn s(&self, axis: Axis) -> &CMatrix {
        &self.components[axis.index()]
    }

    /// `exp(i pi S^axis)`.
    pub fn pi_rotation(&self, axis: Axis) -> &CMatrix {
        &self.rotations[axis.index()]
    }

    pub fn dim(&self) -> usize {
        self.components[0].nrows()
    }
}

/// Spin operators for dimension 2 (σ/2) or 3 (spin-1).
pub fn spin_operators(dim: usize) -> Result<SpinOperators> {
    let components = match dim {
        2 => [pauli(Axis::X) * real(0.5), pauli(Axis::Y) * real(0.5), pauli(Axis::Z) * real(0.5)],
        3 => {
            let r = std::f64::consts::FRAC_1_SQRT_2;
            let sx = CMatrix::from_row_slice(
                3,
                3,
                &[ZERO, real(r), ZERO, real(r), ZERO, real(r), ZERO, real(r), ZERO],
            );
            let sy = CMatrix::from_row_slice(
                3,
                3,
                &[ZERO, c(0.0, -r), ZERO, c(0.0, r), ZERO, c(0.0, -r), ZERO, c(0.0, r), ZERO],
            );
            let sz = CMatrix::from_diagonal(&CVector::from_column_slice(&[ONE, ZERO, -ONE]));
            [sx, sy, sz]
        }
        other => return Err(Error::Unsupported(format!("spin operators for dimension {other}"))),
    };
    let rotations = [
        exp_i_hermitian(&components[0], std::f64::consts::PI),
        exp_i_hermitian(&components[1], std::f64::consts::PI),
        exp_i_hermitian(&components[2], std::f64::consts::PI),
    ];
    Ok(SpinOperators { components, rotations })
}

pub fn spin1() -> SpinOperators {
    spin_operators(3).expect("dimension 3 is supported")
}

/// Spin-1 states with zero projection along each axis, in the phase gauge
/// `|S^x=0> = i(|+1> - |-1>)/√2`, `|S^y=0> = (|+1> + |-1>)/√2`, `|S^z=0> = |0>`.
pub fn spin1_zero_projection(axis: Axis) -> CVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match axis {
        Axis::X => CVector::from_column_slice(&[c(0.0, h), ZERO, c(0.0, -h)]),
        Axis::Y => CVector::from_column_slice(&[real(h), ZERO, real(h)]),
        Axis::Z => CVector::from_column_slice(&[ZERO, ONE, ZERO]),
    }
}

/// Isometry from two qubits onto their triplet, identified with a spin-1 site:
/// `|+1> = |00>`, `|0> = (|01> + |10>)/√2`, `|-1> = |11>`. Shape 3×4.
pub fn triplet_isometry() -> CMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_row_slice(
        3,
        4,
        &[
            ONE, ZERO, ZERO, ZERO, //
            ZERO, real(h), real(h), ZERO, //
            ZERO, ZERO, ZERO, ONE,
        ],
    )
}

/// The two-qubit singlet `(|01> - |10>)/√2`.
pub fn singlet() -> CVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    CVector::from_column_slice(&[ZERO, real(h), real(-h), ZERO])
}

/// `S_a · S_b` for two sites of the given dimensions (each 2 or 3; dimension 2 uses σ/2).
pub fn heisenberg_coupling(dim_a: usize, dim_b: usize) -> Result<CMatrix> {
    let a = spin_operators(dim_a)?;
    let b = spin_operators(dim_b)?;
    let mut out = CMatrix::zeros(dim_a * dim_b, dim_a * dim_b);
    for axis in Axis::ALL {
        out += kron(a.s(axis), b.s(axis));
    }
    Ok(out)
}

/// Pair projectors: onto the triplet of two qubits, or onto total spin 2 of two spin-1 sites.
pub fn pair_projector(dim_a: usize, dim_b: usize) -> Result<CMatrix> {
    match (dim_a, dim_b) {
        (2, 2) => {
            let w = triplet_isometry();
            Ok(w.adjoint() * w)
        }
        (3, 3) => {
            let ss = heisenberg_coupling(3, 3)?;
            let id = identity(9);
            Ok((&ss + &id * real(2.0)) * (&ss + &id) * real(1.0 / 6.0))
        }
        _ => Err(Error::Unsupported(format!("pair projector for dimensions ({dim_a}, {dim_b})"))),
    }
}

/// Both projectors at once: (triplet on 2⊗2, spin-2 on 3⊗3).
pub fn pair_projectors() -> (CMatrix, CMatrix) {
    (pair_projector(2, 2).expect("qubit pair"), pair_projector(3, 3).expect("spin-1 pair"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::{commutator, op_norm};

    #[test]
    fn spin1_pi_rotation_about_z_is_diagonal() {
        let s = spin1();
        let expected = CMatrix::from_diagonal(&CVector::from_column_slice(&[-ONE, ONE, -ONE]));
        assert!(op_norm(&(s.pi_rotation(Axis::Z) - expected)) < 1e-14);
    }

    #[test]
    fn spin_half_two_pi_rotation_is_minus_one() {
        let s = spin_operators(2).unwrap();
        let r = s.pi_rotation(Axis::Z);
        assert!(op_norm(&(r - pauli(Axis::Z) * I)) < 1e-14);
        assert!(op_norm(&(r * r + identity(2))) < 1e-14);
    }

    #[test]
    fn casimir_and_algebra() {
        for dim in [2usize, 3] {
            let s = spin_operators(dim).unwrap();
            let j = (dim as f64 - 1.0) / 2.0;
            let cas: CMatrix = Axis::ALL.iter().map(|&a| s.s(a) * s.s(a)).sum();
            assert!(op_norm(&(cas - identity(dim) * real(j * (j + 1.0)))) < 1e-14);
            let comm = commutator(s.s(Axis::X), s.s(Axis::Y));
            assert!(op_norm(&(comm - s.s(Axis::Z) * I)) < 1e-14);
        }
    }

    #[test]
    fn unsupported_dimension_is_an_error() {
        assert!(spin_operators(4).is_err());
        assert!(pair_projector(2, 3).is_err());
    }

    #[test]
    fn zero_projection_states_are_annihilated() {
        let s = spin1();
        for axis in Axis::ALL {
            let v = spin1_zero_projection(axis);
            assert!((s.s(axis) * &v).norm() < 1e-15);
            assert!((v.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn projector_properties() {
        let (p1, p2) = pair_projectors();
        for (p, tr) in [(&p1, 3.0), (&p2, 5.0)] {
            assert!(op_norm(&(p * p - p)) < 1e-13);
            assert!(op_norm(&(p - p.adjoint())) < 1e-14);
            assert!((p.trace().re - tr).abs() < 1e-13);
        }
        assert!((&p1 * singlet()).norm() < 1e-15);
        let mut top = CVector::zeros(9);
        top[0] = ONE;
        assert!((&p2 * &top - &top).norm() < 1e-15);
    }

    #[test]
    fn triplet_isometry_maps_spin_operators() {
        // W (σ_a/2 ⊗ 1 + 1 ⊗ σ_b/2) W† equals the spin-1 matrices.
        let w = triplet_isometry();
        let half = spin_operators(2).unwrap();
        let s = spin1();
        for axis in Axis::ALL {
            let total = kron(half.s(axis), &identity(2)) + kron(&identity(2), half.s(axis));
            assert!(op_norm(&(&w * total * w.adjoint() - s.s(axis))) < 1e-14);
        }
    }
}
