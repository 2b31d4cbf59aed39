//! Logical operators `T̄(g)`, the logical subspace they generate from a symmetric state, and
//! the matrices of `T̄(g)` restricted to that subspace.

use serde::{Deserialize, Serialize};

use super::bundle::RepresentationBundle;
use super::group::GroupElement;
use crate::error::{Error, Result};
use crate::qcore::linalg::{gram_schmidt, CMatrix, CVector, C64, ZERO};
use crate::qcore::{OperatorString, StateVector};
use crate::states::ExpectationSource;

/// Singular values of the `{T̄(g)|Ψ>}` family inside this window make the rank ambiguous.
pub const RANK_AMBIGUITY: (f64, f64) = (1e-10, 1e-6);

/// `T̄(g) = u0(g) ⊗ u(g)^{⊗N} ⊗ vl(g)`.
pub fn tbar(bundle: &RepresentationBundle, g: GroupElement) -> OperatorString {
    let n = bundle.n_bulk();
    let mut pairs = vec![(0, bundle.u0(g).clone())];
    pairs.extend((1..=n).map(|j| (j, bundle.u(g).clone())));
    pairs.push((n + 1, bundle.vl(g).clone()));
    OperatorString::product_of(pairs).expect("increasing sites")
}

/// `<Ψ|T̄(g)|Ψ>` for every element, in group order.
pub fn initial_expectations<S: ExpectationSource + ?Sized>(bundle: &RepresentationBundle, src: &S) -> Result<Vec<C64>> {
    bundle.elements().into_iter().map(|g| src.expectation(&tbar(bundle, g))).collect()
}

/// What the logical operators predict for `<Ψ|T̄(h)|Ψ>`: `(−1)^χ(h)` on H, zero elsewhere.
pub fn predicted_initial_expectations(bundle: &RepresentationBundle, chi: &[u8]) -> Vec<f64> {
    bundle
        .elements()
        .into_iter()
        .map(|g| match (bundle.in_h(g), chi[g.index()]) {
            (false, _) => 0.0,
            (true, 0) => 1.0,
            (true, _) => -1.0,
        })
        .collect()
}

/// An orthonormal basis of `Q = span{T̄(g)|Ψ>}`.
#[derive(Debug, Clone)]
pub struct LogicalSubspace {
    pub basis: Vec<CVector>,
    /// Singular values of the matrix whose columns are `T̄(g)|Ψ>`, descending.
    pub singular_values: Vec<f64>,
    /// Set when a singular value falls in [`RANK_AMBIGUITY`].
    pub rank_ambiguous: bool,
}

impl LogicalSubspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// A dimension-one logical space carries no qubit.
    pub fn is_degenerate(&self) -> bool {
        self.dim() < 2
    }

    /// `[<b_i| O |b_j>]`, the matrix of `P O P` in the subspace basis.
    pub fn restrict(&self, state: &StateVector, op: &OperatorString) -> Result<CMatrix> {
        let q = self.dim();
        let register = state.register().clone();
        let images = self
            .basis
            .iter()
            .map(|b| StateVector::from_amplitudes(register.clone(), b.iter().cloned().collect())?.apply_string(op))
            .collect::<Result<Vec<_>>>()?;
        Ok(CMatrix::from_fn(q, q, |i, j| {
            self.basis[i].iter().zip(images[j].amplitudes()).map(|(a, b)| a.conj() * b).sum()
        }))
    }

    /// Coordinates of a state in the subspace basis.
    pub fn coordinates(&self, state: &StateVector) -> CVector {
        let v = state.to_cvector();
        CVector::from_iterator(self.dim(), self.basis.iter().map(|b| b.dotc(&v)))
    }

    /// `‖P|ψ>‖²`.
    pub fn weight(&self, state: &StateVector) -> f64 {
        self.coordinates(state).norm_squared()
    }
}

pub fn logical_subspace(bundle: &RepresentationBundle, state: &StateVector) -> Result<LogicalSubspace> {
    bundle.check_state(state)?;
    let vectors: Vec<CVector> = bundle
        .elements()
        .into_iter()
        .map(|g| Ok(state.apply_string(&tbar(bundle, g))?.to_cvector()))
        .collect::<Result<_>>()?;
    // Singular values straight from the columns; a Gram matrix would square the noise floor.
    let mut singular_values: Vec<f64> = CMatrix::from_columns(&vectors).singular_values().iter().cloned().collect();
    singular_values.sort_by(|a, b| b.total_cmp(a));
    let (lo, hi) = RANK_AMBIGUITY;
    let rank_ambiguous = singular_values.iter().any(|&s| s >= lo && s <= hi);
    let (basis, _) = gram_schmidt(&vectors, hi);
    Ok(LogicalSubspace { basis, singular_values, rank_ambiguous })
}

/// The logical operators in the basis `T̄(r)|Ψ>`, `r` running over coset representatives of
/// `G/H`. The entries only involve the phase table and `<Ψ|T̄(h)|Ψ>`, so the frame does not
/// depend on the chain length.
#[derive(Debug, Clone)]
pub struct LogicalFrame {
    representatives: Vec<GroupElement>,
    matrices: Vec<CMatrix>,
}

impl LogicalFrame {
    /// `initial[g] = <Ψ|T̄(g)|Ψ>` in group order.
    pub fn new(bundle: &RepresentationBundle, initial: &[C64]) -> Result<Self> {
        if initial.len() != bundle.order() {
            return Err(Error::DimensionMismatch(format!("{} initial values for {} elements", initial.len(), bundle.order())));
        }
        let mut representatives: Vec<GroupElement> = Vec::new();
        for g in bundle.elements() {
            if !representatives.iter().any(|&r| bundle.in_h(r * g)) {
                representatives.push(g);
            }
        }
        let q = representatives.len();
        let matrices = bundle
            .elements()
            .into_iter()
            .map(|g| {
                CMatrix::from_fn(q, q, |i, j| {
                    let (a, b) = (representatives[i], representatives[j]);
                    bundle.omega(a, g) * bundle.omega(a * g, b) * initial[(a * g * b).index()]
                })
            })
            .collect();
        Ok(LogicalFrame { representatives, matrices })
    }

    pub fn from_source<S: ExpectationSource + ?Sized>(bundle: &RepresentationBundle, src: &S) -> Result<Self> {
        LogicalFrame::new(bundle, &initial_expectations(bundle, src)?)
    }

    pub fn dim(&self) -> usize {
        self.representatives.len()
    }

    pub fn representatives(&self) -> &[GroupElement] {
        &self.representatives
    }

    /// `P T̄(g) P` in the frame basis.
    pub fn tbar(&self, g: GroupElement) -> &CMatrix {
        &self.matrices[g.index()]
    }

    /// Dimension of the span of all `P T̄(g) P`; equal to `dim²` exactly when the logical
    /// operators act irreducibly.
    pub fn operator_span_rank(&self) -> usize {
        span_rank(&self.matrices)
    }

    pub fn is_irreducible(&self) -> bool {
        self.dim() >= 2 && self.operator_span_rank() == self.dim() * self.dim()
    }

    /// `|Ψ>` itself is the first basis vector.
    pub fn initial_density(&self) -> CMatrix {
        let q = self.dim();
        CMatrix::from_fn(q, q, |i, j| if i == 0 && j == 0 { C64::new(1.0, 0.0) } else { ZERO })
    }
}

/// Rank of a family of equally sized matrices viewed as vectors.
pub fn span_rank(matrices: &[CMatrix]) -> usize {
    let flat: Vec<CVector> = matrices.iter().map(|m| CVector::from_iterator(m.len(), m.iter().cloned())).collect();
    gram_schmidt(&flat, 1e-8).0.len()
}

/// Irreducibility data computed from the explicit subspace.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IrreducibilityReport {
    pub dim_q: usize,
    pub expected_dim: usize,
    pub operator_span_rank: usize,
    pub rank_ambiguous: bool,
    pub irreducible: bool,
}

pub fn irreducibility(bundle: &RepresentationBundle, state: &StateVector) -> Result<IrreducibilityReport> {
    let q = logical_subspace(bundle, state)?;
    let restricted = bundle
        .elements()
        .into_iter()
        .map(|g| q.restrict(state, &tbar(bundle, g)))
        .collect::<Result<Vec<_>>>()?;
    let rank = span_rank(&restricted);
    let expected_dim = bundle.order() / bundle.h().len();
    Ok(IrreducibilityReport {
        dim_q: q.dim(),
        expected_dim,
        operator_span_rank: rank,
        rank_ambiguous: q.rank_ambiguous,
        irreducible: q.dim() >= 2 && q.dim() == expected_dim && rank == q.dim() * q.dim(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::bundle::{spin1_bundle, spin1_parts, RepresentationBundle};
    use crate::qcore::linalg::{identity, op_norm};
    use crate::states::{build_aklt_prime, AkltChain, DenseSource};

    #[test]
    fn tbar_squares_to_identity_and_tbar_e_is_trivial() {
        let b = spin1_bundle(3).unwrap();
        let reg = b.spec().unwrap().register().clone();
        for g in b.elements() {
            let t = tbar(&b, g).to_dense(&reg).unwrap();
            assert!(op_norm(&(&t * &t - identity(t.nrows()))) < 1e-12);
        }
        assert!(tbar(&b, GroupElement::IDENTITY).factors().is_empty());
    }

    #[test]
    fn initial_values_follow_h_and_chi() {
        let b = spin1_bundle(4).unwrap();
        let psi = build_aklt_prime(4).unwrap();
        let got = initial_expectations(&b, &DenseSource::new(&psi).unwrap()).unwrap();
        let chi: Vec<u8> = b.symmetry_signs(&psi).unwrap().iter().map(|s| s.chi).collect();
        let want = predicted_initial_expectations(&b, &chi);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - C64::new(*w, 0.0)).norm() < 1e-10);
        }
        assert_eq!(want, vec![1.0, 0.0, -1.0, 0.0]);
    }

    #[test]
    fn logical_subspace_is_a_qubit_containing_psi() {
        let b = spin1_bundle(4).unwrap();
        let psi = build_aklt_prime(4).unwrap();
        let q = logical_subspace(&b, &psi).unwrap();
        assert_eq!(q.dim(), 2);
        assert!(!q.rank_ambiguous);
        assert!((q.weight(&psi) - 1.0).abs() < 1e-12);
        let rep = irreducibility(&b, &psi).unwrap();
        assert!(rep.irreducible, "{rep:?}");
    }

    #[test]
    fn frame_matches_the_explicit_subspace() {
        // Compare invariants (traces of products) since the two bases differ by a unitary.
        let b = spin1_bundle(4).unwrap();
        let psi = build_aklt_prime(4).unwrap();
        let q = logical_subspace(&b, &psi).unwrap();
        let frame = LogicalFrame::from_source(&b, &AkltChain::new(4).unwrap()).unwrap();
        assert_eq!(frame.dim(), 2);
        assert!(frame.is_irreducible());
        for g in b.elements() {
            for gp in b.elements() {
                let ex = q.restrict(&psi, &tbar(&b, g)).unwrap() * q.restrict(&psi, &tbar(&b, gp)).unwrap();
                let fr = frame.tbar(g) * frame.tbar(gp);
                assert!((ex.trace() - fr.trace()).norm() < 1e-10);
            }
        }
        // And the frame basis vector 0 is |Ψ>, so <Ψ|T̄|Ψ> is the (0,0) entry.
        let init = initial_expectations(&b, &DenseSource::new(&psi).unwrap()).unwrap();
        for g in b.elements() {
            assert!((frame.tbar(g)[(0, 0)] - init[g.index()]).norm() < 1e-10);
        }
    }

    #[test]
    fn commuting_boundary_matrices_collapse_the_logical_space() {
        let mut parts = spin1_parts(3);
        // vr0 = vl = diagonal signs: all commute, so κ ≡ 0 and H = G.
        let d = |a: f64, bb: f64| CMatrix::from_diagonal(&CVector::from_vec(vec![C64::new(a, 0.0), C64::new(bb, 0.0)]));
        for i in 1..4 {
            parts.vl[i] = Some(d(1.0, -1.0));
            parts.vr0[i] = Some(d(1.0, -1.0));
        }
        parts.vl[3] = Some(identity(2));
        parts.vr0[3] = Some(identity(2));
        let b = RepresentationBundle::new(parts).unwrap();
        assert_eq!(b.h().len(), 4);
        let psi = build_aklt_prime(3).unwrap();
        let rep = irreducibility(&b, &psi).unwrap();
        assert!(!rep.irreducible);
        assert_eq!(rep.expected_dim, 1);
    }
}
