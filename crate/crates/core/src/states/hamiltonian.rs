//! Haldane-family Hamiltonians with boundary spin-1/2 couplings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::linalg::{identity, kron, real, CMatrix, C64, ZERO};
use crate::qcore::spin::{heisenberg_coupling, pauli, spin1, Axis};
use crate::qcore::state::accumulate_block;
use crate::qcore::{ChainSpec, StateVector};

/// Bulk nearest-neighbour interaction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BulkCoupling {
    /// `cos θ S·S + sin θ (S·S)²`.
    Bilinear { theta: f64 },
    /// `½ S·S + ⅙ (S·S)² + ⅓`, the spin-2 projector on each bond.
    Aklt,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianParams {
    pub n_bulk: usize,
    pub bulk: BulkCoupling,
    pub d_x: f64,
    pub d_z: f64,
    pub j_left: f64,
    pub j_right: f64,
}

impl HamiltonianParams {
    pub fn aklt(n_bulk: usize) -> Self {
        HamiltonianParams { n_bulk, bulk: BulkCoupling::Aklt, d_x: 0.0, d_z: 0.0, j_left: 1.0, j_right: 1.0 }
    }

    pub fn bilinear(n_bulk: usize, theta: f64) -> Self {
        HamiltonianParams { bulk: BulkCoupling::Bilinear { theta }, ..HamiltonianParams::aklt(n_bulk) }
    }

    pub fn with_anisotropy(mut self, d_x: f64, d_z: f64) -> Self {
        self.d_x = d_x;
        self.d_z = d_z;
        self
    }

    pub fn with_boundary(mut self, j_left: f64, j_right: f64) -> Self {
        self.j_left = j_left;
        self.j_right = j_right;
        self
    }

    /// The angle θ (the AKLT coupling corresponds to θ = arctan(1/3) up to scale and shift).
    pub fn theta(&self) -> f64 {
        match self.bulk {
            BulkCoupling::Bilinear { theta } => theta,
            BulkCoupling::Aklt => (1.0f64 / 3.0).atan(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_bulk == 0 {
            return Err(Error::InvalidParameter("N must be at least 1".into()));
        }
        let values = [self.theta(), self.d_x, self.d_z, self.j_left, self.j_right];
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite Hamiltonian parameter".into()));
        }
        if self.j_left < 0.0 || self.j_right < 0.0 {
            return Err(Error::InvalidParameter("boundary couplings must be non-negative".into()));
        }
        Ok(())
    }

    /// Positive boundary couplings are needed for a unique ground state.
    pub fn has_unique_ground_state_couplings(&self) -> bool {
        self.j_left > 0.0 && self.j_right > 0.0
    }
}

/// One local term: a dense block acting on `width` consecutive sites starting at `first_site`.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub first_site: usize,
    pub width: usize,
    pub block: CMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparseHamiltonian {
    spec: ChainSpec,
    terms: Vec<Term>,
}

impl SparseHamiltonian {
    pub fn new(spec: ChainSpec, terms: Vec<Term>) -> Result<Self> {
        for t in &terms {
            if t.width == 0 || t.first_site + t.width > spec.register().n_sites() {
                return Err(Error::DimensionMismatch(format!("term on sites {}..{}", t.first_site, t.first_site + t.width)));
            }
            let dim: usize = spec.register().dims()[t.first_site..t.first_site + t.width].iter().product();
            if t.block.nrows() != dim || t.block.ncols() != dim {
                return Err(Error::DimensionMismatch(format!("block {}×{} for local dimension {dim}", t.block.nrows(), t.block.ncols())));
            }
        }
        Ok(SparseHamiltonian { spec, terms })
    }

    pub fn spec(&self) -> &ChainSpec {
        &self.spec
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn dim(&self) -> usize {
        self.spec.total_dim()
    }

    /// `out = H · input`.
    pub fn apply_into(&self, input: &[C64], out: &mut [C64]) {
        out.iter_mut().for_each(|o| *o = ZERO);
        let reg = self.spec.register();
        for t in &self.terms {
            let last = t.first_site + t.width - 1;
            accumulate_block(input, out, t.block.nrows(), reg.stride(last), &t.block);
        }
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.register() != self.spec.register() {
            return Err(Error::DimensionMismatch("state and Hamiltonian live on different chains".into()));
        }
        let mut out = vec![ZERO; state.dim()];
        self.apply_into(state.amplitudes(), &mut out);
        StateVector::from_amplitudes(state.register().clone(), out)
    }

    pub fn energy(&self, state: &StateVector) -> Result<f64> {
        let h = self.apply(state)?;
        Ok(state.inner(&h)?.re / state.norm_sqr())
    }

    /// Dense matrix; only sensible for small chains.
    pub fn to_dense(&self) -> CMatrix {
        let reg = self.spec.register();
        let mut out = CMatrix::zeros(self.dim(), self.dim());
        for t in &self.terms {
            let left: usize = reg.dims()[..t.first_site].iter().product();
            let right: usize = reg.dims()[t.first_site + t.width..].iter().product();
            out += kron(&kron(&identity(left), &t.block), &identity(right));
        }
        out
    }
}

/// `½ S·S + ⅙ (S·S)² + ⅓` on two spin-1 sites.
pub fn aklt_bond() -> CMatrix {
    let ss = heisenberg_coupling(3, 3).expect("spin-1 pair");
    &ss * real(0.5) + &ss * &ss * real(1.0 / 6.0) + identity(9) * real(1.0 / 3.0)
}

/// Builds the Hamiltonian. Anisotropies act on bulk sites `1..N-1` (one per bond, on its left site).
pub fn build_hamiltonian(params: &HamiltonianParams) -> Result<SparseHamiltonian> {
    params.validate()?;
    let n = params.n_bulk;
    let spec = ChainSpec::spin1(n)?;
    let s = spin1();
    let ss = heisenberg_coupling(3, 3)?;
    let bond = match params.bulk {
        BulkCoupling::Aklt => aklt_bond(),
        BulkCoupling::Bilinear { theta } => &ss * real(theta.cos()) + &ss * &ss * real(theta.sin()),
    };
    let sx2 = s.s(Axis::X) * s.s(Axis::X);
    let sz2 = s.s(Axis::Z) * s.s(Axis::Z);
    let onsite = sx2 * real(params.d_x) + sz2 * real(params.d_z);
    let onsite_on_left = kron(&onsite, &identity(3));

    let mut terms = Vec::with_capacity(n + 1);
    // σ·S with Pauli matrices on the boundary qubits.
    let boundary_left = Axis::ALL.iter().map(|&a| kron(&pauli(a), s.s(a))).sum::<CMatrix>();
    let boundary_right = Axis::ALL.iter().map(|&a| kron(s.s(a), &pauli(a))).sum::<CMatrix>();
    if params.j_left != 0.0 {
        terms.push(Term { first_site: 0, width: 2, block: boundary_left * real(params.j_left) });
    }
    for i in 1..n {
        terms.push(Term { first_site: i, width: 2, block: &bond + &onsite_on_left });
    }
    if params.j_right != 0.0 {
        terms.push(Term { first_site: n, width: 2, block: boundary_right * real(params.j_right) });
    }
    SparseHamiltonian::new(spec, terms)
}
