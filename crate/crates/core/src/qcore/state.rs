//! Dense state vectors and strided local-operator application.

use rayon::prelude::*;

use super::linalg::{CMatrix, CVector, C64, ONE, ZERO};
use super::operator::{LocalOperator, OperatorString, OperatorSum};
use super::register::{ChainSpec, Register};
use crate::error::{Error, Result};
use crate::tolerances;

/// Below this many amplitudes the sweeps stay single-threaded.
const PARALLEL_THRESHOLD: usize = 1 << 15;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    register: Register,
    amplitudes: Vec<C64>,
}

impl StateVector {
    /// Wraps amplitudes without normalizing.
    pub fn from_amplitudes(register: Register, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != register.total_dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for dimension {}",
                amplitudes.len(),
                register.total_dim()
            )));
        }
        Ok(StateVector { register, amplitudes })
    }

    /// Wraps and normalizes amplitudes.
    pub fn normalized(register: Register, amplitudes: Vec<C64>) -> Result<Self> {
        let mut s = StateVector::from_amplitudes(register, amplitudes)?;
        s.normalize()?;
        Ok(s)
    }

    pub fn basis(register: Register, occupations: &[usize]) -> Result<Self> {
        let index = register.flat_index(occupations)?;
        let mut amplitudes = vec![ZERO; register.total_dim()];
        amplitudes[index] = ONE;
        Ok(StateVector { register, amplitudes })
    }

    /// Product state from one local vector per site.
    pub fn product(register: Register, locals: &[CVector]) -> Result<Self> {
        if locals.len() != register.n_sites() {
            return Err(Error::DimensionMismatch(format!("{} local states for {} sites", locals.len(), register.n_sites())));
        }
        let mut amps = vec![ONE];
        for (site, v) in locals.iter().enumerate() {
            if v.len() != register.site_dim(site) {
                return Err(Error::DimensionMismatch(format!("local state of length {} on site {site}", v.len())));
            }
            amps = amps.iter().flat_map(|&a| v.iter().map(move |&b| a * b)).collect();
        }
        StateVector::normalized(register, amps)
    }

    pub fn register(&self) -> &Register {
        &self.register
    }

    pub fn chain_spec(&self) -> Result<ChainSpec> {
        ChainSpec::from_register(&self.register)
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn to_cvector(&self) -> CVector {
        CVector::from_column_slice(&self.amplitudes)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalize(&mut self) -> Result<f64> {
        let n = self.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::NullState(n * n));
        }
        let inv = 1.0 / n;
        self.amplitudes.iter_mut().for_each(|a| *a *= inv);
        Ok(n)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.register != other.register {
            return Err(Error::DimensionMismatch("inner product of states on different registers".into()));
        }
        Ok(inner(&self.amplitudes, &other.amplitudes))
    }

    pub fn apply_local_in_place(&mut self, op: &LocalOperator) -> Result<()> {
        self.register.check_site(op.site(), op.dim())?;
        let (dim, stride) = (self.register.site_dim(op.site()), self.register.stride(op.site()));
        apply_block(&mut self.amplitudes, dim, stride, op.matrix());
        Ok(())
    }

    pub fn apply_local(&self, op: &LocalOperator) -> Result<StateVector> {
        let mut out = self.clone();
        out.apply_local_in_place(op)?;
        Ok(out)
    }

    pub fn apply_string_in_place(&mut self, ops: &OperatorString) -> Result<()> {
        ops.check(&self.register)?;
        for f in ops.factors().iter().rev() {
            self.apply_local_in_place(f)?;
        }
        let c = ops.coefficient();
        if c != ONE {
            self.amplitudes.iter_mut().for_each(|a| *a *= c);
        }
        Ok(())
    }

    pub fn apply_string(&self, ops: &OperatorString) -> Result<StateVector> {
        let mut out = self.clone();
        out.apply_string_in_place(ops)?;
        Ok(out)
    }

    pub fn apply_sum(&self, ops: &OperatorSum) -> Result<StateVector> {
        let mut acc = vec![ZERO; self.dim()];
        for term in ops.terms() {
            let v = self.apply_string(term)?;
            acc.iter_mut().zip(v.amplitudes.iter()).for_each(|(a, b)| *a += b);
        }
        StateVector::from_amplitudes(self.register.clone(), acc)
    }

    /// `<self| ops |self>`.
    pub fn expectation(&self, ops: &OperatorString) -> Result<C64> {
        let applied = self.apply_string(ops)?;
        Ok(inner(&self.amplitudes, &applied.amplitudes))
    }

    pub fn expectation_sum(&self, ops: &OperatorSum) -> Result<C64> {
        ops.terms().iter().try_fold(ZERO, |acc, t| Ok(acc + self.expectation(t)?))
    }

    /// Contracts site 0 with `<bra|`, returning the (unnormalized) state of the remaining sites.
    pub fn contract_leading(&self, bra: &CVector) -> Result<StateVector> {
        let d0 = self.register.site_dim(0);
        if bra.len() != d0 {
            return Err(Error::DimensionMismatch(format!("bra of length {} on site of dimension {d0}", bra.len())));
        }
        let rest = self.register.tail(1)?;
        let block = rest.total_dim();
        let mut out = vec![ZERO; block];
        for (j, b) in bra.iter().enumerate() {
            let bc = b.conj();
            if bc == ZERO {
                continue;
            }
            let chunk = &self.amplitudes[j * block..(j + 1) * block];
            out.iter_mut().zip(chunk).for_each(|(o, a)| *o += bc * a);
        }
        StateVector::from_amplitudes(rest, out)
    }

    /// Checks the norm invariant.
    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() < tolerances::NORM
    }
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    if a.len() >= PARALLEL_THRESHOLD {
        a.par_iter().zip(b.par_iter()).map(|(x, y)| x.conj() * y).sum()
    } else {
        a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
    }
}

/// Applies `matrix` to a block of `dim` consecutive-in-significance indices with the given stride.
/// Adjacent sites `(i, i+1)` form one such block of dimension `d_i d_{i+1}` and stride `s_{i+1}`.
pub fn apply_block(amps: &mut [C64], dim: usize, stride: usize, matrix: &CMatrix) {
    let block = dim * stride;
    let work = |chunk: &mut [C64]| {
        let mut buf = vec![ZERO; dim];
        for inner_idx in 0..stride {
            for (j, b) in buf.iter_mut().enumerate() {
                *b = chunk[j * stride + inner_idx];
            }
            for r in 0..dim {
                let mut acc = ZERO;
                for (col, b) in buf.iter().enumerate() {
                    acc += matrix[(r, col)] * b;
                }
                chunk[r * stride + inner_idx] = acc;
            }
        }
    };
    if amps.len() >= PARALLEL_THRESHOLD {
        amps.par_chunks_mut(block).for_each(work);
    } else {
        amps.chunks_mut(block).for_each(work);
    }
}

/// `out += matrix · input` on the block structure of [`apply_block`].
pub fn accumulate_block(input: &[C64], out: &mut [C64], dim: usize, stride: usize, matrix: &CMatrix) {
    let block = dim * stride;
    let nonzero: Vec<(usize, usize, C64)> = (0..dim)
        .flat_map(|r| (0..dim).map(move |c| (r, c)))
        .filter_map(|(r, c)| {
            let m = matrix[(r, c)];
            (m != ZERO).then_some((r, c, m))
        })
        .collect();
    let work = |(src, dst): (&[C64], &mut [C64])| {
        for &(r, c, m) in &nonzero {
            let s = &src[c * stride..(c + 1) * stride];
            let d = &mut dst[r * stride..(r + 1) * stride];
            d.iter_mut().zip(s).for_each(|(o, x)| *o += m * x);
        }
    };
    if input.len() >= PARALLEL_THRESHOLD {
        input.par_chunks(block).zip(out.par_chunks_mut(block)).for_each(work);
    } else {
        input.chunks(block).zip(out.chunks_mut(block)).for_each(work);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::{identity, real};
    use crate::qcore::spin::{pauli, pauli_eigenstate, Axis};
    use proptest::prelude::*;

    fn random_state(register: Register, seed: u64) -> StateVector {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let amps = (0..register.total_dim()).map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
        StateVector::normalized(register, amps).unwrap()
    }

    #[test]
    fn identity_leaves_state_unchanged() {
        let reg = Register::new(vec![2, 3, 2]).unwrap();
        let psi = random_state(reg, 1);
        let out = psi.apply_local(&LocalOperator::new(1, identity(3)).unwrap()).unwrap();
        assert_eq!(out, psi);
    }

    #[test]
    fn sigma_z_flips_occupied_site_zero() {
        let reg = Register::new(vec![2, 3, 2]).unwrap();
        let psi = StateVector::basis(reg, &[1, 2, 0]).unwrap();
        let out = psi.apply_local(&LocalOperator::new(0, pauli(Axis::Z)).unwrap()).unwrap();
        let idx = psi.register().flat_index(&[1, 2, 0]).unwrap();
        assert_eq!(out.amplitudes()[idx], -ONE);
    }

    #[test]
    fn sigma_x_is_an_involution() {
        let reg = Register::new(vec![2, 3, 2]).unwrap();
        let psi = random_state(reg, 2);
        let x = LocalOperator::new(2, pauli(Axis::X)).unwrap();
        let twice = psi.apply_local(&x).unwrap().apply_local(&x).unwrap();
        assert!(twice.amplitudes().iter().zip(psi.amplitudes()).all(|(a, b)| (a - b).norm() < 1e-15));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let reg = Register::new(vec![2, 3, 2]).unwrap();
        let psi = random_state(reg, 3);
        assert!(psi.apply_local(&LocalOperator::new(1, pauli(Axis::X)).unwrap()).is_err());
        assert!(psi.apply_local(&LocalOperator::new(5, pauli(Axis::X)).unwrap()).is_err());
    }

    #[test]
    fn expectation_examples() {
        let reg = Register::new(vec![2]).unwrap();
        let plus = StateVector::product(reg, &[pauli_eigenstate(Axis::X, 1)]).unwrap();
        assert!((plus.expectation(&OperatorString::identity()).unwrap() - ONE).norm() < 1e-15);
        let x = OperatorString::single(0, pauli(Axis::X)).unwrap();
        assert!((plus.expectation(&x).unwrap() - ONE).norm() < 1e-15);
    }

    #[test]
    fn sweep_matches_dense_matrix() {
        let reg = Register::new(vec![2, 3, 3, 2]).unwrap();
        let psi = random_state(reg.clone(), 4);
        let s = crate::qcore::spin::spin1();
        let ops = OperatorString::product_of([(1, s.s(Axis::X).clone()), (2, s.s(Axis::Y).clone()), (3, pauli(Axis::Z))])
            .unwrap()
            .scaled(real(0.5));
        let dense = ops.to_dense(&reg).unwrap() * psi.to_cvector();
        let swept = psi.apply_string(&ops).unwrap().to_cvector();
        assert!((dense - swept).norm() < 1e-14);
    }

    #[test]
    fn accumulate_matches_apply() {
        let reg = Register::new(vec![2, 3, 3, 2]).unwrap();
        let psi = random_state(reg.clone(), 5);
        let coupling = crate::qcore::spin::heisenberg_coupling(3, 3).unwrap();
        let mut applied = psi.amplitudes().to_vec();
        apply_block(&mut applied, 9, reg.stride(2), &coupling);
        let mut acc = vec![ZERO; psi.dim()];
        accumulate_block(psi.amplitudes(), &mut acc, 9, reg.stride(2), &coupling);
        assert!(applied.iter().zip(&acc).all(|(a, b)| (a - b).norm() < 1e-14));
    }

    #[test]
    fn contract_leading_matches_projection() {
        let reg = Register::new(vec![2, 3, 2]).unwrap();
        let psi = random_state(reg, 6);
        let plus = pauli_eigenstate(Axis::X, 1);
        let rest = psi.contract_leading(&plus).unwrap();
        let proj = &plus * plus.adjoint();
        let p = psi.apply_local(&LocalOperator::new(0, proj).unwrap()).unwrap();
        assert!((rest.norm_sqr() - p.norm_sqr()).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn unitary_application_preserves_norm(seed in 0u64..500, site in 0usize..4, t in -3.0f64..3.0) {
            let reg = Register::new(vec![2, 3, 3, 2]).unwrap();
            let psi = random_state(reg.clone(), seed);
            let dim = reg.site_dim(site);
            let gen = crate::qcore::spin::spin_operators(dim).unwrap();
            let u = crate::qcore::linalg::exp_i_hermitian(gen.s(Axis::Y), t);
            let out = psi.apply_local(&LocalOperator::new(site, u).unwrap()).unwrap();
            prop_assert!((out.norm() - 1.0).abs() < tolerances::NORM);
        }

        #[test]
        fn hermitian_strings_have_real_expectations(seed in 0u64..500, a in 0usize..3, b in 0usize..3) {
            let reg = Register::new(vec![2, 3, 3, 2]).unwrap();
            let psi = random_state(reg, seed);
            let s = crate::qcore::spin::spin1();
            let ops = OperatorString::product_of([
                (1, s.s(Axis::ALL[a]).clone()),
                (2, s.pi_rotation(Axis::ALL[b]).clone()),
                (3, pauli(Axis::ALL[b])),
            ]).unwrap();
            prop_assert!(psi.expectation(&ops).unwrap().im.abs() < tolerances::NORM);
        }
    }
}
