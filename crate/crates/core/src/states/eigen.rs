//! Lowest eigenpairs: dense diagonalization for small chains, Lanczos otherwise.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::hamiltonian::SparseHamiltonian;
use crate::error::{Error, Result};
use crate::qcore::linalg::{real, C64, ZERO};
use crate::qcore::state::inner;
use crate::qcore::StateVector;
use crate::tolerances;

/// Dense diagonalization is used up to this dimension.
pub const DENSE_LIMIT: usize = 512;
const KRYLOV_MAX: usize = 160;
const MAX_RESTARTS: usize = 60;
const GAP_RESIDUAL: f64 = 1e-6;
const START_SEED: u64 = 0x5eed_1a2c;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Dense,
    Lanczos,
}

#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    pub state: StateVector,
    /// `E₁ − E₀`, counting degenerate copies of `E₀`.
    pub gap: f64,
    pub residual: f64,
    pub solver: Solver,
}

impl GroundState {
    /// A near-zero gap means the state is not a unique symmetric resource.
    pub fn is_degenerate(&self) -> bool {
        self.gap < tolerances::DEGENERACY_GAP
    }
}

pub fn ground_state(h: &SparseHamiltonian) -> Result<GroundState> {
    if h.dim() <= DENSE_LIMIT {
        dense_ground_state(h)
    } else {
        lanczos_ground_state(h)
    }
}

pub fn dense_ground_state(h: &SparseHamiltonian) -> Result<GroundState> {
    let m = h.to_dense();
    let herm = (&m + m.adjoint()) * real(0.5);
    let eig = herm.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let e0 = eig.eigenvalues[order[0]];
    let gap = order.get(1).map_or(f64::INFINITY, |&i| eig.eigenvalues[i] - e0);
    let amps: Vec<C64> = eig.eigenvectors.column(order[0]).iter().cloned().collect();
    let state = StateVector::normalized(h.spec().register().clone(), amps)?;
    let residual = residual_norm(h, state.amplitudes(), e0);
    Ok(GroundState { energy: e0, state, gap, residual, solver: Solver::Dense })
}

pub fn lanczos_ground_state(h: &SparseHamiltonian) -> Result<GroundState> {
    let start = start_vector(h.dim());
    let (e0, v0, residual) = lanczos_lowest(h, start.clone(), &[], tolerances::EIGEN_RESIDUAL)?;
    // Lanczos from one vector sees one copy per eigenvalue; deflating the ground state
    // exposes degenerate partners. The eigenvalue error is quadratic in the residual, so a
    // looser residual is enough for the gap.
    let (e1, _, _) = lanczos_lowest(h, start, std::slice::from_ref(&v0), GAP_RESIDUAL)?;
    let state = StateVector::normalized(h.spec().register().clone(), v0)?;
    Ok(GroundState { energy: e0, state, gap: (e1 - e0).max(0.0), residual, solver: Solver::Lanczos })
}

fn start_vector(dim: usize) -> Vec<C64> {
    let mut rng = crate::rng::stream(START_SEED, 0);
    let base = 1.0 / (dim as f64).sqrt();
    (0..dim).map(|_| real(base * (1.0 + 0.1 * (rng.gen::<f64>() - 0.5)))).collect()
}

fn residual_norm(h: &SparseHamiltonian, v: &[C64], e: f64) -> f64 {
    let mut hv = vec![ZERO; v.len()];
    h.apply_into(v, &mut hv);
    hv.iter().zip(v).map(|(a, b)| (a - b * e).norm_sqr()).sum::<f64>().sqrt()
}

fn orthogonalize(w: &mut [C64], against: &[Vec<C64>]) {
    for _ in 0..2 {
        for q in against {
            let p = inner(q, w);
            w.iter_mut().zip(q).for_each(|(a, b)| *a -= p * b);
        }
    }
}

fn normalize(w: &mut [C64]) -> f64 {
    let n = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        w.iter_mut().for_each(|z| *z /= n);
    }
    n
}

/// Restarted Lanczos with full reorthogonalization, restricted to the complement of `deflate`.
fn lanczos_lowest(
    h: &SparseHamiltonian,
    mut start: Vec<C64>,
    deflate: &[Vec<C64>],
    tol: f64,
) -> Result<(f64, Vec<C64>, f64)> {
    let dim = h.dim();
    let krylov = KRYLOV_MAX.min(dim.saturating_sub(deflate.len())).max(1);
    let mut best = (f64::INFINITY, start.clone(), f64::INFINITY);
    for _ in 0..MAX_RESTARTS {
        orthogonalize(&mut start, deflate);
        if normalize(&mut start) == 0.0 {
            return Err(Error::NullState(0.0));
        }
        let mut basis: Vec<Vec<C64>> = vec![start.clone()];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut w = vec![ZERO; dim];
        loop {
            let j = basis.len() - 1;
            h.apply_into(&basis[j], &mut w);
            alpha.push(inner(&basis[j], &w).re);
            orthogonalize(&mut w, deflate);
            orthogonalize(&mut w, &basis);
            let b = normalize(&mut w);
            let exhausted = b < 1e-13 || basis.len() >= krylov;
            if exhausted {
                break;
            }
            beta.push(b);
            basis.push(w.clone());
        }
        let m = alpha.len();
        let mut t = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            t[(i, i)] = alpha[i];
            if i + 1 < m {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let (idx, _) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty tridiagonal");
        let y = eig.eigenvectors.column(idx);
        let mut ritz = vec![ZERO; dim];
        for (coef, q) in y.iter().zip(&basis) {
            ritz.iter_mut().zip(q).for_each(|(r, v)| *r += v * *coef);
        }
        orthogonalize(&mut ritz, deflate);
        normalize(&mut ritz);
        let energy = inner(&ritz, &{
            let mut hv = vec![ZERO; dim];
            h.apply_into(&ritz, &mut hv);
            hv
        })
        .re;
        let res = residual_norm(h, &ritz, energy);
        if res < best.2 {
            best = (energy, ritz.clone(), res);
        }
        if res < tol * 1e-2 || m < krylov {
            break;
        }
        start = ritz;
    }
    if best.2 < tol {
        Ok(best)
    } else {
        Err(Error::NonConvergence { iterations: MAX_RESTARTS * krylov, residual: best.2 })
    }
}
