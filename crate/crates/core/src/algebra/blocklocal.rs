//! Block-local measurement of an evolved logical operator.
//!
//! Measuring `T̄_N(h) = V† T̄(h) V` directly would need a non-local observable. Instead each
//! block is measured on its own: block 0 in the joint eigenbasis of `{u0(g)}`, bulk block `k`
//! in the joint eigenbasis of `O_k(g) = e^{+iα_k/2·σ S_k(g_k)} u(g) e^{−iα_k/2·σ S_k(g_k)}`
//! with `σ = (−1)^{q}` fixed by the outcomes already seen, and finally `vl(h)`. The product of
//! the `h` outcomes is distributed exactly like a projective measurement of `T̄_N(h)`.
//!
//! The same construction in operator form (the conjugated `ũ_k`, `Ṽ_k`) is available as dense
//! matrices for short chains.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bundle::RepresentationBundle;
use super::group::GroupElement;
use super::logical::tbar;
use super::transfer::{apply_gates, check_gate_order, gate_unitary, Gate};
use crate::error::{Error, Result};
use crate::mbqc::engine::measure_site;
use crate::qcore::linalg::{exp_i_hermitian, frobenius_norm, identity, op_norm, real, CMatrix, C64};
use crate::qcore::{LocalOperator, OperatorString, Register, StateVector};
use crate::rng::{chunk_sizes, stream};
use crate::tolerances;

/// Commutators between simultaneously measured block observables must stay below this.
pub const MEASURABILITY_TOL: f64 = 1e-10;
/// Largest chain dimension for which the dense `ũ`/`Ṽ` matrices are built.
pub const DENSE_TILDE_LIMIT: usize = 4096;
/// Independent RNG streams used for sampled rounds.
pub const SAMPLE_CHUNKS: u64 = 32;

/// One projector of a block measurement together with its outcome bit for every element.
#[derive(Debug, Clone)]
struct BlockProjector {
    /// `s(g)` in group order; for the right boundary only the measured element is meaningful.
    bits: Vec<u8>,
    projector: CMatrix,
}

/// Joint eigenprojectors of a commuting family given on generators.
fn joint_projectors(bundle: &RepresentationBundle, family: &[CMatrix]) -> Result<Vec<BlockProjector>> {
    let dim = family[0].nrows();
    for a in bundle.elements() {
        for b in bundle.elements() {
            let (oa, ob) = (&family[a.index()], &family[b.index()]);
            let comm = op_norm(&(oa * ob - ob * oa));
            if comm > MEASURABILITY_TOL {
                return Err(Error::InvalidBundle(format!(
                    "block observables for '{}' and '{}' do not commute (norm {comm:e})",
                    bundle.label(a),
                    bundle.label(b)
                )));
            }
        }
    }
    let rank = bundle.group().rank();
    let mut out = Vec::new();
    for mask in 0..bundle.order() as u32 {
        let mut p = identity(dim);
        for bit in 0..rank {
            let o = &family[1 << bit];
            let sign = if mask >> bit & 1 == 1 { -1.0 } else { 1.0 };
            p = p * (identity(dim) + o * real(sign)) * real(0.5);
        }
        if op_norm(&p) < tolerances::NORM {
            continue;
        }
        let bits = bundle.elements().iter().map(|g| ((g.0 as u32 & mask).count_ones() % 2) as u8).collect();
        out.push(BlockProjector { bits, projector: p });
    }
    Ok(out)
}

/// `e^{+iα/2·σ S} u(g) e^{−iα/2·σ S}` for every `g`.
fn conjugated_family(bundle: &RepresentationBundle, gate: Option<&Gate>, parity: u8) -> Result<Vec<CMatrix>> {
    let rot = match gate {
        Some(gate) => {
            let s = bundle.s_checked(gate.element)?;
            let sign = if parity == 1 { -1.0 } else { 1.0 };
            exp_i_hermitian(s, sign * gate.angle / 2.0)
        }
        None => identity(bundle.bulk_dim()),
    };
    Ok(bundle.elements().into_iter().map(|g| &rot * bundle.u(g) * rot.adjoint()).collect())
}

/// Per-block measurement settings; bulk blocks with a gate carry one setting per parity.
struct Protocol {
    h: GroupElement,
    first: Vec<BlockProjector>,
    bulk: Vec<(Option<Gate>, [Vec<BlockProjector>; 2])>,
    last: Vec<BlockProjector>,
}

impl Protocol {
    fn new(bundle: &RepresentationBundle, h: GroupElement, gates: &[Gate]) -> Result<Self> {
        check_gate_order(gates)?;
        for g in gates {
            if g.site == 0 || g.site > bundle.n_bulk() {
                return Err(Error::InvalidParameter(format!("gate site {} outside the bulk", g.site)));
            }
        }
        let u0: Vec<CMatrix> = bundle.elements().into_iter().map(|g| bundle.u0(g).clone()).collect();
        let first = joint_projectors(bundle, &u0)?;
        let bulk = (1..=bundle.n_bulk())
            .map(|k| {
                let gate = gates.iter().find(|g| g.site == k).copied();
                let even = joint_projectors(bundle, &conjugated_family(bundle, gate.as_ref(), 0)?)?;
                let odd = joint_projectors(bundle, &conjugated_family(bundle, gate.as_ref(), 1)?)?;
                Ok((gate, [even, odd]))
            })
            .collect::<Result<Vec<_>>>()?;
        let vl = bundle.vl(h);
        let last = [0u8, 1]
            .iter()
            .map(|&b| {
                let sign = if b == 1 { -1.0 } else { 1.0 };
                let projector = (identity(2) + vl * real(sign)) * real(0.5);
                BlockProjector { bits: vec![b; bundle.order()], projector }
            })
            .filter(|p| op_norm(&p.projector) > tolerances::NORM)
            .collect();
        Ok(Protocol { h, first, bulk, last })
    }

    /// Projectors for bulk site `k` given the bits recorded on blocks `0..k`.
    fn bulk_setting(&self, k: usize, history: &[Vec<u8>]) -> &[BlockProjector] {
        let (gate, sets) = &self.bulk[k - 1];
        let parity = match gate {
            Some(g) => history.iter().fold(0u8, |acc, bits| acc ^ bits[g.element.index()]),
            None => 0,
        };
        &sets[parity as usize]
    }
}

/// Outcome record of one run of the protocol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockOutcome {
    /// `s_k(g)` for blocks `0..=N`, each in group order.
    pub blocks: Vec<Vec<u8>>,
    /// Outcome bit of `vl(h)`.
    pub last: u8,
    pub probability: f64,
    /// `(−1)^{Σ_k s_k(h) + last}`.
    pub sign: i8,
}

/// The full outcome tree of the protocol for one element.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockLocalDistribution {
    pub h: GroupElement,
    pub leaves: Vec<BlockOutcome>,
    pub p_plus: f64,
    pub p_minus: f64,
}

impl BlockLocalDistribution {
    pub fn mean(&self) -> f64 {
        self.p_plus - self.p_minus
    }
}

fn project(state: &StateVector, site: usize, p: &CMatrix) -> Result<StateVector> {
    state.apply_local(&LocalOperator::new(site, p.clone())?)
}

/// Enumerates every branch of the block-local protocol on `state`.
pub fn block_local_distribution(
    bundle: &RepresentationBundle,
    state: &StateVector,
    h: GroupElement,
    gates: &[Gate],
) -> Result<BlockLocalDistribution> {
    bundle.check_state(state)?;
    let protocol = Protocol::new(bundle, h, gates)?;
    let n = bundle.n_bulk();
    let mut frontier: Vec<(StateVector, Vec<Vec<u8>>)> = Vec::new();
    for p in &protocol.first {
        frontier.push((project(state, 0, &p.projector)?, vec![p.bits.clone()]));
    }
    frontier.retain(|(s, _)| s.norm_sqr() > tolerances::NULL_PROBABILITY);
    for k in 1..=n {
        let mut next = Vec::new();
        for (branch, history) in &frontier {
            for p in protocol.bulk_setting(k, history) {
                let child = project(branch, k, &p.projector)?;
                if child.norm_sqr() > tolerances::NULL_PROBABILITY {
                    let mut h2 = history.clone();
                    h2.push(p.bits.clone());
                    next.push((child, h2));
                }
            }
        }
        frontier = next;
    }
    let norm = state.norm_sqr();
    let mut leaves = Vec::new();
    let (mut p_plus, mut p_minus) = (0.0, 0.0);
    for (branch, history) in &frontier {
        for p in &protocol.last {
            let probability = project(branch, n + 1, &p.projector)?.norm_sqr() / norm;
            if probability <= tolerances::NULL_PROBABILITY {
                continue;
            }
            let parity = history.iter().fold(p.bits[0], |acc, bits| acc ^ bits[h.index()]);
            let sign = if parity == 0 { 1 } else { -1 };
            if sign == 1 {
                p_plus += probability;
            } else {
                p_minus += probability;
            }
            leaves.push(BlockOutcome { blocks: history.clone(), last: p.bits[0], probability, sign });
        }
    }
    Ok(BlockLocalDistribution { h, leaves, p_plus, p_minus })
}

/// One sequential run: each block is measured on the collapsed state left by the previous one.
pub fn block_local_measure<R: Rng + ?Sized>(
    bundle: &RepresentationBundle,
    state: &StateVector,
    h: GroupElement,
    gates: &[Gate],
    rng: &mut R,
) -> Result<BlockOutcome> {
    bundle.check_state(state)?;
    let protocol = Protocol::new(bundle, h, gates)?;
    run_protocol(&protocol, bundle.n_bulk(), state, rng)
}

fn run_protocol<R: Rng + ?Sized>(protocol: &Protocol, n: usize, state: &StateVector, rng: &mut R) -> Result<BlockOutcome> {
    let mut current = state.clone();
    current.normalize()?;
    let mut history: Vec<Vec<u8>> = Vec::with_capacity(n + 1);
    let mut probability = 1.0;
    let mut step = |current: &mut StateVector, site: usize, set: &[BlockProjector], rng: &mut R| -> Result<Vec<u8>> {
        let projectors: Vec<CMatrix> = set.iter().map(|p| p.projector.clone()).collect();
        let (pick, collapsed, p) = measure_site(current, site, &projectors, rng)?;
        *current = collapsed;
        probability *= p;
        Ok(set[pick].bits.clone())
    };
    history.push(step(&mut current, 0, &protocol.first, rng)?);
    for k in 1..=n {
        let set = protocol.bulk_setting(k, &history).to_vec();
        history.push(step(&mut current, k, &set, rng)?);
    }
    let last_bits = step(&mut current, n + 1, &protocol.last, rng)?;
    let last = last_bits[0];
    let parity = history.iter().fold(last, |acc, bits| acc ^ bits[protocol.h.index()]);
    Ok(BlockOutcome { blocks: history, last, probability, sign: if parity == 0 { 1 } else { -1 } })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampledSign {
    pub rounds: u64,
    pub mean: f64,
    pub std_error: f64,
}

/// Mean sign over `rounds` sequential runs; chunks use independent RNG streams so the result
/// does not depend on the thread count.
pub fn sample_block_local(
    bundle: &RepresentationBundle,
    state: &StateVector,
    h: GroupElement,
    gates: &[Gate],
    rounds: u64,
    seed: u64,
) -> Result<SampledSign> {
    bundle.check_state(state)?;
    if rounds == 0 {
        return Err(Error::InvalidParameter("at least one round is needed".into()));
    }
    let protocol = Protocol::new(bundle, h, gates)?;
    let n = bundle.n_bulk();
    let sums = chunk_sizes(rounds, SAMPLE_CHUNKS)
        .into_par_iter()
        .enumerate()
        .map(|(chunk, size)| {
            let mut rng = stream(seed, chunk as u64);
            let mut total = 0i64;
            for _ in 0..size {
                total += i64::from(run_protocol(&protocol, n, state, &mut rng)?.sign);
            }
            Ok(total)
        })
        .collect::<Result<Vec<i64>>>()?;
    let mean = sums.iter().sum::<i64>() as f64 / rounds as f64;
    let std_error = ((1.0 - mean * mean).max(0.0) / rounds as f64).sqrt();
    Ok(SampledSign { rounds, mean, std_error })
}

/// The conjugated operators `ũ_k(g)` and gates `Ṽ_k` as dense matrices.
///
/// `ũ_0 = u0`, `Ṽ_k = exp(−iα_k/2 · Π_{j<k} ũ_j(g_k) · S_k(g_k))` and `ũ_k = Ṽ_k† u_k Ṽ_k`.
/// Both act on sites `0..=k` only and are stored on that prefix (site 0 most significant,
/// so a prefix operator embeds into a longer prefix as `A ⊗ I`).
pub struct TildeOperators {
    bulk_dim: usize,
    /// `ũ[k][g]` for `k = 0..=N`, on sites `0..=k`.
    u: Vec<Vec<CMatrix>>,
    /// `Ṽ[k − 1]` for `k = 1..=N`, on sites `0..=k`.
    v: Vec<CMatrix>,
}

impl TildeOperators {
    pub fn new(bundle: &RepresentationBundle, gates: &[Gate]) -> Result<Self> {
        check_gate_order(gates)?;
        let full = 4 * bundle.bulk_dim().pow(bundle.n_bulk() as u32);
        if full > DENSE_TILDE_LIMIT {
            return Err(Error::Unsupported(format!(
                "dense conjugated operators need dimension ≤ {DENSE_TILDE_LIMIT}, chain has {full}"
            )));
        }
        let d = bundle.bulk_dim();
        let elements = bundle.elements();
        let mut u: Vec<Vec<CMatrix>> = vec![elements.iter().map(|&g| bundle.u0(g).clone()).collect()];
        let mut v = Vec::with_capacity(bundle.n_bulk());
        for k in 1..=bundle.n_bulk() {
            let below = 2 * d.pow(k as u32 - 1);
            let vk = match gates.iter().find(|g| g.site == k) {
                Some(gate) => {
                    let w = (0..k).fold(identity(below), |acc, j| acc * embed(&u[j][gate.element.index()], below));
                    let x = kron(&w, bundle.s_checked(gate.element)?);
                    // Padé exponential: eigendecomposing this highly degenerate matrix loses digits.
                    (x * C64::new(0.0, -gate.angle / 2.0)).exp()
                }
                None => identity(below * d),
            };
            let row = elements.iter().map(|&g| vk.adjoint() * kron(&identity(below), bundle.u(g)) * &vk).collect();
            u.push(row);
            v.push(vk);
        }
        Ok(TildeOperators { bulk_dim: d, u, v })
    }

    /// `ũ_k(g)` on sites `0..=k`.
    pub fn u_tilde(&self, k: usize, g: GroupElement) -> &CMatrix {
        &self.u[k][g.index()]
    }

    /// `Ṽ_k` on sites `0..=k`.
    pub fn v_tilde(&self, k: usize) -> &CMatrix {
        &self.v[k - 1]
    }

    fn n_bulk(&self) -> usize {
        self.v.len()
    }

    /// Register of sites `0..=N` (the right boundary excluded).
    fn bulk_register(&self) -> Result<Register> {
        let mut dims = vec![2];
        dims.extend(std::iter::repeat(self.bulk_dim).take(self.n_bulk()));
        Register::new(dims)
    }

    /// `max ‖[ũ_j(g), ũ_k(g′)]‖` over all blocks and generators; every `ũ_k` is a conjugated
    /// linear representation, so generators cover all elements.
    pub fn commutation_residual(&self) -> f64 {
        let generators: Vec<usize> = (0..self.u[0].len().trailing_zeros()).map(|b| 1 << b).collect();
        let all: Vec<(usize, &CMatrix)> =
            self.u.iter().enumerate().flat_map(|(k, row)| generators.iter().map(move |&g| (k, &row[g]))).collect();
        all.par_iter()
            .enumerate()
            .map(|(i, (_, a))| {
                all[i + 1..]
                    .iter()
                    .map(|(_, b)| {
                        let dim = a.nrows().max(b.nrows());
                        let (a, b) = (embed(a, dim), embed(b, dim));
                        frobenius_norm(&(&a * &b - &b * &a))
                    })
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max)
    }

    /// `‖Ṽ_1 ⋯ Ṽ_N − V_N ⋯ V_1‖`.
    pub fn gate_product_residual(&self, bundle: &RepresentationBundle, gates: &[Gate]) -> Result<f64> {
        let register = self.bulk_register()?;
        let dim = register.total_dim();
        let tilde = self.v.iter().fold(identity(dim), |acc, v| acc * embed(v, dim));
        let direct = direct_product(bundle, gates, &register)?;
        Ok(frobenius_norm(&(tilde - direct)))
    }

    /// `max_h ‖V† T̄(h) V − Π_k ũ_k(h) · vl(h)‖`.
    ///
    /// `V` does not touch the right boundary, so both sides are `(…) ⊗ vl(h)` and the norm
    /// factorizes into the bulk difference times `‖vl(h)‖`.
    pub fn logical_observable_residual(&self, bundle: &RepresentationBundle, gates: &[Gate]) -> Result<f64> {
        let register = self.bulk_register()?;
        let dim = register.total_dim();
        let v = direct_product(bundle, gates, &register)?;
        let mut worst: f64 = 0.0;
        for h in bundle.elements() {
            let mut pairs = vec![(0, bundle.u0(h).clone())];
            pairs.extend((1..=self.n_bulk()).map(|j| (j, bundle.u(h).clone())));
            let bulk_tbar = OperatorString::product_of(pairs)?.to_dense(&register)?;
            let evolved = v.adjoint() * bulk_tbar * &v;
            let product = self.u.iter().fold(identity(dim), |acc, uk| acc * embed(&uk[h.index()], dim));
            worst = worst.max(frobenius_norm(&(evolved - product)) * frobenius_norm(bundle.vl(h)));
        }
        Ok(worst)
    }
}

fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    crate::qcore::linalg::kron(a, b)
}

/// `A ⊗ I` filling a prefix operator up to dimension `dim`.
fn embed(a: &CMatrix, dim: usize) -> CMatrix {
    if a.nrows() == dim {
        a.clone()
    } else {
        kron(a, &identity(dim / a.nrows()))
    }
}

/// `V_t ⋯ V_1` on `register`.
fn direct_product(bundle: &RepresentationBundle, gates: &[Gate], register: &Register) -> Result<CMatrix> {
    gates.iter().try_fold(identity(register.total_dim()), |acc, g| Ok(gate_unitary(bundle, g)?.to_dense(register)? * acc))
}

/// `(1 ± <Ψ|T̄_N(h)|Ψ>)/2` from the directly evolved observable.
pub fn spectral_distribution(bundle: &RepresentationBundle, state: &StateVector, h: GroupElement, gates: &[Gate]) -> Result<(f64, f64)> {
    let evolved = apply_gates(bundle, state, gates)?;
    let ev: C64 = evolved.expectation(&tbar(bundle, h))? / state.norm_sqr();
    Ok(((1.0 + ev.re) / 2.0, (1.0 - ev.re) / 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::bundle::spin1_bundle;
    use crate::states::build_aklt_prime;

    fn el(b: &RepresentationBundle, l: &str) -> GroupElement {
        b.group().parse_element(l).unwrap()
    }

    #[test]
    fn without_gates_h_elements_are_deterministic() {
        let b = spin1_bundle(3).unwrap();
        let psi = build_aklt_prime(3).unwrap();
        let x = el(&b, "x");
        let d = block_local_distribution(&b, &psi, x, &[]).unwrap();
        assert!(d.p_minus > 1.0 - 1e-12, "{} {}", d.p_plus, d.p_minus);
        let mut rng = stream(1, 0);
        for _ in 0..20 {
            assert_eq!(block_local_measure(&b, &psi, x, &[], &mut rng).unwrap().sign, -1);
        }
    }

    #[test]
    fn distribution_matches_the_evolved_observable() {
        let b = spin1_bundle(4).unwrap();
        let psi = build_aklt_prime(4).unwrap();
        let gate_sets = [
            vec![Gate::new(2, el(&b, "z"), 0.9)],
            vec![Gate::new(1, el(&b, "y"), 0.5), Gate::new(3, el(&b, "x"), 1.1)],
        ];
        for gates in &gate_sets {
            for h in b.elements() {
                let d = block_local_distribution(&b, &psi, h, gates).unwrap();
                let (pp, pm) = spectral_distribution(&b, &psi, h, gates).unwrap();
                assert!((d.p_plus - pp).abs() < 1e-10 && (d.p_minus - pm).abs() < 1e-10, "h={} gates={gates:?}", b.label(h));
                let total: f64 = d.leaves.iter().map(|l| l.probability).sum();
                assert!((total - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tilde_identities_hold() {
        let b = spin1_bundle(3).unwrap();
        let gates = [Gate::new(1, el(&b, "z"), 0.7), Gate::new(3, el(&b, "x"), -1.3)];
        let t = TildeOperators::new(&b, &gates).unwrap();
        assert!(t.commutation_residual() < 1e-11);
        assert!(t.gate_product_residual(&b, &gates).unwrap() < 1e-11);
        assert!(t.logical_observable_residual(&b, &gates).unwrap() < 1e-11);
    }

    #[test]
    fn sampling_is_reproducible_and_close_to_exact() {
        let b = spin1_bundle(3).unwrap();
        let psi = build_aklt_prime(3).unwrap();
        let gates = [Gate::new(2, el(&b, "z"), 0.9)];
        let y = el(&b, "y");
        let a = sample_block_local(&b, &psi, y, &gates, 4000, 7).unwrap();
        let again = sample_block_local(&b, &psi, y, &gates, 4000, 7).unwrap();
        assert_eq!(a, again);
        let exact = block_local_distribution(&b, &psi, y, &gates).unwrap().mean();
        assert!((a.mean - exact).abs() < 4.0 * a.std_error.max(1e-3));
    }
}
