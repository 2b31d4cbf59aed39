//! Adaptive measurement rounds, Monte Carlo estimates and exact path sums.

use std::collections::HashMap;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::basis::{boundary_basis, rotated_spin1_basis};
use super::frame::ByproductFrame;
use super::plan::MeasurementPlan;
use crate::error::{Error, Result};
use crate::qcore::linalg::{CMatrix, CVector};
use crate::qcore::spin::{pauli, spin1_zero_projection, Axis};
use crate::qcore::{LocalOperator, StateVector};
use crate::rng::{chunk_sizes, sample_index, stream};
use crate::tolerances;

/// Largest number of bulk paths `2·3^N` enumerated exactly.
pub const PATH_BUDGET: u128 = 2 * 3u128.pow(12);
/// Monte Carlo rounds are split into this many fixed chunks (one RNG stream each).
pub const MC_CHUNKS: u64 = 64;

/// Full outcome record of one round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementPath {
    pub s0: u8,
    pub bulk: Vec<Axis>,
    /// 0 for the +1 eigenvalue of the readout Pauli, 1 for −1.
    pub last: u8,
    pub probability: f64,
    /// Byproduct parity of the readout axis.
    pub readout_sign: i8,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundOutcome {
    /// Byproduct-corrected readout eigenvalue.
    pub mu: i8,
}

/// Measures `site` with a complete set of orthogonal projectors.
pub fn measure_site<R: Rng + ?Sized>(
    state: &StateVector,
    site: usize,
    projectors: &[CMatrix],
    rng: &mut R,
) -> Result<(usize, StateVector, f64)> {
    let branches = projectors
        .iter()
        .map(|p| state.apply_local(&LocalOperator::new(site, p.clone())?))
        .collect::<Result<Vec<_>>>()?;
    let weights: Vec<f64> = branches.iter().map(StateVector::norm_sqr).collect();
    let total: f64 = weights.iter().sum();
    if total < tolerances::NULL_PROBABILITY {
        return Err(Error::NullState(total));
    }
    let pick = sample_index(&weights, rng).ok_or(Error::NullState(total))?;
    let mut collapsed = branches.into_iter().nth(pick).expect("index from weights");
    collapsed.normalize()?;
    Ok((pick, collapsed, weights[pick] / total))
}

fn check_plan(state: &StateVector, plan: &MeasurementPlan) -> Result<usize> {
    let spec = state.chain_spec()?;
    if spec.bulk_dim() != 3 {
        return Err(Error::Unsupported("measurement protocols need spin-1 bulk sites".into()));
    }
    if spec.n_bulk() != plan.n_bulk() {
        return Err(Error::Precondition(format!("plan covers {} bulk sites, state has {}", plan.n_bulk(), spec.n_bulk())));
    }
    Ok(spec.n_bulk())
}

/// Basis at bulk site `j` given the outcomes so far.
pub fn site_basis(plan: &MeasurementPlan, j: usize, frame: &ByproductFrame) -> [CVector; 3] {
    let site = plan.site(j);
    if site.is_identity() {
        return Axis::ALL.map(spin1_zero_projection);
    }
    let theta = if site.adaptive { frame.adaptive_angle(site.angle, site.axis) } else { site.angle };
    rotated_spin1_basis(site.axis, theta)
}

/// Children of one node of the outcome tree: unnormalized post-measurement states
/// of the remaining sites for each outcome label.
fn expand(plan: &MeasurementPlan, level: usize, frame: Option<&ByproductFrame>, state: &StateVector) -> Result<Vec<StateVector>> {
    let bras: Vec<CVector> = match (level, frame) {
        (0, _) => boundary_basis(plan.site0_axis).to_vec(),
        (j, Some(f)) => site_basis(plan, j, f).to_vec(),
        (_, None) => unreachable!("bulk levels always carry a frame"),
    };
    bras.iter().map(|b| state.contract_leading(b)).collect()
}

/// `(P(+), P(−))` of the readout Pauli on a (possibly unnormalized) qubit.
fn readout_weights(qubit: &StateVector, axis: Axis) -> [f64; 2] {
    let v = qubit.to_cvector();
    let n = v.norm_squared();
    let ev = v.dotc(&(pauli(axis) * &v)).re / n;
    [((1.0 + ev) / 2.0).max(0.0), ((1.0 - ev) / 2.0).max(0.0)]
}

fn sample_child<R: Rng + ?Sized>(children: &[StateVector], rng: &mut R) -> Result<(usize, f64)> {
    let weights: Vec<f64> = children.iter().map(StateVector::norm_sqr).collect();
    let total: f64 = weights.iter().sum();
    if total < tolerances::NULL_PROBABILITY {
        return Err(Error::NullState(total));
    }
    let pick = sample_index(&weights, rng).ok_or(Error::NullState(total))?;
    Ok((pick, weights[pick] / total))
}

/// One full round: site 0, bulk sites with adaptive angles, then the readout qubit.
pub fn run_round<R: Rng + ?Sized>(state: &StateVector, plan: &MeasurementPlan, rng: &mut R) -> Result<(MeasurementPath, RoundOutcome)> {
    let n = check_plan(state, plan)?;
    let children = expand(plan, 0, None, state)?;
    let (s0, mut probability) = sample_child(&children, rng)?;
    let mut current = children.into_iter().nth(s0).expect("sampled");
    current.normalize()?;
    let mut frame = ByproductFrame::new(plan.site0_axis, s0 as u8);
    for j in 1..=n {
        let children = expand(plan, j, Some(&frame), &current)?;
        let (pick, p) = sample_child(&children, rng)?;
        probability *= p;
        current = children.into_iter().nth(pick).expect("sampled");
        current.normalize()?;
        frame.record(Axis::ALL[pick]);
    }
    let weights = readout_weights(&current, plan.readout);
    let last = sample_index(&weights, rng).ok_or(Error::NullState(0.0))?;
    probability *= weights[last];
    let sign = frame.parity(plan.readout);
    let eigenvalue: i8 = if last == 0 { 1 } else { -1 };
    let path = MeasurementPath { s0: s0 as u8, bulk: frame.outcomes().to_vec(), last: last as u8, probability, readout_sign: sign };
    Ok((path, RoundOutcome { mu: eigenvalue * sign }))
}

/// Exact byproduct-corrected path averages `⟨⟨σ^α_{N+1}⟩⟩` for α = x, y, z.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathSums {
    pub expectations: [f64; 3],
    pub total_probability: f64,
    pub paths: u64,
}

impl PathSums {
    pub fn get(&self, axis: Axis) -> f64 {
        self.expectations[axis.index()]
    }
}

fn path_count(n: usize) -> u128 {
    2 * 3u128.pow(n as u32)
}

/// Depth-first sum over all measurement paths, collapsing site by site and
/// evaluating the readout analytically on the final qubit.
pub fn enumerate_paths(state: &StateVector, plan: &MeasurementPlan) -> Result<PathSums> {
    let n = check_plan(state, plan)?;
    if path_count(n) > PATH_BUDGET {
        return Err(Error::BudgetExceeded { paths: path_count(n), limit: PATH_BUDGET });
    }
    let mut roots = Vec::with_capacity(6);
    for (s0, child) in expand(plan, 0, None, state)?.into_iter().enumerate() {
        let frame = ByproductFrame::new(plan.site0_axis, s0 as u8);
        for (a, grandchild) in expand(plan, 1, Some(&frame), &child)?.into_iter().enumerate() {
            let mut f = frame.clone();
            f.record(Axis::ALL[a]);
            roots.push((grandchild, f));
        }
    }
    let paulis = Axis::ALL.map(pauli);
    let partials = roots
        .into_par_iter()
        .map(|(s, f)| {
            let mut acc = PathSums { expectations: [0.0; 3], total_probability: 0.0, paths: 0 };
            descend(plan, 2, n, &s, &f, &paulis, &mut acc)?;
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(partials.into_iter().fold(PathSums { expectations: [0.0; 3], total_probability: 0.0, paths: 0 }, |mut a, p| {
        for i in 0..3 {
            a.expectations[i] += p.expectations[i];
        }
        a.total_probability += p.total_probability;
        a.paths += p.paths;
        a
    }))
}

fn descend(
    plan: &MeasurementPlan,
    level: usize,
    n: usize,
    state: &StateVector,
    frame: &ByproductFrame,
    paulis: &[CMatrix; 3],
    acc: &mut PathSums,
) -> Result<()> {
    if state.norm_sqr() == 0.0 {
        return Ok(());
    }
    if level > n {
        let v = state.to_cvector();
        acc.total_probability += v.norm_squared();
        acc.paths += 1;
        for axis in Axis::ALL {
            let weighted = v.dotc(&(&paulis[axis.index()] * &v)).re;
            acc.expectations[axis.index()] += f64::from(frame.parity(axis)) * weighted;
        }
        return Ok(());
    }
    for (a, child) in expand(plan, level, Some(frame), state)?.into_iter().enumerate() {
        let mut f = frame.clone();
        f.record(Axis::ALL[a]);
        descend(plan, level + 1, n, &child, &f, paulis, acc)?;
    }
    Ok(())
}

/// Every path with its probability, including the readout outcome. Small chains only.
pub fn enumerate_path_records(state: &StateVector, plan: &MeasurementPlan) -> Result<Vec<MeasurementPath>> {
    let n = check_plan(state, plan)?;
    if 2 * path_count(n) > 1 << 16 {
        return Err(Error::BudgetExceeded { paths: 2 * path_count(n), limit: 1 << 16 });
    }
    let mut out = Vec::new();
    for (s0, child) in expand(plan, 0, None, state)?.into_iter().enumerate() {
        let frame = ByproductFrame::new(plan.site0_axis, s0 as u8);
        collect_records(plan, 1, n, child, frame, &mut out)?;
    }
    Ok(out)
}

fn collect_records(
    plan: &MeasurementPlan,
    level: usize,
    n: usize,
    state: StateVector,
    frame: ByproductFrame,
    out: &mut Vec<MeasurementPath>,
) -> Result<()> {
    if level > n {
        let p = state.norm_sqr();
        if p == 0.0 {
            return Ok(());
        }
        let w = readout_weights(&state, plan.readout);
        for (last, wl) in w.iter().enumerate() {
            out.push(MeasurementPath {
                s0: frame.s0(),
                bulk: frame.outcomes().to_vec(),
                last: last as u8,
                probability: p * wl,
                readout_sign: frame.parity(plan.readout),
            });
        }
        return Ok(());
    }
    for (a, child) in expand(plan, level, Some(&frame), &state)?.into_iter().enumerate() {
        let mut f = frame.clone();
        f.record(Axis::ALL[a]);
        collect_records(plan, level + 1, n, child, f, out)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub axis: Axis,
    pub rounds: u64,
    pub mean: f64,
    pub stderr: f64,
}

/// Lazily built outcome tree; each node keeps its normalized children and their weights.
struct Node {
    weights: Vec<f64>,
    children: Vec<Arc<StateVector>>,
}

struct Sampler<'a> {
    plan: &'a MeasurementPlan,
    n: usize,
    root: Arc<StateVector>,
    nodes: HashMap<Vec<u8>, Node>,
}

impl<'a> Sampler<'a> {
    fn node(&mut self, prefix: &[u8], state: &Arc<StateVector>) -> Result<&Node> {
        if !self.nodes.contains_key(prefix) {
            let level = prefix.len();
            let node = if level == self.n + 1 {
                Node { weights: readout_weights(state, self.plan.readout).to_vec(), children: Vec::new() }
            } else {
                let frame = (level > 0).then(|| frame_of(self.plan, prefix));
                let raw = expand(self.plan, level, frame.as_ref(), state)?;
                let weights: Vec<f64> = raw.iter().map(StateVector::norm_sqr).collect();
                let children = raw
                    .into_iter()
                    .map(|mut s| {
                        if s.norm_sqr() > 0.0 {
                            s.normalize()?;
                        }
                        Ok(Arc::new(s))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Node { weights, children }
            };
            self.nodes.insert(prefix.to_vec(), node);
        }
        Ok(&self.nodes[prefix])
    }

    fn round<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<i8> {
        let (n, plan) = (self.n, self.plan);
        let mut prefix: Vec<u8> = Vec::with_capacity(n + 2);
        let mut state = self.root.clone();
        loop {
            let level = prefix.len();
            let node = self.node(&prefix, &state)?;
            let total: f64 = node.weights.iter().sum();
            let pick = sample_index(&node.weights, rng).ok_or(Error::NullState(total))?;
            if level == n + 1 {
                let frame = frame_of(plan, &prefix);
                let eigenvalue: i8 = if pick == 0 { 1 } else { -1 };
                return Ok(eigenvalue * frame.parity(plan.readout));
            }
            state = node.children[pick].clone();
            prefix.push(pick as u8);
        }
    }
}

fn frame_of(plan: &MeasurementPlan, prefix: &[u8]) -> ByproductFrame {
    let mut frame = ByproductFrame::new(plan.site0_axis, prefix[0]);
    for &a in &prefix[1..] {
        frame.record(Axis::ALL[a as usize]);
    }
    frame
}

/// Monte Carlo estimate of the corrected readout mean. Rounds are split into
/// [`MC_CHUNKS`] fixed chunks with RNG stream `stream_base + chunk`, so the result is
/// independent of the worker count.
pub fn monte_carlo(state: &StateVector, plan: &MeasurementPlan, rounds: u64, seed: u64, stream_base: u64) -> Result<McEstimate> {
    let n = check_plan(state, plan)?;
    if rounds == 0 {
        return Err(Error::InvalidParameter("rounds must be positive".into()));
    }
    let root = Arc::new(state.clone());
    let sizes = chunk_sizes(rounds, MC_CHUNKS);
    let partial = sizes
        .par_iter()
        .enumerate()
        .map(|(c, &size)| {
            let mut rng = stream(seed, stream_base + c as u64);
            let mut sampler = Sampler { plan, n, root: root.clone(), nodes: HashMap::new() };
            let mut sum = 0i64;
            for _ in 0..size {
                sum += i64::from(sampler.round(&mut rng)?);
            }
            Ok(sum)
        })
        .collect::<Result<Vec<i64>>>()?;
    let total: i64 = partial.iter().sum();
    let m = rounds as f64;
    let mean = total as f64 / m;
    // μ = ±1, so the sample variance is (1 − mean²)·M/(M−1).
    let variance = if rounds > 1 { (1.0 - mean * mean).max(0.0) * m / (m - 1.0) } else { 0.0 };
    Ok(McEstimate { axis: plan.readout, rounds, mean, stderr: (variance / m).sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::{ONE, ZERO};
    use crate::qcore::spin::pauli_eigenstate;
    use crate::qcore::ChainSpec;
    use crate::states::build_aklt_prime;

    #[test]
    fn boundary_outcomes_are_equally_likely() {
        let psi = build_aklt_prime(4).unwrap();
        let children = expand(&MeasurementPlan::unrotated(4), 0, None, &psi).unwrap();
        for c in &children {
            assert!((c.norm_sqr() - 0.5).abs() < 1e-10);
        }
    }

    #[test]
    fn eigenstate_measurement_is_deterministic() {
        let reg = crate::qcore::Register::new(vec![2, 3]).unwrap();
        let zero = CVector::from_column_slice(&[ZERO, ONE, ZERO]);
        let psi = StateVector::product(reg, &[pauli_eigenstate(Axis::X, 1), zero]).unwrap();
        let projectors: Vec<CMatrix> = [1i8, -1].iter().map(|&s| {
            let v = pauli_eigenstate(Axis::X, s);
            &v * v.adjoint()
        }).collect();
        let mut rng = stream(5, 0);
        let (k, post, p) = measure_site(&psi, 0, &projectors, &mut rng).unwrap();
        assert_eq!(k, 0);
        assert!((p - 1.0).abs() < 1e-14);
        assert!(post.is_normalized());
    }

    #[test]
    fn spin1_outcome_probabilities_sum_to_one() {
        let psi = build_aklt_prime(3).unwrap();
        let basis = rotated_spin1_basis(Axis::Z, 0.4);
        let projectors: Vec<CMatrix> = basis.iter().map(|v| v * v.adjoint()).collect();
        let total: f64 = projectors
            .iter()
            .map(|p| psi.apply_local(&LocalOperator::new(2, p.clone()).unwrap()).unwrap().norm_sqr())
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unrotated_plan_gives_logical_plus() {
        let psi = build_aklt_prime(4).unwrap();
        let sums = enumerate_paths(&psi, &MeasurementPlan::unrotated(4)).unwrap();
        assert!((sums.total_probability - 1.0).abs() < 1e-10);
        assert!((sums.get(Axis::X) - 1.0).abs() < 1e-10);
        assert!(sums.get(Axis::Y).abs() < 1e-10 && sums.get(Axis::Z).abs() < 1e-10);
    }

    #[test]
    fn records_match_brute_force_born_rule_on_a_product_state() {
        // N = 1 product resource: |+> ⊗ |S^x=0> ⊗ |0>; each record probability equals the
        // squared overlap with the product of the measured local states.
        let spec = ChainSpec::spin1(1).unwrap();
        let bulk = spin1_zero_projection(Axis::X);
        let locals = [pauli_eigenstate(Axis::X, 1), bulk, pauli_eigenstate(Axis::Z, 1)];
        let psi = StateVector::product(spec.register().clone(), &locals).unwrap();
        let plan = MeasurementPlan::single_rotation(1, 1, Axis::Z, 0.6).unwrap().with_readout(Axis::Y);
        let records = enumerate_path_records(&psi, &plan).unwrap();
        let total: f64 = records.iter().map(|r| r.probability).sum();
        assert!((total - 1.0).abs() < 1e-12);
        for r in &records {
            let b0 = &boundary_basis(Axis::X)[r.s0 as usize];
            let frame = ByproductFrame::new(Axis::X, r.s0);
            let b1 = &site_basis(&plan, 1, &frame)[r.bulk[0].index()];
            let b2 = pauli_eigenstate(Axis::Y, if r.last == 0 { 1 } else { -1 });
            let expected = b0.dotc(&locals[0]).norm_sqr() * b1.dotc(&locals[1]).norm_sqr() * b2.dotc(&locals[2]).norm_sqr();
            assert!((r.probability - expected).abs() < 1e-12, "{r:?} vs {expected}");
        }
    }

    #[test]
    fn monte_carlo_is_reproducible_and_consistent() {
        let psi = build_aklt_prime(3).unwrap();
        let plan = MeasurementPlan::single_rotation(3, 2, Axis::Z, 0.7).unwrap().with_readout(Axis::Y);
        let exact = enumerate_paths(&psi, &plan).unwrap().get(Axis::Y);
        let a = monte_carlo(&psi, &plan, 20_000, 11, 0).unwrap();
        let b = monte_carlo(&psi, &plan, 20_000, 11, 0).unwrap();
        assert_eq!(a, b);
        assert!((a.mean - exact).abs() < 5.0 * a.stderr, "{a:?} vs {exact}");
    }

    #[test]
    fn run_round_matches_sampler_statistics() {
        let psi = build_aklt_prime(2).unwrap();
        let plan = MeasurementPlan::single_rotation(2, 1, Axis::Z, 1.1).unwrap();
        let exact = enumerate_paths(&psi, &plan).unwrap().get(Axis::X);
        let mut rng = stream(2, 0);
        let m = 20_000;
        let mut sum = 0.0;
        for _ in 0..m {
            let (path, out) = run_round(&psi, &plan, &mut rng).unwrap();
            assert!(path.probability > 0.0 && path.probability <= 1.0);
            sum += f64::from(out.mu);
        }
        let mean = sum / m as f64;
        let se = ((1.0 - mean * mean) / m as f64).sqrt();
        assert!((mean - exact).abs() < 5.0 * se);
    }

    #[test]
    fn plan_length_must_match_state() {
        let psi = build_aklt_prime(2).unwrap();
        assert!(enumerate_paths(&psi, &MeasurementPlan::unrotated(3)).is_err());
    }
}
