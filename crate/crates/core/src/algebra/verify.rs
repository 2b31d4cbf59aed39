//! A pass/fail report over every structural condition a bundle and resource state must meet,
//! plus the operator identities the logical calculus relies on.
//!
//! Identities between full-chain operators are checked on dense matrices and therefore only
//! for short chains (see [`DENSE_CHECK_LIMIT`]); longer chains report them as skipped.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::blocklocal::{block_local_distribution, TildeOperators};
use super::bundle::RepresentationBundle;
use super::channel::{compose_heisenberg, cptp_apply, ChannelParams, DensityCheck};
use super::group::GroupElement;
use super::logical::{initial_expectations, irreducibility, logical_subspace, predicted_initial_expectations, tbar, LogicalFrame};
use super::transfer::{
    cos_operator, evolved_expectations, gate_unitary, generator_operator, lk_rk_beta, mk_matrix, sin_beta_r_operator,
    transfer_product, Gate,
};
use crate::error::{Error, Result};
use crate::qcore::linalg::{frobenius_norm, identity, CMatrix, C64, ZERO};
use crate::qcore::{OperatorString, OperatorSum, Register, StateVector};
use crate::rng::stream;
use crate::states::DenseSource;
use crate::tolerances;

/// Dense operator identities are checked up to this chain dimension.
pub const DENSE_CHECK_LIMIT: usize = 1024;
const GATE_IDENTITY_TOL: f64 = 1e-11;
const EXPECTATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub condition: String,
    /// `None` when the check could not be evaluated (see `error`).
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CheckResult {
    fn from_residual(condition: &str, tolerance: f64, residual: Result<f64>) -> Self {
        match residual {
            Ok(r) => CheckResult { condition: condition.into(), residual: Some(r), tolerance, pass: r <= tolerance, error: None },
            Err(e) => CheckResult { condition: condition.into(), residual: None, tolerance, pass: false, error: Some(e.to_string()) },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub element_order: Vec<String>,
    pub h: Vec<String>,
    pub n_bulk: usize,
    pub gates: Vec<Gate>,
    pub checks: Vec<CheckResult>,
    /// Conditions not evaluated, with the reason.
    pub skipped: Vec<String>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, condition: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.condition == condition)
    }

    pub fn failures(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    /// Gate sequence for the gate-dependent identities; `None` picks one from the bundle.
    pub gates: Option<Vec<Gate>>,
    /// Number of random gate sequences (length 1 to 3) for the conjugation identity.
    pub random_sequences: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { gates: None, random_sequences: 6, seed: 2024 }
    }
}

/// A first gate on site 1 and, for longer chains, a second one on the last site, using the
/// first and last non-trivial gate elements.
pub fn default_gates(bundle: &RepresentationBundle) -> Vec<Gate> {
    let elements: Vec<GroupElement> = bundle.gate_elements().into_iter().filter(|g| !g.is_identity()).collect();
    let (Some(&first), Some(&last)) = (elements.first(), elements.last()) else {
        return Vec::new();
    };
    let mut gates = vec![Gate::new(1, first, 0.7)];
    if bundle.n_bulk() >= 2 {
        gates.push(Gate::new(bundle.n_bulk(), last, -1.1));
    }
    gates
}

fn random_gates<R: Rng>(bundle: &RepresentationBundle, rng: &mut R) -> Vec<Gate> {
    let elements = bundle.gate_elements();
    let n = bundle.n_bulk();
    let len = rng.gen_range(1..=3.min(n));
    let mut sites: Vec<usize> = rand::seq::index::sample(rng, n, len).into_iter().map(|s| s + 1).collect();
    sites.sort_unstable();
    sites
        .into_iter()
        .map(|site| {
            let g = elements[rng.gen_range(0..elements.len())];
            Gate::new(site, g, rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
        })
        .collect()
}

/// `‖A·B − sign·B·A‖` for product operators, evaluated densely.
fn twisted_commutator(a: &OperatorString, b: &OperatorString, sign: f64, register: &Register) -> Result<f64> {
    let mut sum = OperatorSum::from_string(a.times(b)?);
    sum.push(b.times(a)?.scaled(C64::new(-sign, 0.0)));
    Ok(frobenius_norm(&sum.to_dense(register)?))
}

fn kappa_sign(bundle: &RepresentationBundle, a: GroupElement, b: GroupElement) -> f64 {
    if bundle.kappa(a, b) == 1 {
        -1.0
    } else {
        1.0
    }
}

/// Largest residual over every `(g, g′)` pair, evaluated in parallel.
fn over_pairs(bundle: &RepresentationBundle, f: impl Fn(GroupElement, GroupElement) -> Result<f64> + Sync) -> Result<f64> {
    let elements = bundle.elements();
    let pairs: Vec<(GroupElement, GroupElement)> =
        elements.iter().flat_map(|&a| elements.iter().map(move |&b| (a, b))).collect();
    pairs.par_iter().map(|&(a, b)| f(a, b)).try_reduce(|| 0.0, |x, y| Ok(x.max(y)))
}

pub fn verify_bundle(bundle: &RepresentationBundle, state: &StateVector, options: &VerifyOptions) -> Result<VerifyReport> {
    bundle.check_state(state)?;
    let gates = options.gates.clone().unwrap_or_else(|| default_gates(bundle));
    let mut checks = Vec::new();
    let mut skipped = Vec::new();
    let push = |checks: &mut Vec<CheckResult>, name: &str, tol: f64, r: Result<f64>| {
        checks.push(CheckResult::from_residual(name, tol, r));
    };

    push(&mut checks, "hermiticity", tolerances::NORM, Ok(bundle.hermiticity_residual().0));
    push(&mut checks, "linear_representation", tolerances::NORM, Ok(bundle.linear_representation_residual()));
    push(&mut checks, "projective_phase_fixing", tolerances::NORM, Ok(bundle.projective_square_residual()));
    push(&mut checks, "kappa_consistency", tolerances::NORM, Ok(bundle.kappa_consistency_residual()));
    push(&mut checks, "h_spec", tolerances::NORM, Ok(bundle.h_spec_residual()));
    push(&mut checks, "s_covariance", tolerances::NORM, Ok(bundle.s_covariance_residual()));

    let signs = bundle.symmetry_signs(state)?;
    let chi: Vec<u8> = signs.iter().map(|s| s.chi).collect();
    push(&mut checks, "symmetric_state", tolerances::PHYSICS, Ok(signs.iter().map(|s| s.residual).fold(0.0, f64::max)));

    let src = DenseSource::new(state)?;
    let initial = initial_expectations(bundle, &src)?;
    let predicted = predicted_initial_expectations(bundle, &chi);
    let init_residual = initial.iter().zip(&predicted).map(|(a, b)| (a - C64::new(*b, 0.0)).norm()).fold(0.0, f64::max);
    push(&mut checks, "initial_logical_expectations", tolerances::PHYSICS, Ok(init_residual));

    let irr = irreducibility(bundle, state)?;
    let irr_residual = (irr.dim_q * irr.dim_q).abs_diff(irr.operator_span_rank) + irr.dim_q.abs_diff(irr.expected_dim);
    checks.push(CheckResult {
        condition: "logical_space_irreducible".into(),
        residual: Some(irr_residual as f64),
        tolerance: 0.0,
        pass: irr.irreducible && !irr.rank_ambiguous,
        error: None,
    });

    let evolved = evolved_expectations(bundle, state, &gates).map(|e| e.residual);
    push(&mut checks, "direct_vs_transfer_expectations", EXPECTATION_TOL, evolved);

    let frame = LogicalFrame::new(bundle, &initial)?;
    push(&mut checks, "cptp_trace_and_positivity", tolerances::NORM, cptp_residual(bundle, &src, &frame, &gates));
    push(&mut checks, "heisenberg_matches_transfer_average", EXPECTATION_TOL, heisenberg_residual(bundle, &src, &frame, &gates));
    push(&mut checks, "block_local_end_to_end", EXPECTATION_TOL, block_local_residual(bundle, state, &gates));

    let register = state.register().clone();
    if register.total_dim() > DENSE_CHECK_LIMIT {
        skipped.push(format!(
            "dense operator identities (chain dimension {} > {DENSE_CHECK_LIMIT})",
            register.total_dim()
        ));
    } else {
        dense_checks(bundle, state, &gates, options, &register, &mut checks);
    }
    Ok(VerifyReport {
        element_order: bundle.group().labels().to_vec(),
        h: bundle.h().iter().map(|&g| bundle.label(g).to_string()).collect(),
        n_bulk: bundle.n_bulk(),
        gates,
        checks,
        skipped,
    })
}

fn cptp_residual(bundle: &RepresentationBundle, src: &DenseSource, frame: &LogicalFrame, gates: &[Gate]) -> Result<f64> {
    let q = frame.dim();
    let mixed = identity(q) / C64::new(q as f64, 0.0);
    let mut worst: f64 = 0.0;
    for gate in gates {
        let params = ChannelParams::from_lk_rk(&lk_rk_beta(bundle, src, gate)?)?;
        for rho in [frame.initial_density(), mixed.clone()] {
            let check = DensityCheck::of(&cptp_apply(frame, &rho, &params)?);
            worst = worst.max(check.trace_error).max(check.hermiticity).max(-check.min_eigenvalue);
        }
    }
    Ok(worst)
}

/// Heisenberg-evolved `T̄^P(g)` against `Σ_h (Π_k <M_k>)[g][h] T̄^P(h)`.
fn heisenberg_residual(bundle: &RepresentationBundle, src: &DenseSource, frame: &LogicalFrame, gates: &[Gate]) -> Result<f64> {
    let channels = gates
        .iter()
        .map(|g| ChannelParams::from_lk_rk(&lk_rk_beta(bundle, src, g)?))
        .collect::<Result<Vec<_>>>()?;
    let mut average = identity(bundle.order());
    for gate in gates.iter().rev() {
        average *= mk_matrix(bundle, gate)?.to_operator_matrix().expectation(src)?;
    }
    let mut worst: f64 = 0.0;
    for g in bundle.elements() {
        let evolved = compose_heisenberg(frame, frame.tbar(g), &channels);
        let mut want = CMatrix::from_element(frame.dim(), frame.dim(), ZERO);
        for h in bundle.elements() {
            want += frame.tbar(h) * average[(g.index(), h.index())];
        }
        worst = worst.max(frobenius_norm(&(evolved - want)));
    }
    Ok(worst)
}

/// Exact mean sign of the block-local protocol against `<Ψ|T̄_N(h)|Ψ>`, for every `h`.
fn block_local_residual(bundle: &RepresentationBundle, state: &StateVector, gates: &[Gate]) -> Result<f64> {
    let evolved = evolved_expectations(bundle, state, gates)?;
    let mut worst: f64 = 0.0;
    for h in bundle.elements() {
        let d = block_local_distribution(bundle, state, h, gates)?;
        worst = worst.max((d.mean() - evolved.values[h.index()].re).abs());
    }
    Ok(worst)
}

fn dense_checks(
    bundle: &RepresentationBundle,
    state: &StateVector,
    gates: &[Gate],
    options: &VerifyOptions,
    register: &Register,
    checks: &mut Vec<CheckResult>,
) {
    let tbars: Vec<OperatorString> = bundle.elements().into_iter().map(|g| tbar(bundle, g)).collect();
    let sites: Vec<usize> = (1..=bundle.n_bulk()).collect();
    let gate_elements = bundle.gate_elements();
    let probe_angle = 0.9;

    let r = over_pairs(bundle, |a, _| {
        let t = &tbars[a.index()];
        let sq = t.times(t)?.to_dense(register)?;
        Ok(frobenius_norm(&(sq - identity(register.total_dim()))))
    });
    checks.push(CheckResult::from_residual("tbar_squares_to_identity", tolerances::NORM, r));

    let r = over_pairs(bundle, |a, b| twisted_commutator(&tbars[a.index()], &tbars[b.index()], kappa_sign(bundle, a, b), register));
    checks.push(CheckResult::from_residual("tbar_anticommutation", GATE_IDENTITY_TOL, r));

    // The three gate-operator relations, over every site and gate element.
    let relation = |name: &str, build: &(dyn Fn(usize, GroupElement) -> Result<OperatorString> + Sync), twisted: bool| {
        let r = over_pairs(bundle, |g, _| {
            let mut worst: f64 = 0.0;
            for &gp in &gate_elements {
                for &k in &sites {
                    let op = build(k, gp)?;
                    let sign = if twisted { kappa_sign(bundle, g, gp) } else { 1.0 };
                    worst = worst.max(twisted_commutator(&op, &tbars[g.index()], sign, register)?);
                }
            }
            Ok(worst)
        });
        CheckResult::from_residual(name, GATE_IDENTITY_TOL, r)
    };
    checks.push(relation("cos_commutes_with_logicals", &|k, g| cos_operator(bundle, &Gate::new(k, g, probe_angle)), false));
    checks.push(relation("string_commutes_with_logicals", &|k, g| sin_beta_r_operator(bundle, &Gate::new(k, g, probe_angle)), false));
    checks.push(relation("generator_commutation", &|k, g| generator_operator(bundle, k, g), true));

    let mut rng = stream(options.seed, 0);
    let sequences: Vec<Vec<Gate>> = (0..options.random_sequences).map(|_| random_gates(bundle, &mut rng)).collect();
    let r = sequences.iter().try_fold(0.0f64, |acc, seq| Ok(acc.max(conjugation_residual(bundle, seq, &tbars, register)?)));
    checks.push(CheckResult::from_residual("conjugation_equals_transfer_product", EXPECTATION_TOL, r));

    let r = sequences.iter().try_fold(0.0f64, |acc, seq| Ok(acc.max(projection_residual(bundle, state, seq)?)));
    checks.push(CheckResult::from_residual("logical_projection_scalar", EXPECTATION_TOL, r));

    match TildeOperators::new(bundle, gates) {
        Ok(t) => {
            checks.push(CheckResult::from_residual("tilde_commutation", GATE_IDENTITY_TOL, Ok(t.commutation_residual())));
            checks.push(CheckResult::from_residual("tilde_gate_product", GATE_IDENTITY_TOL, t.gate_product_residual(bundle, gates)));
            checks.push(CheckResult::from_residual(
                "tilde_logical_observable",
                GATE_IDENTITY_TOL,
                t.logical_observable_residual(bundle, gates),
            ));
        }
        Err(e) => {
            for name in ["tilde_commutation", "tilde_gate_product", "tilde_logical_observable"] {
                checks.push(CheckResult::from_residual(name, GATE_IDENTITY_TOL, Err(Error::Precondition(e.to_string()))));
            }
        }
    }
}

/// `max_g ‖V† T̄(g) V − Σ_h (M_t⋯M_1)[g][h] T̄(h)‖` as dense matrices.
pub fn conjugation_residual(bundle: &RepresentationBundle, gates: &[Gate], tbars: &[OperatorString], register: &Register) -> Result<f64> {
    let dim = register.total_dim();
    let v = gates.iter().try_fold(identity(dim), |acc, g| Ok::<_, Error>(gate_unitary(bundle, g)?.to_dense(register)? * acc))?;
    let product = transfer_product(bundle, gates)?;
    bundle
        .elements()
        .par_iter()
        .map(|&g| {
            let lhs = v.adjoint() * tbars[g.index()].to_dense(register)? * &v;
            let mut rhs = OperatorSum::zero();
            for h in bundle.elements() {
                let entry = product.entry(g.index(), h.index());
                if !entry.is_zero() {
                    rhs.add(&entry.times(&OperatorSum::from_string(tbars[h.index()].clone()))?);
                }
            }
            Ok(frobenius_norm(&(lhs - rhs.to_dense(register)?)))
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

/// `max ‖P D P − <Ψ|D|Ψ> P‖` over the entries `D` of a transfer product, on the `Q` basis.
pub fn projection_residual(bundle: &RepresentationBundle, state: &StateVector, gates: &[Gate]) -> Result<f64> {
    let q = logical_subspace(bundle, state)?;
    let product = transfer_product(bundle, gates)?;
    let mut worst: f64 = 0.0;
    for g in bundle.elements() {
        for h in bundle.elements() {
            let entry = product.entry(g.index(), h.index());
            if entry.is_zero() {
                continue;
            }
            let mut restricted = CMatrix::from_element(q.dim(), q.dim(), ZERO);
            let mut expectation = ZERO;
            for term in entry.terms() {
                restricted += q.restrict(state, term)?;
                expectation += state.expectation(term)?;
            }
            worst = worst.max(frobenius_norm(&(restricted - identity(q.dim()) * expectation)));
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::bundle::{spin1_bundle, spin1_parts};
    use crate::qcore::linalg::c;
    use crate::states::build_aklt_prime;

    #[test]
    fn spin1_bundle_passes_everything_at_n4() {
        let b = spin1_bundle(4).unwrap();
        let psi = build_aklt_prime(4).unwrap();
        let report = verify_bundle(&b, &psi, &VerifyOptions::default()).unwrap();
        assert!(report.all_pass(), "{:#?}", report.failures());
        assert!(report.skipped.is_empty());
        assert!(report.checks.len() >= 20);
    }

    #[test]
    fn non_hermitian_s_fails_hermiticity() {
        let mut parts = spin1_parts(2);
        let mut s = parts.s[1].clone().unwrap();
        s[(0, 1)] = c(0.3, 0.0);
        parts.s[1] = Some(s);
        let b = RepresentationBundle::new(parts).unwrap();
        let psi = build_aklt_prime(2).unwrap();
        let report = verify_bundle(&b, &psi, &VerifyOptions::default()).unwrap();
        assert!(!report.check("hermiticity").unwrap().pass);
    }

    #[test]
    fn commuting_right_boundary_breaks_irreducibility() {
        let mut parts = spin1_parts(2);
        let z = crate::qcore::pauli(crate::qcore::Axis::Z);
        for i in 1..4 {
            parts.vl[i] = Some(if i == 2 { identity(2) } else { z.clone() });
        }
        let b = RepresentationBundle::new(parts).unwrap();
        let psi = build_aklt_prime(2).unwrap();
        let report = verify_bundle(&b, &psi, &VerifyOptions::default()).unwrap();
        assert!(!report.check("logical_space_irreducible").unwrap().pass);
        assert!(!report.all_pass());
    }
}
