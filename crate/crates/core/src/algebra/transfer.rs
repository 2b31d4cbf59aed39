//! Gates `V_k`, the transfer matrices `M_k` and evolved logical expectation values.
//!
//! A gate `(k, g, α)` is `V_k = exp(−iα/2 · U_{<k}(g) ⊗ S_k(g))` with
//! `U_{<k}(g) = u0(g) ⊗ u(g)^{⊗(k−1)}`. Conjugating a logical operator by it gives
//! `V_k† T̄(g′) V_k = Σ_h M_k[g′][h] T̄(h)` where the entries of `M_k` are operators on
//! sites `≥ k`. Gates act in list order, on strictly increasing sites.

use serde::{Deserialize, Serialize};

use super::bundle::RepresentationBundle;
use super::group::GroupElement;
use super::logical::{initial_expectations, tbar};
use crate::error::{Error, Result};
use crate::qcore::linalg::{c, cos_hermitian, identity, sin_hermitian, CMatrix, C64, I, ONE, ZERO};
use crate::qcore::{OperatorString, OperatorSum, StateVector};
use crate::states::ExpectationSource;
use crate::tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub site: usize,
    pub element: GroupElement,
    pub angle: f64,
}

impl Gate {
    pub fn new(site: usize, element: GroupElement, angle: f64) -> Self {
        Gate { site, element, angle }
    }
}

fn gate_spin<'a>(bundle: &'a RepresentationBundle, gate: &Gate) -> Result<&'a CMatrix> {
    let n = bundle.n_bulk();
    if gate.site == 0 || gate.site > n {
        return Err(Error::InvalidParameter(format!("gate site {} outside the bulk 1..={n}", gate.site)));
    }
    if !gate.angle.is_finite() {
        return Err(Error::InvalidParameter(format!("gate angle {}", gate.angle)));
    }
    bundle.s_checked(gate.element)
}

/// Rejects gate lists whose sites do not increase strictly.
pub fn check_gate_order(gates: &[Gate]) -> Result<()> {
    match gates.windows(2).find(|w| w[0].site >= w[1].site) {
        Some(w) => Err(Error::Precondition(format!(
            "gate sites must increase strictly along the sequence ({} then {})",
            w[0].site, w[1].site
        ))),
        None => Ok(()),
    }
}

/// `U_{<k}(g) = u0(g) ⊗ u(g)` on sites `0..k`.
pub fn prefix_symmetry(bundle: &RepresentationBundle, k: usize, g: GroupElement) -> OperatorString {
    let mut pairs = vec![(0, bundle.u0(g).clone())];
    pairs.extend((1..k).map(|j| (j, bundle.u(g).clone())));
    OperatorString::product_of(pairs).expect("increasing sites")
}

/// `u(g)` on sites `k+1..=N` and `vl(g)` on the right boundary.
fn suffix_symmetry(bundle: &RepresentationBundle, k: usize, g: GroupElement) -> Vec<(usize, CMatrix)> {
    let n = bundle.n_bulk();
    let mut pairs: Vec<(usize, CMatrix)> = (k + 1..=n).map(|j| (j, bundle.u(g).clone())).collect();
    pairs.push((n + 1, bundle.vl(g).clone()));
    pairs
}

/// `V_k = cos(αS/2) − i U_{<k} ⊗ sin(αS/2)`.
pub fn gate_unitary(bundle: &RepresentationBundle, gate: &Gate) -> Result<OperatorSum> {
    let s = gate_spin(bundle, gate)?;
    let half = gate.angle / 2.0;
    let mut sum = OperatorSum::from_string(OperatorString::single(gate.site, cos_hermitian(s, half))?);
    let sin_part = prefix_symmetry(bundle, gate.site, gate.element)
        .times(&OperatorString::single(gate.site, sin_hermitian(s, half))?)?
        .scaled(-I);
    sum.push(sin_part);
    Ok(sum)
}

/// `V_t ⋯ V_1 |Ψ>`.
pub fn apply_gates(bundle: &RepresentationBundle, state: &StateVector, gates: &[Gate]) -> Result<StateVector> {
    gates.iter().try_fold(state.clone(), |psi, gate| psi.apply_sum(&gate_unitary(bundle, gate)?))
}

/// `L_k(g) = U_{<k}(g) ⊗ S_k(g)`, the generator of the gate.
pub fn generator_operator(bundle: &RepresentationBundle, site: usize, element: GroupElement) -> Result<OperatorString> {
    let s = gate_spin(bundle, &Gate::new(site, element, 0.0))?;
    prefix_symmetry(bundle, site, element).times(&OperatorString::single(site, s.clone())?)
}

/// `cos(S_k(g)α)` on site `k`.
pub fn cos_operator(bundle: &RepresentationBundle, gate: &Gate) -> Result<OperatorString> {
    let s = gate_spin(bundle, gate)?;
    OperatorString::single(gate.site, cos_hermitian(s, gate.angle))
}

/// `sin(β)R_k = sin(S_k(g)α) u_k(g) ⊗ u(g)^{⊗(N−k)} ⊗ vl(g)`.
pub fn sin_beta_r_operator(bundle: &RepresentationBundle, gate: &Gate) -> Result<OperatorString> {
    let s = gate_spin(bundle, gate)?;
    let local = sin_hermitian(s, gate.angle) * bundle.u(gate.element);
    let mut pairs = vec![(gate.site, local)];
    pairs.extend(suffix_symmetry(bundle, gate.site, gate.element));
    OperatorString::product_of(pairs)
}

/// The single-gate operators and scalars of the effective logical channel.
#[derive(Debug, Clone)]
pub struct LkRk {
    pub gate: Gate,
    /// The generator `L_k(g)`.
    pub l: OperatorString,
    pub cos_s: OperatorString,
    pub sin_beta_r: OperatorString,
    /// `R_k` itself; `None` when `sin β` vanishes.
    pub r: Option<OperatorString>,
    pub beta: f64,
    /// `<Ψ|R_k|Ψ>`; `None` when `sin β` vanishes.
    pub sigma: Option<f64>,
    /// `<Ψ|sin(β)R_k|Ψ>`, defined for every angle.
    pub sin_beta_sigma: f64,
}

pub fn lk_rk_beta<S: ExpectationSource + ?Sized>(bundle: &RepresentationBundle, src: &S, gate: &Gate) -> Result<LkRk> {
    let l = generator_operator(bundle, gate.site, gate.element)?;
    let cos_s = cos_operator(bundle, gate)?;
    let sin_beta_r = sin_beta_r_operator(bundle, gate)?;
    let cos_beta = src.expectation(&cos_s)?.re;
    if cos_beta.abs() > 1.0 + tolerances::NORM {
        return Err(Error::Precondition(format!("<cos(Sα)> = {cos_beta} lies outside [−1, 1]")));
    }
    let beta = cos_beta.clamp(-1.0, 1.0).acos();
    let sin_beta = beta.sin();
    let sin_beta_sigma = src.expectation(&sin_beta_r)?.re;
    let (r, sigma) = if sin_beta.abs() < tolerances::NORM {
        (None, None)
    } else {
        (Some(sin_beta_r.clone().scaled(c(1.0 / sin_beta, 0.0))), Some(sin_beta_sigma / sin_beta))
    };
    Ok(LkRk { gate: *gate, l, cos_s, sin_beta_r, r, beta, sigma, sin_beta_sigma })
}

/// `M_k` with entries in group order; `None` marks a zero entry.
#[derive(Debug, Clone)]
pub struct MkMatrix {
    gate: Gate,
    entries: Vec<Vec<Option<OperatorString>>>,
}

impl MkMatrix {
    pub fn gate(&self) -> &Gate {
        &self.gate
    }

    pub fn order(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, row: GroupElement, col: GroupElement) -> Option<&OperatorString> {
        self.entries[row.index()][col.index()].as_ref()
    }

    pub fn is_identity(&self) -> bool {
        self.entries.iter().enumerate().all(|(i, row)| {
            row.iter().enumerate().all(|(j, e)| match e {
                None => i != j,
                Some(s) => i == j && s.factors().is_empty() && (s.coefficient() - ONE).norm() < tolerances::OPERATOR,
            })
        })
    }

    pub fn to_operator_matrix(&self) -> OperatorMatrix {
        OperatorMatrix {
            entries: self
                .entries
                .iter()
                .map(|row| row.iter().map(|e| e.clone().map(OperatorSum::from_string).unwrap_or_default()).collect())
                .collect(),
        }
    }
}

pub fn mk_matrix(bundle: &RepresentationBundle, gate: &Gate) -> Result<MkMatrix> {
    gate_spin(bundle, gate)?;
    let order = bundle.order();
    let mut entries = vec![vec![None; order]; order];
    if gate.angle == 0.0 {
        for (i, row) in entries.iter_mut().enumerate() {
            row[i] = Some(OperatorString::identity());
        }
        return Ok(MkMatrix { gate: *gate, entries });
    }
    let cos = cos_operator(bundle, gate)?;
    let sin_r = sin_beta_r_operator(bundle, gate)?;
    let gk = gate.element;
    for gp in bundle.elements() {
        let row = &mut entries[gp.index()];
        if bundle.kappa(gk, gp) == 0 {
            row[gp.index()] = Some(OperatorString::identity());
        } else {
            row[gp.index()] = Some(cos.clone());
            row[(gk * gp).index()] = Some(sin_r.clone().scaled(I * bundle.omega(gk, gp)));
        }
    }
    Ok(MkMatrix { gate: *gate, entries })
}

/// A group-indexed matrix whose entries are operator sums.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    entries: Vec<Vec<OperatorSum>>,
}

impl OperatorMatrix {
    pub fn identity(order: usize) -> Self {
        OperatorMatrix {
            entries: (0..order)
                .map(|i| (0..order).map(|j| if i == j { OperatorSum::identity() } else { OperatorSum::zero() }).collect())
                .collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> &OperatorSum {
        &self.entries[row][col]
    }

    /// Matrix product; entries of `self` stand to the left.
    pub fn times(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        let n = self.order();
        let mut entries = vec![vec![OperatorSum::zero(); n]; n];
        for (i, row) in entries.iter_mut().enumerate() {
            for (j, slot) in row.iter_mut().enumerate() {
                for k in 0..n {
                    let (a, b) = (&self.entries[i][k], &other.entries[k][j]);
                    if !a.is_zero() && !b.is_zero() {
                        slot.add(&a.times(b)?);
                    }
                }
            }
        }
        Ok(OperatorMatrix { entries })
    }

    /// Entrywise `<Ψ|·|Ψ>`.
    pub fn expectation<S: ExpectationSource + ?Sized>(&self, src: &S) -> Result<CMatrix> {
        let n = self.order();
        let mut out = CMatrix::from_element(n, n, ZERO);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = sum_expectation(src, &self.entries[i][j])?;
            }
        }
        Ok(out)
    }
}

pub fn sum_expectation<S: ExpectationSource + ?Sized>(src: &S, sum: &OperatorSum) -> Result<C64> {
    sum.terms().iter().try_fold(ZERO, |acc, t| Ok(acc + src.expectation(t)?))
}

/// `M_t ⋯ M_1` for gates listed in time order.
pub fn transfer_product(bundle: &RepresentationBundle, gates: &[Gate]) -> Result<OperatorMatrix> {
    check_gate_order(gates)?;
    gates.iter().rev().try_fold(OperatorMatrix::identity(bundle.order()), |acc, gate| {
        acc.times(&mk_matrix(bundle, gate)?.to_operator_matrix())
    })
}

/// `<Ψ|T̄_t(g)|Ψ>` from the conjugated state: `<V Ψ| T̄(g) |V Ψ>`.
pub fn direct_expectations(bundle: &RepresentationBundle, state: &StateVector, gates: &[Gate]) -> Result<Vec<C64>> {
    let evolved = apply_gates(bundle, state, gates)?;
    bundle.elements().into_iter().map(|g| evolved.expectation(&tbar(bundle, g))).collect()
}

/// `<Ψ| Σ_h (M_t⋯M_1)[g][h] T̄(h) |Ψ>`, exact for any state.
pub fn transfer_expectations<S: ExpectationSource + ?Sized>(
    bundle: &RepresentationBundle,
    src: &S,
    gates: &[Gate],
) -> Result<Vec<C64>> {
    let product = transfer_product(bundle, gates)?;
    let tbars: Vec<OperatorSum> = bundle.elements().into_iter().map(|h| OperatorSum::from_string(tbar(bundle, h))).collect();
    bundle
        .elements()
        .into_iter()
        .map(|g| {
            (0..bundle.order()).try_fold(ZERO, |acc, h| {
                let entry = product.entry(g.index(), h);
                if entry.is_zero() {
                    return Ok(acc);
                }
                Ok(acc + sum_expectation(src, &entry.times(&tbars[h])?)?)
            })
        })
        .collect()
}

/// `Σ_h (Π_k <M_k>)[g][h] <T̄(h)>`: each gate's entries averaged separately, which is exact
/// only when the gates are uncorrelated.
pub fn factorized_expectations<S: ExpectationSource + ?Sized>(
    bundle: &RepresentationBundle,
    src: &S,
    gates: &[Gate],
) -> Result<Vec<C64>> {
    check_gate_order(gates)?;
    let order = bundle.order();
    let mut product = identity(order);
    for gate in gates.iter().rev() {
        product *= mk_matrix(bundle, gate)?.to_operator_matrix().expectation(src)?;
    }
    let init = initial_expectations(bundle, src)?;
    Ok((0..order).map(|g| (0..order).map(|h| product[(g, h)] * init[h]).sum()).collect())
}

#[derive(Debug, Clone)]
pub struct EvolvedExpectations {
    /// `<Ψ|T̄_t(g)|Ψ>` in group order.
    pub values: Vec<C64>,
    /// The same quantity through the transfer-matrix product.
    pub transfer: Vec<C64>,
    pub residual: f64,
}

/// Evaluates `<Ψ|T̄_t(g)|Ψ>` by direct conjugation and through the `M_k` product, and
/// fails if the two disagree beyond `1e−10`.
pub fn evolved_expectations(bundle: &RepresentationBundle, state: &StateVector, gates: &[Gate]) -> Result<EvolvedExpectations> {
    let values = direct_expectations(bundle, state, gates)?;
    let transfer = transfer_expectations(bundle, &crate::states::DenseSource::new(state)?, gates)?;
    let residual = values.iter().zip(&transfer).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    if residual > tolerances::PHYSICS {
        return Err(Error::Inconsistent { what: "direct and transfer-matrix evolved expectations".into(), residual });
    }
    Ok(EvolvedExpectations { values, transfer, residual })
}

/// `max |<M_B M_A> − <M_B><M_A>|` over entries, for two gate clusters with every site of `a`
/// left of every site of `b`.
pub fn cluster_factorization_residual<S: ExpectationSource + ?Sized>(
    bundle: &RepresentationBundle,
    src: &S,
    a: &[Gate],
    b: &[Gate],
) -> Result<f64> {
    let joint_gates: Vec<Gate> = a.iter().chain(b).cloned().collect();
    let joint = transfer_product(bundle, &joint_gates)?.expectation(src)?;
    let ma = transfer_product(bundle, a)?.expectation(src)?;
    let mb = transfer_product(bundle, b)?.expectation(src)?;
    Ok((joint - mb * ma).iter().map(|z| z.norm()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::bundle::spin1_bundle;
    use crate::mbqc::{enumerate_paths, MeasurementPlan};
    use crate::observables::nu;
    use crate::qcore::linalg::op_norm;
    use crate::qcore::Axis;
    use crate::states::{build_aklt_prime, AkltChain, DenseSource};

    fn el(b: &RepresentationBundle, l: &str) -> GroupElement {
        b.group().parse_element(l).unwrap()
    }

    #[test]
    fn gate_is_the_exponential_of_the_generator() {
        let b = spin1_bundle(3).unwrap();
        let reg = b.spec().unwrap().register().clone();
        let gate = Gate::new(2, el(&b, "x"), 0.9);
        let v = gate_unitary(&b, &gate).unwrap().to_dense(&reg).unwrap();
        let gen = generator_operator(&b, 2, gate.element).unwrap().to_dense(&reg).unwrap();
        let want = crate::qcore::linalg::exp_i_hermitian(&gen, -0.45);
        assert!(op_norm(&(v - want)) < 1e-12);
    }

    #[test]
    fn zero_angle_gives_identity_mk() {
        let b = spin1_bundle(3).unwrap();
        assert!(mk_matrix(&b, &Gate::new(1, el(&b, "z"), 0.0)).unwrap().is_identity());
        assert!(!mk_matrix(&b, &Gate::new(1, el(&b, "z"), 0.1)).unwrap().is_identity());
    }

    #[test]
    fn single_gate_conjugation_matches_row_action() {
        let b = spin1_bundle(3).unwrap();
        let reg = b.spec().unwrap().register().clone();
        for l in ["x", "y", "z"] {
            let gate = Gate::new(2, el(&b, l), 0.7);
            let v = gate_unitary(&b, &gate).unwrap().to_dense(&reg).unwrap();
            let m = mk_matrix(&b, &gate).unwrap().to_operator_matrix();
            for gp in b.elements() {
                let lhs = v.adjoint() * tbar(&b, gp).to_dense(&reg).unwrap() * &v;
                let mut rhs = CMatrix::zeros(lhs.nrows(), lhs.ncols());
                for h in b.elements() {
                    let e = m.entry(gp.index(), h.index());
                    if !e.is_zero() {
                        rhs += e.to_dense(&reg).unwrap() * tbar(&b, h).to_dense(&reg).unwrap();
                    }
                }
                assert!(op_norm(&(lhs - rhs)) < 1e-11, "g_k={l} g'={}", b.label(gp));
            }
        }
    }

    #[test]
    fn two_routes_agree_for_a_three_gate_sequence() {
        let b = spin1_bundle(4).unwrap();
        let psi = build_aklt_prime(4).unwrap();
        let gates = [Gate::new(1, el(&b, "y"), 0.5), Gate::new(2, el(&b, "z"), -1.2), Gate::new(4, el(&b, "x"), 2.0)];
        let ev = evolved_expectations(&b, &psi, &gates).unwrap();
        assert!(ev.residual < 1e-12);
        // The valence-bond evaluator gives the same transfer values.
        let vb = transfer_expectations(&b, &AkltChain::new(4).unwrap(), &gates).unwrap();
        for (a, bb) in vb.iter().zip(&ev.values) {
            assert!((a - bb).norm() < 1e-11);
        }
    }

    #[test]
    fn no_gates_give_the_initial_vector() {
        let b = spin1_bundle(3).unwrap();
        let psi = build_aklt_prime(3).unwrap();
        let ev = evolved_expectations(&b, &psi, &[]).unwrap();
        let want = [1.0, 0.0, -1.0, 0.0];
        for (v, w) in ev.values.iter().zip(want) {
            assert!((v - c(w, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn single_z_gate_reproduces_the_measurement_readout() {
        let (n, k, phi) = (5, 3, 0.7);
        let b = spin1_bundle(n).unwrap();
        let psi = build_aklt_prime(n).unwrap();
        let ev = evolved_expectations(&b, &psi, &[Gate::new(k, el(&b, "z"), phi)]).unwrap();
        let plan = MeasurementPlan::single_rotation(n, k, Axis::Z, phi).unwrap();
        let sums = enumerate_paths(&psi, &plan).unwrap();
        assert!((sums.get(Axis::X) + ev.values[el(&b, "x").index()].re).abs() < 1e-10);
        assert!((sums.get(Axis::Y) + ev.values[el(&b, "y").index()].re).abs() < 1e-10);
    }

    #[test]
    fn small_angle_limit_of_sigma_is_nu() {
        let chain = AkltChain::new(8).unwrap();
        let b = spin1_bundle(8).unwrap();
        let alpha = 1e-5;
        let r = lk_rk_beta(&b, &chain, &Gate::new(4, el(&b, "z"), alpha)).unwrap();
        let want = nu(&chain, 4, Axis::Z).unwrap();
        assert!((r.sin_beta_sigma / alpha - want).abs() < 1e-8);
        let r0 = lk_rk_beta(&b, &chain, &Gate::new(4, el(&b, "z"), 0.0)).unwrap();
        assert_eq!(r0.beta, 0.0);
        assert!(r0.sigma.is_none());
    }

    #[test]
    fn gate_order_and_sites_are_checked() {
        let b = spin1_bundle(3).unwrap();
        let z = el(&b, "z");
        assert!(transfer_product(&b, &[Gate::new(2, z, 0.1), Gate::new(2, z, 0.1)]).is_err());
        assert!(mk_matrix(&b, &Gate::new(4, z, 0.1)).is_err());
        assert!(mk_matrix(&b, &Gate::new(0, z, 0.1)).is_err());
    }

    #[test]
    fn factorization_is_exact_for_far_clusters_at_the_aklt_point() {
        let b = spin1_bundle(8).unwrap();
        let chain = AkltChain::new(8).unwrap();
        let (z, x) = (el(&b, "z"), el(&b, "x"));
        let r = cluster_factorization_residual(&b, &chain, &[Gate::new(2, z, 0.8)], &[Gate::new(7, x, 0.6)]).unwrap();
        assert!(r < 2e-3);
        let dense = build_aklt_prime(6).unwrap();
        let b6 = spin1_bundle(6).unwrap();
        let gates = [Gate::new(2, z, 0.8), Gate::new(5, x, 0.6)];
        let fact = factorized_expectations(&b6, &DenseSource::new(&dense).unwrap(), &gates).unwrap();
        let exact = evolved_expectations(&b6, &dense, &gates).unwrap();
        for (f, e) in fact.iter().zip(&exact.values) {
            assert!((f - e).norm() < 2e-3);
        }
    }
}
