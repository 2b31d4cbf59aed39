//! The effective logical channel of one gate and its composition towards a unitary.
//!
//! For a gate with angle parameters `(β, σ)` the logical qubit sees
//! `ρ ↦ (1+σ)/2 · V̄ρV̄† + (1−σ)/2 · V̄†ρV̄` with `V̄ = exp(−iβ T̄^P(g)/2)`.

use serde::{Deserialize, Serialize};

use super::bundle::RepresentationBundle;
use super::group::GroupElement;
use super::logical::LogicalFrame;
use super::transfer::{lk_rk_beta, sin_beta_r_operator, Gate, LkRk};
use crate::error::{Error, Result};
use crate::qcore::linalg::{exp_i_hermitian, hermitian_eigenvalues, identity, CMatrix, C64};
use crate::qcore::OperatorString;
use crate::states::ExpectationSource;
use crate::tolerances;

/// Channel parameters of one gate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub element: GroupElement,
    pub beta: f64,
    /// Weight bias between the two rotation senses; irrelevant (taken as 1) when `β = 0`.
    pub sigma: f64,
}

impl ChannelParams {
    pub fn from_lk_rk(lk: &LkRk) -> Result<Self> {
        let sigma = lk.sigma.unwrap_or(1.0);
        if sigma.abs() > 1.0 + tolerances::PHYSICS {
            return Err(Error::Precondition(format!("|σ| = {} exceeds 1: bundle and state are inconsistent", sigma.abs())));
        }
        Ok(ChannelParams { element: lk.gate.element, beta: lk.beta, sigma: sigma.clamp(-1.0, 1.0) })
    }

    pub fn unitary(element: GroupElement, beta: f64) -> Self {
        ChannelParams { element, beta, sigma: 1.0 }
    }

    fn rotation(&self, frame: &LogicalFrame) -> CMatrix {
        exp_i_hermitian(frame.tbar(self.element), -self.beta / 2.0)
    }
}

/// Schrödinger picture on a logical density matrix.
pub fn cptp_apply(frame: &LogicalFrame, rho: &CMatrix, params: &ChannelParams) -> Result<CMatrix> {
    check_density(frame, rho)?;
    let v = params.rotation(frame);
    let (p, m) = ((1.0 + params.sigma) / 2.0, (1.0 - params.sigma) / 2.0);
    Ok(&v * rho * v.adjoint() * C64::new(p, 0.0) + v.adjoint() * rho * &v * C64::new(m, 0.0))
}

/// Heisenberg picture on a logical observable.
pub fn cptp_heisenberg(frame: &LogicalFrame, observable: &CMatrix, params: &ChannelParams) -> CMatrix {
    let v = params.rotation(frame);
    let (p, m) = ((1.0 + params.sigma) / 2.0, (1.0 - params.sigma) / 2.0);
    v.adjoint() * observable * &v * C64::new(p, 0.0) + &v * observable * v.adjoint() * C64::new(m, 0.0)
}

/// Applies a sequence of channels, first element first.
pub fn compose(frame: &LogicalFrame, rho: &CMatrix, channels: &[ChannelParams]) -> Result<CMatrix> {
    channels.iter().try_fold(rho.clone(), |r, ch| cptp_apply(frame, &r, ch))
}

/// Heisenberg evolution of an observable through the same sequence (last channel first).
pub fn compose_heisenberg(frame: &LogicalFrame, observable: &CMatrix, channels: &[ChannelParams]) -> CMatrix {
    channels.iter().rev().fold(observable.clone(), |a, ch| cptp_heisenberg(frame, &a, ch))
}

fn check_density(frame: &LogicalFrame, rho: &CMatrix) -> Result<()> {
    let q = frame.dim();
    if rho.shape() != (q, q) {
        return Err(Error::DimensionMismatch(format!("density is {}x{}, logical space has dimension {q}", rho.nrows(), rho.ncols())));
    }
    Ok(())
}

/// Deviation of a density matrix from being Hermitian, trace one and positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityCheck {
    pub trace_error: f64,
    pub hermiticity: f64,
    pub min_eigenvalue: f64,
}

impl DensityCheck {
    pub fn of(rho: &CMatrix) -> Self {
        DensityCheck {
            trace_error: (rho.trace() - C64::new(1.0, 0.0)).norm(),
            hermiticity: crate::qcore::linalg::hermiticity_residual(rho),
            min_eigenvalue: hermitian_eigenvalues(rho).first().copied().unwrap_or(0.0),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.trace_error < tolerances::NORM && self.hermiticity < tolerances::NORM && self.min_eigenvalue > -tolerances::NORM
    }
}

/// `½‖ρ − τ‖₁`.
pub fn trace_distance(rho: &CMatrix, tau: &CMatrix) -> f64 {
    0.5 * hermitian_eigenvalues(&(rho - tau)).iter().map(|l| l.abs()).sum::<f64>()
}

/// `ν_k(g) = <Ψ| S_k(g) u_k(g) u(g)^{⊗(N−k)} vl(g) |Ψ>`, the small-angle rotation rate of a gate.
pub fn rotation_rate<S: ExpectationSource + ?Sized>(
    bundle: &RepresentationBundle,
    src: &S,
    site: usize,
    element: GroupElement,
) -> Result<f64> {
    let s = bundle.s_checked(element)?;
    // sin(αS)/α → S as α → 0; reuse the suffix bookkeeping of the sin(β)R operator.
    let probe = sin_beta_r_operator(bundle, &Gate::new(site, element, 1.0))?;
    let mut pairs: Vec<(usize, CMatrix)> = probe.factors().iter().map(|f| (f.site(), f.matrix().clone())).collect();
    let local = s * bundle.u(element);
    match pairs.iter_mut().find(|(j, _)| *j == site) {
        Some(entry) => entry.1 = local,
        None => pairs.push((site, local)),
    }
    Ok(src.expectation(&OperatorString::product_of(pairs)?)?.re)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitarityPoint {
    pub n: usize,
    pub sites: Vec<usize>,
    /// `Σ_k ν_k α/n`, the rotation the composed channel approaches.
    pub target_angle: f64,
    pub deviation: f64,
}

/// Sites `first, first + spacing, …` for `n` gates.
pub fn spaced_sites(n: usize, first: usize, spacing: usize) -> Vec<usize> {
    (0..n).map(|i| first + spacing * i).collect()
}

/// Composes `n = sites.len()` gates of angle `α/n` about `g` and measures the trace distance
/// of the output (from input `|Ψ>`) to the rotation `exp(−i(Σν_k α/n) T̄(g)/2)|Ψ>`.
pub fn unitarity_scaling<S: ExpectationSource + ?Sized>(
    bundle: &RepresentationBundle,
    src: &S,
    frame: &LogicalFrame,
    element: GroupElement,
    alpha: f64,
    sites: &[usize],
    d_min: usize,
) -> Result<UnitarityPoint> {
    if sites.is_empty() {
        return Err(Error::InvalidParameter("at least one gate site is needed".into()));
    }
    if let Some(w) = sites.windows(2).find(|w| w[1] < w[0] + d_min) {
        return Err(Error::Precondition(format!("sites {} and {} are closer than {d_min}", w[0], w[1])));
    }
    let n = sites.len();
    let angle = alpha / n as f64;
    let mut channels = Vec::with_capacity(n);
    let mut target_angle = 0.0;
    for &k in sites {
        let lk = lk_rk_beta(bundle, src, &Gate::new(k, element, angle))?;
        channels.push(ChannelParams::from_lk_rk(&lk)?);
        target_angle += rotation_rate(bundle, src, k, element)? * angle;
    }
    let rho0 = frame.initial_density();
    let out = compose(frame, &rho0, &channels)?;
    let w = exp_i_hermitian(frame.tbar(element), -target_angle / 2.0);
    let target = &w * &rho0 * w.adjoint();
    Ok(UnitarityPoint { n, sites: sites.to_vec(), target_angle, deviation: trace_distance(&out, &target) })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Logical-space identity, for callers composing channels on a fresh frame.
pub fn logical_identity(frame: &LogicalFrame) -> CMatrix {
    identity(frame.dim())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::bundle::spin1_bundle;
    use crate::algebra::transfer::{factorized_expectations, mk_matrix};
    use crate::observables::nu;
    use crate::qcore::linalg::op_norm;
    use crate::qcore::Axis;
    use crate::states::AkltChain;

    fn setup(n: usize) -> (RepresentationBundle, AkltChain, LogicalFrame) {
        let b = spin1_bundle(n).unwrap();
        let chain = AkltChain::new(n).unwrap();
        let frame = LogicalFrame::from_source(&b, &chain).unwrap();
        (b, chain, frame)
    }

    #[test]
    fn outputs_are_densities_and_zero_angle_is_identity() {
        let (b, chain, frame) = setup(6);
        let z = b.group().parse_element("z").unwrap();
        let rho = frame.initial_density();
        let lk = lk_rk_beta(&b, &chain, &Gate::new(3, z, 1.3)).unwrap();
        let out = cptp_apply(&frame, &rho, &ChannelParams::from_lk_rk(&lk).unwrap()).unwrap();
        assert!(DensityCheck::of(&out).is_valid(), "{:?}", DensityCheck::of(&out));
        let lk0 = lk_rk_beta(&b, &chain, &Gate::new(3, z, 0.0)).unwrap();
        let same = cptp_apply(&frame, &rho, &ChannelParams::from_lk_rk(&lk0).unwrap()).unwrap();
        assert!(op_norm(&(same - rho)) < 1e-15);
    }

    #[test]
    fn sigma_one_is_a_pure_rotation() {
        let (b, _, frame) = setup(4);
        let z = b.group().parse_element("z").unwrap();
        let rho = frame.initial_density();
        let out = cptp_apply(&frame, &rho, &ChannelParams::unitary(z, 0.8)).unwrap();
        assert!(((&out * &out).trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn heisenberg_chain_equals_averaged_transfer_product() {
        let (b, chain, frame) = setup(10);
        let els = b.elements();
        let gates = [Gate::new(2, els[1], 0.9), Gate::new(6, els[2], -0.4), Gate::new(9, els[3], 1.7)];
        let channels: Vec<ChannelParams> =
            gates.iter().map(|g| ChannelParams::from_lk_rk(&lk_rk_beta(&b, &chain, g).unwrap()).unwrap()).collect();
        let mut avg = identity(b.order());
        for g in gates.iter().rev() {
            avg *= mk_matrix(&b, g).unwrap().to_operator_matrix().expectation(&chain).unwrap();
        }
        for g in &els {
            let evolved = compose_heisenberg(&frame, frame.tbar(*g), &channels);
            let mut want = CMatrix::zeros(2, 2);
            for h in &els {
                want += frame.tbar(*h) * avg[(g.index(), h.index())];
            }
            assert!(op_norm(&(evolved - want)) < 1e-10);
        }
        // The (0,0) entry is the factorized expectation.
        let fact = factorized_expectations(&b, &chain, &gates).unwrap();
        for g in &els {
            let evolved = compose_heisenberg(&frame, frame.tbar(*g), &channels);
            assert!((evolved[(0, 0)] - fact[g.index()]).norm() < 1e-10);
        }
    }

    #[test]
    fn rotation_rate_is_the_string_order() {
        let (b, chain, _) = setup(7);
        for (l, axis) in [("x", Axis::X), ("y", Axis::Y), ("z", Axis::Z)] {
            let g = b.group().parse_element(l).unwrap();
            let r = rotation_rate(&b, &chain, 3, g).unwrap();
            assert!((r - nu(&chain, 3, axis).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn deviation_shrinks_with_more_gates() {
        let (b, chain, frame) = setup(50);
        let z = b.group().parse_element("z").unwrap();
        let mut pts = Vec::new();
        for n in [1, 4, 16] {
            let p = unitarity_scaling(&b, &chain, &frame, z, std::f64::consts::FRAC_PI_2, &spaced_sites(n, 2, 3), 3).unwrap();
            pts.push(p.deviation);
        }
        assert!(pts[0] > pts[1] && pts[1] > pts[2], "{pts:?}");
        let zero = unitarity_scaling(&b, &chain, &frame, z, 0.0, &spaced_sites(4, 2, 3), 3).unwrap();
        assert!(zero.deviation < 1e-15);
        assert!(unitarity_scaling(&b, &chain, &frame, z, 1.0, &[2, 3], 3).is_err());
    }

    #[test]
    fn slope_of_a_power_law() {
        let pts: Vec<(f64, f64)> = [2.0, 4.0, 8.0].iter().map(|&x: &f64| (x, 3.0 * x.powf(-1.0))).collect();
        assert!((log_log_slope(&pts) + 1.0).abs() < 1e-12);
    }
}
