//! String order parameters, the bulk-to-end renormalization factor ν, and the closed-form
//! single-rotation readouts they control.
//!
//! Conventions, with `Π(a..=b)` the product of `e^{iπS^α_m}` over bulk sites `a..=b`:
//! * bulk-bulk: `<S_i^α Π(i+1..=j−1) S_j^α>`
//! * bulk-end: `<S_i^α Π(i+1..=N) σ^α_{N+1}>`
//! * ν_α(k): `<S_k^α Π(k..=N) σ^α_{N+1}>`, which for spin 1 is minus the bulk-end value at `i = k`.

use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::linalg::{cos_hermitian, sin_hermitian, CMatrix, C64, ZERO};
use crate::qcore::spin::{pauli, spin1, Axis};
use crate::qcore::{OperatorString, Register};
use crate::states::ExpectationSource;
use crate::tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StringKind {
    BulkBulk,
    BulkEnd,
    Nu,
}

impl StringKind {
    pub fn label(self) -> &'static str {
        match self {
            StringKind::BulkBulk => "bulk-bulk",
            StringKind::BulkEnd => "bulk-end",
            StringKind::Nu => "nu",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StringOrderResult {
    pub kind: StringKind,
    pub axis: Axis,
    pub i: usize,
    /// Right end; `N + 1` for the boundary-ending strings.
    pub j: usize,
    pub value: f64,
}

fn real_part(raw: C64, what: &str) -> Result<f64> {
    if raw.im.abs() > tolerances::PHYSICS {
        return Err(Error::Precondition(format!("{what} has imaginary part {:.3e}", raw.im)));
    }
    Ok(raw.re)
}

fn check_bulk_site<S: ExpectationSource + ?Sized>(src: &S, site: usize) -> Result<usize> {
    let n = src.n_bulk();
    if site == 0 || site > n {
        return Err(Error::IndexOutOfRange { site, label: site, dim: n + 1 });
    }
    Ok(n)
}

/// `Π_{m ∈ range} e^{iπS_m^α}` as `(site, matrix)` pairs.
fn rotation_string(axis: Axis, sites: std::ops::RangeInclusive<usize>) -> impl Iterator<Item = (usize, CMatrix)> {
    let rot = spin1().pi_rotation(axis).clone();
    sites.map(move |m| (m, rot.clone()))
}

pub fn string_order_bulk<S: ExpectationSource + ?Sized>(src: &S, i: usize, j: usize, axis: Axis) -> Result<StringOrderResult> {
    check_bulk_site(src, i)?;
    check_bulk_site(src, j)?;
    if i >= j {
        return Err(Error::InvalidParameter(format!("bulk string needs i < j, got {i} and {j}")));
    }
    let s = spin1().s(axis).clone();
    let mut pairs = vec![(i, s.clone())];
    pairs.extend(rotation_string(axis, i + 1..=j - 1));
    pairs.push((j, s));
    let raw = src.expectation(&OperatorString::product_of(pairs)?)?;
    Ok(StringOrderResult { kind: StringKind::BulkBulk, axis, i, j, value: real_part(raw, "string order")? })
}

pub fn string_order_bulk_end<S: ExpectationSource + ?Sized>(src: &S, i: usize, axis: Axis) -> Result<StringOrderResult> {
    let n = check_bulk_site(src, i)?;
    let mut pairs = vec![(i, spin1().s(axis).clone())];
    pairs.extend(rotation_string(axis, i + 1..=n));
    pairs.push((n + 1, pauli(axis)));
    let raw = src.expectation(&OperatorString::product_of(pairs)?)?;
    Ok(StringOrderResult { kind: StringKind::BulkEnd, axis, i, j: n + 1, value: real_part(raw, "string order")? })
}

/// The renormalization factor of a small rotation about `axis` at bulk site `k`.
pub fn nu<S: ExpectationSource + ?Sized>(src: &S, k: usize, axis: Axis) -> Result<f64> {
    let n = check_bulk_site(src, k)?;
    let mut pairs = vec![(k, spin1().s(axis).clone())];
    pairs.extend(rotation_string(axis, k..=n));
    pairs.push((n + 1, pauli(axis)));
    real_part(src.expectation(&OperatorString::product_of(pairs)?)?, "nu")
}

pub fn nu_result<S: ExpectationSource + ?Sized>(src: &S, k: usize, axis: Axis) -> Result<StringOrderResult> {
    let value = nu(src, k, axis)?;
    Ok(StringOrderResult { kind: StringKind::Nu, axis, i: k, j: src.n_bulk() + 1, value })
}

/// Path-averaged readouts `(<<σ^x>>, <<σ^y>>, <<σ^z>>)` after one z-rotation by `phi` at site `k`:
/// `(<cos(S_k^z φ)>, <sin(S_k^z φ) Π(k..=N) σ^z_{N+1}>, 0)`.
pub fn single_rotation_readout<S: ExpectationSource + ?Sized>(src: &S, k: usize, phi: f64) -> Result<[f64; 3]> {
    let n = check_bulk_site(src, k)?;
    let sz = spin1().s(Axis::Z).clone();
    let x = src.expectation(&OperatorString::single(k, cos_hermitian(&sz, phi))?)?;
    // Same-site factors multiply in the order given: sin(S^z φ) · e^{iπS^z}.
    let mut pairs = vec![(k, sin_hermitian(&sz, phi))];
    pairs.extend(rotation_string(Axis::Z, k..=n));
    pairs.push((n + 1, pauli(Axis::Z)));
    let y = src.expectation(&OperatorString::product_of(pairs)?)?;
    Ok([real_part(x, "x readout")?, real_part(y, "y readout")?, 0.0])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmallAngleRow {
    pub phi: f64,
    pub y_hat: f64,
    /// `ŷ/φ`.
    pub effective_factor: f64,
    pub nu: f64,
    /// `ŷ/(φ ν)`; `None` when ν vanishes within the physics tolerance.
    pub ratio: Option<f64>,
}

impl SmallAngleRow {
    pub fn deviation(&self) -> f64 {
        (self.effective_factor - self.nu).abs()
    }
}

/// Convergence of the effective rotation angle `ŷ` towards `ν_z φ` as φ shrinks.
pub fn small_angle_report<S: ExpectationSource + ?Sized>(src: &S, k: usize, phis: &[f64]) -> Result<Vec<SmallAngleRow>> {
    let nu_z = nu(src, k, Axis::Z)?;
    phis.iter()
        .map(|&phi| {
            if phi == 0.0 || !phi.is_finite() {
                return Err(Error::InvalidParameter(format!("small-angle table needs a nonzero finite angle, got {phi}")));
            }
            let y_hat = single_rotation_readout(src, k, phi)?[1];
            let effective_factor = y_hat / phi;
            let ratio = (nu_z.abs() > tolerances::PHYSICS).then(|| effective_factor / nu_z);
            Ok(SmallAngleRow { phi, y_hat, effective_factor, nu: nu_z, ratio })
        })
        .collect()
}

/// `(Π(k..=N) e^{iπS^z}) σ^z_{N+1}`: the z readout string, odd under the x symmetry.
pub fn z_readout_string(n_bulk: usize, k: usize) -> Result<OperatorString> {
    let mut pairs: Vec<(usize, CMatrix)> = rotation_string(Axis::Z, k..=n_bulk).collect();
    pairs.push((n_bulk + 1, pauli(Axis::Z)));
    OperatorString::product_of(pairs)
}

/// Largest `‖(AB + BA)v‖` over `samples` random unit vectors `v`.
pub fn anticommutator_residual(
    register: &Register,
    a: &OperatorString,
    b: &OperatorString,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let mut rng = crate::rng::stream(seed, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let amps: Vec<C64> =
            (0..register.total_dim()).map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
        let v = crate::qcore::StateVector::normalized(register.clone(), amps)?;
        let ab = v.apply_string(b)?.apply_string(a)?;
        let ba = v.apply_string(a)?.apply_string(b)?;
        let r = ab.amplitudes().iter().zip(ba.amplitudes()).fold(ZERO, |acc, (x, y)| acc + (x + y) * (x + y).conj());
        worst = worst.max(r.re.sqrt());
    }
    Ok(worst)
}

/// One row of the sweep table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StringOrderRow {
    pub theta: f64,
    pub d_x: f64,
    pub d_z: f64,
    pub n_bulk: usize,
    pub result: StringOrderResult,
}

pub const CSV_HEADER: &str = "theta,D_x,D_z,N,i,j,axis,kind,value";

/// Round-trip-safe float text with 17 significant digits.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

impl StringOrderRow {
    pub fn to_csv(&self) -> String {
        let r = &self.result;
        let mut line = String::new();
        let _ = write!(
            line,
            "{},{},{},{},{},{},{},{},{}",
            format_f64(self.theta),
            format_f64(self.d_x),
            format_f64(self.d_z),
            self.n_bulk,
            r.i,
            r.j,
            r.axis,
            r.kind.label(),
            format_f64(r.value)
        );
        line
    }
}

pub fn to_csv(rows: &[StringOrderRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv());
        out.push('\n');
    }
    out
}

/// The standard set of string orders for one state: bulk-bulk at `(2, N−1)` when `N ≥ 4`,
/// bulk-end at `i = 2` (or 1 for the shortest chains) and ν at `k`, for every axis.
pub fn standard_string_orders<S: ExpectationSource + ?Sized>(src: &S, k: usize) -> Result<Vec<StringOrderResult>> {
    let n = src.n_bulk();
    let mut out = Vec::new();
    for axis in Axis::ALL {
        if n >= 4 {
            out.push(string_order_bulk(src, 2, n - 1, axis)?);
        }
        out.push(string_order_bulk_end(src, if n >= 2 { 2 } else { 1 }, axis)?);
        out.push(nu_result(src, k, axis)?);
    }
    Ok(out)
}
