//! Representation bundles: the per-block operator data a symmetric resource chain needs
//! for the logical-observable calculus.
//!
//! A bundle fixes, for every element `g` of `(Z₂)^m`:
//! * `u0(g)` on the left boundary qubit and `u(g)` on every bulk block (linear representations);
//! * `vr0(g)` on the left boundary and `vl(g)` on the right boundary (projective, phase-fixed so
//!   that `v(g)² = I`);
//! * `S(g)` on every bulk block for `g` in the gate set.
//!
//! The commutation bits κ, the projective phases ω and the subgroup H are derived from the
//! matrices, never supplied.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::group::{Group, GroupElement};
use crate::error::{Error, Result};
use crate::kv;
use crate::qcore::linalg::{c, identity, op_norm, CMatrix, C64, ONE, ZERO};
use crate::qcore::spin::{pauli, spin1, Axis};
use crate::qcore::{ChainSpec, OperatorString, StateVector};
use crate::tolerances;

/// Raw per-element data; `None` entries of `u0`, `u`, `vr0`, `vl` are filled from generators,
/// `None` entries of `s` mark elements outside the gate set.
#[derive(Debug, Clone)]
pub struct BundleParts {
    pub group: Group,
    pub n_bulk: usize,
    pub bulk_dim: usize,
    pub u0: Vec<Option<CMatrix>>,
    pub u: Vec<Option<CMatrix>>,
    pub vr0: Vec<Option<CMatrix>>,
    pub vl: Vec<Option<CMatrix>>,
    pub s: Vec<Option<CMatrix>>,
}

impl BundleParts {
    pub fn empty(group: Group, n_bulk: usize, bulk_dim: usize) -> Self {
        let order = group.order();
        BundleParts {
            group,
            n_bulk,
            bulk_dim,
            u0: vec![None; order],
            u: vec![None; order],
            vr0: vec![None; order],
            vl: vec![None; order],
            s: vec![None; order],
        }
    }
}

#[derive(Debug, Clone)]
pub struct RepresentationBundle {
    group: Group,
    n_bulk: usize,
    bulk_dim: usize,
    u0: Vec<CMatrix>,
    u: Vec<CMatrix>,
    vr0: Vec<CMatrix>,
    vl: Vec<CMatrix>,
    s: Vec<Option<CMatrix>>,
    kappa: Vec<Vec<u8>>,
    omega: Vec<Vec<C64>>,
    h: Vec<GroupElement>,
}

/// Spin-1 bundle labels, in lexicographic order of the bits (x-bit, z-bit).
pub const SPIN1_LABELS: [&str; 4] = ["e", "z", "x", "y"];

fn spin1_group() -> Group {
    Group::with_labels(2, &SPIN1_LABELS).expect("four labels")
}

/// The π-rotation bundle of spin-1 chains: `u(R_α) = e^{iπS^α}`, `S(R_α) = S^α`,
/// `v(R_α) = σ^α` on both ends, `u0(R_x) = X` and `u0(R_z) = I`.
pub fn spin1_parts(n_bulk: usize) -> BundleParts {
    let group = spin1_group();
    let mut parts = BundleParts::empty(group.clone(), n_bulk, 3);
    let s1 = spin1();
    let axis_of = |label: &str| match label {
        "x" => Some(Axis::X),
        "y" => Some(Axis::Y),
        "z" => Some(Axis::Z),
        _ => None,
    };
    for g in group.elements() {
        let i = g.index();
        match axis_of(group.label(g)) {
            Some(a) => {
                parts.u[i] = Some(s1.pi_rotation(a).clone());
                parts.s[i] = Some(s1.s(a).clone());
                parts.vr0[i] = Some(pauli(a));
                parts.vl[i] = Some(pauli(a));
                parts.u0[i] = Some(if a == Axis::Z { identity(2) } else { pauli(Axis::X) });
            }
            None => {
                // The identity is a (trivial) gate element: S(e) = 0.
                parts.s[i] = Some(zero_bulk(3));
                parts.u[i] = Some(identity(3));
                parts.vr0[i] = Some(identity(2));
                parts.vl[i] = Some(identity(2));
                parts.u0[i] = Some(identity(2));
            }
        }
    }
    parts
}

pub fn spin1_bundle(n_bulk: usize) -> Result<RepresentationBundle> {
    RepresentationBundle::new(spin1_parts(n_bulk))
}

/// Divides `m` by a square root of the scalar `m²`, so the result squares to the identity.
fn phase_fix(m: &CMatrix) -> Result<CMatrix> {
    let sq = m * m;
    let scale = sq[(0, 0)];
    let residual = op_norm(&(&sq - identity(m.nrows()) * scale));
    if scale.norm() < tolerances::NORM || residual > 1e-10 {
        return Err(Error::InvalidBundle("projective element does not square to a multiple of the identity".into()));
    }
    Ok(m / scale.sqrt())
}

fn product_over_generators(group: &Group, g: GroupElement, table: &[Option<CMatrix>], dim: usize) -> Result<CMatrix> {
    let mut acc = identity(dim);
    for gen in group.generators() {
        if g.0 & gen.0 != 0 {
            let m = table[gen.index()].as_ref().ok_or_else(|| {
                Error::InvalidBundle(format!("generator '{}' has no matrix to derive '{}'", group.label(gen), group.label(g)))
            })?;
            acc *= m;
        }
    }
    Ok(acc)
}

fn fill(group: &Group, table: &[Option<CMatrix>], dim: usize, projective: bool, name: &str) -> Result<Vec<CMatrix>> {
    group
        .elements()
        .map(|g| {
            let m = match &table[g.index()] {
                Some(m) => m.clone(),
                None if g.is_identity() => identity(dim),
                None => product_over_generators(group, g, table, dim)?,
            };
            if m.shape() != (dim, dim) {
                return Err(Error::InvalidBundle(format!(
                    "{name}({}) is {}x{}, expected {dim}x{dim}",
                    group.label(g),
                    m.nrows(),
                    m.ncols()
                )));
            }
            if projective {
                phase_fix(&m)
            } else {
                Ok(m)
            }
        })
        .collect()
}

/// 0 if `a` and `b` commute, 1 if they anticommute.
fn commutation_bit(a: &CMatrix, b: &CMatrix) -> Option<u8> {
    let ab = a * b;
    let ba = b * a;
    if op_norm(&(&ab - &ba)) < tolerances::NORM {
        Some(0)
    } else if op_norm(&(&ab + &ba)) < tolerances::NORM {
        Some(1)
    } else {
        None
    }
}

impl RepresentationBundle {
    pub fn new(parts: BundleParts) -> Result<Self> {
        let BundleParts { group, n_bulk, bulk_dim, u0, u, vr0, vl, s } = parts;
        if n_bulk == 0 || bulk_dim < 2 {
            return Err(Error::InvalidBundle(format!("chain with N = {n_bulk} bulk sites of dimension {bulk_dim}")));
        }
        let order = group.order();
        for (name, t) in [("u0", &u0), ("u", &u), ("vr0", &vr0), ("vl", &vl), ("S", &s)] {
            if t.len() != order {
                return Err(Error::InvalidBundle(format!("{name} has {} entries for a group of order {order}", t.len())));
            }
        }
        let u0 = fill(&group, &u0, 2, false, "u0")?;
        let u = fill(&group, &u, bulk_dim, false, "u")?;
        let vr0 = fill(&group, &vr0, 2, true, "vr0")?;
        let vl = fill(&group, &vl, 2, true, "vl")?;
        for (g, m) in s.iter().enumerate() {
            if let Some(m) = m {
                if m.shape() != (bulk_dim, bulk_dim) {
                    return Err(Error::InvalidBundle(format!("S({}) has the wrong shape", group.labels()[g])));
                }
            }
        }
        let mut kappa = vec![vec![0u8; order]; order];
        let mut omega = vec![vec![ONE; order]; order];
        for a in group.elements() {
            for b in group.elements() {
                kappa[a.index()][b.index()] = commutation_bit(&vl[a.index()], &vl[b.index()]).ok_or_else(|| {
                    Error::InvalidBundle(format!(
                        "vl({}) and vl({}) neither commute nor anticommute",
                        group.label(a),
                        group.label(b)
                    ))
                })?;
                let prod = &vl[a.index()] * &vl[b.index()];
                // vl(ab) squares to I and is unitary, so the phase is the normalized overlap.
                omega[a.index()][b.index()] = (vl[(a * b).index()].adjoint() * prod).trace() / c(2.0, 0.0);
            }
        }
        let mut bundle = RepresentationBundle { group, n_bulk, bulk_dim, u0, u, vr0, vl, s, kappa, omega, h: Vec::new() };
        bundle.h = bundle.select_h();
        Ok(bundle)
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    /// The chain layout; fails for chains too long to hold densely.
    pub fn spec(&self) -> Result<ChainSpec> {
        ChainSpec::new(self.n_bulk, self.bulk_dim)
    }

    pub fn bulk_dim(&self) -> usize {
        self.bulk_dim
    }

    /// Rejects states that do not live on this bundle's chain.
    pub fn check_state(&self, state: &StateVector) -> Result<()> {
        let spec = state.chain_spec()?;
        if spec.n_bulk() != self.n_bulk || spec.bulk_dim() != self.bulk_dim {
            return Err(Error::DimensionMismatch(format!(
                "state has N = {} sites of dimension {}, bundle expects N = {} of dimension {}",
                spec.n_bulk(),
                spec.bulk_dim(),
                self.n_bulk,
                self.bulk_dim
            )));
        }
        Ok(())
    }

    pub fn n_bulk(&self) -> usize {
        self.n_bulk
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    pub fn elements(&self) -> Vec<GroupElement> {
        self.group.elements().collect()
    }

    pub fn label(&self, g: GroupElement) -> &str {
        self.group.label(g)
    }

    pub fn u0(&self, g: GroupElement) -> &CMatrix {
        &self.u0[g.index()]
    }

    pub fn u(&self, g: GroupElement) -> &CMatrix {
        &self.u[g.index()]
    }

    pub fn vr0(&self, g: GroupElement) -> &CMatrix {
        &self.vr0[g.index()]
    }

    pub fn vl(&self, g: GroupElement) -> &CMatrix {
        &self.vl[g.index()]
    }

    /// `S(g)`, defined for gate elements only.
    pub fn s(&self, g: GroupElement) -> Option<&CMatrix> {
        self.s[g.index()].as_ref()
    }

    pub fn gate_elements(&self) -> Vec<GroupElement> {
        self.group.elements().filter(|g| self.s[g.index()].is_some()).collect()
    }

    pub fn s_checked(&self, g: GroupElement) -> Result<&CMatrix> {
        self.s(g)
            .ok_or_else(|| Error::InvalidParameter(format!("'{}' is not a gate element of the bundle", self.label(g))))
    }

    pub fn kappa(&self, a: GroupElement, b: GroupElement) -> u8 {
        self.kappa[a.index()][b.index()]
    }

    /// `ω(a, b)` with `vl(a) vl(b) = ω(a, b) vl(ab)`; the same phase relates the logical operators.
    pub fn omega(&self, a: GroupElement, b: GroupElement) -> C64 {
        self.omega[a.index()][b.index()]
    }

    pub fn h(&self) -> &[GroupElement] {
        &self.h
    }

    pub fn in_h(&self, g: GroupElement) -> bool {
        self.h.contains(&g)
    }

    /// Pairwise-commuting subgroups (with respect to `vr0`) that are maximal under inclusion.
    pub fn maximal_commuting_subgroups(&self) -> Vec<Vec<GroupElement>> {
        let commuting: Vec<Vec<GroupElement>> = self
            .group
            .subgroups()
            .into_iter()
            .filter(|sg| {
                sg.iter().all(|&a| {
                    sg.iter().all(|&b| commutation_bit(&self.vr0[a.index()], &self.vr0[b.index()]) == Some(0))
                })
            })
            .collect();
        commuting
            .iter()
            .filter(|sg| !commuting.iter().any(|other| other.len() > sg.len() && sg.iter().all(|g| other.contains(g))))
            .cloned()
            .collect()
    }

    /// `max_h ‖u0(h) − vr0(h)‖` over a candidate subgroup.
    pub fn h_spec_residual_for(&self, sg: &[GroupElement]) -> f64 {
        sg.iter().map(|&h| op_norm(&(&self.u0[h.index()] - &self.vr0[h.index()]))).fold(0.0, f64::max)
    }

    pub fn h_spec_residual(&self) -> f64 {
        self.h_spec_residual_for(&self.h)
    }

    /// The maximal commuting subgroup on which `u0` and `vr0` agree; when none does, the first
    /// maximal one (the violation then shows up in the verification report).
    fn select_h(&self) -> Vec<GroupElement> {
        let candidates = self.maximal_commuting_subgroups();
        candidates
            .iter()
            .find(|sg| self.h_spec_residual_for(sg) < tolerances::NORM)
            .or_else(|| candidates.first())
            .cloned()
            .unwrap_or_else(|| vec![GroupElement::IDENTITY])
    }

    /// `U(g) = vr0(g) ⊗ u(g)^{⊗N} ⊗ vl(g)`.
    pub fn symmetry(&self, g: GroupElement) -> OperatorString {
        let n = self.n_bulk();
        let mut pairs = vec![(0, self.vr0[g.index()].clone())];
        pairs.extend((1..=n).map(|j| (j, self.u[g.index()].clone())));
        pairs.push((n + 1, self.vl[g.index()].clone()));
        OperatorString::product_of(pairs).expect("increasing sites")
    }

    /// Every stored operator, tagged for reports.
    pub fn named_operators(&self) -> Vec<(String, &CMatrix)> {
        let mut out = Vec::new();
        for g in self.group.elements() {
            let l = self.label(g);
            out.push((format!("u0({l})"), &self.u0[g.index()]));
            out.push((format!("u({l})"), &self.u[g.index()]));
            out.push((format!("vr0({l})"), &self.vr0[g.index()]));
            out.push((format!("vl({l})"), &self.vl[g.index()]));
            if let Some(s) = &self.s[g.index()] {
                out.push((format!("S({l})"), s));
            }
        }
        out
    }

    pub fn hermiticity_residual(&self) -> (f64, String) {
        self.named_operators()
            .into_iter()
            .map(|(name, m)| (op_norm(&(m - m.adjoint())), name))
            .fold((0.0, String::new()), |best, cur| if cur.0 > best.0 { cur } else { best })
    }

    /// `max ‖u(a)u(b) − u(ab)‖` over both linear representations.
    pub fn linear_representation_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in self.group.elements() {
            for b in self.group.elements() {
                let ab = (a * b).index();
                worst = worst.max(op_norm(&(&self.u0[a.index()] * &self.u0[b.index()] - &self.u0[ab])));
                worst = worst.max(op_norm(&(&self.u[a.index()] * &self.u[b.index()] - &self.u[ab])));
            }
        }
        worst
    }

    /// `max ‖vr0(a)vr0(b) − (−1)^κ(a,b) vr0(b)vr0(a)‖` with κ taken from `vl`.
    pub fn kappa_consistency_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in self.group.elements() {
            for b in self.group.elements() {
                let sign = if self.kappa(a, b) == 1 { -1.0 } else { 1.0 };
                let (va, vb) = (&self.vr0[a.index()], &self.vr0[b.index()]);
                worst = worst.max(op_norm(&(va * vb - vb * va * c(sign, 0.0))));
            }
        }
        worst
    }

    /// `max ‖u(g) S(g′) u(g)⁻¹ − (−1)^κ(g,g′) S(g′)‖` over gate elements `g′`.
    pub fn s_covariance_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for gp in self.gate_elements() {
            let s = self.s[gp.index()].as_ref().expect("gate element");
            for g in self.group.elements() {
                let u = &self.u[g.index()];
                let inv = u.clone().try_inverse().unwrap_or_else(|| u.adjoint());
                let sign = if self.kappa(g, gp) == 1 { -1.0 } else { 1.0 };
                worst = worst.max(op_norm(&(u * s * inv - s * c(sign, 0.0))));
            }
        }
        worst
    }

    /// `max ‖v(g)² − I‖` over both projective representations (zero after phase fixing).
    pub fn projective_square_residual(&self) -> f64 {
        self.vr0
            .iter()
            .chain(self.vl.iter())
            .map(|v| op_norm(&(v * v - identity(2))))
            .fold(0.0, f64::max)
    }

    /// χ(g) and `‖U(g)|Ψ> − (−1)^χ |Ψ>‖` for every element.
    pub fn symmetry_signs(&self, state: &StateVector) -> Result<Vec<SymmetrySign>> {
        self.check_state(state)?;
        self.group
            .elements()
            .map(|g| {
                let moved = state.apply_string(&self.symmetry(g))?;
                let ev = state.inner(&moved)?;
                let chi = u8::from(ev.re < 0.0);
                let sign = if chi == 1 { -1.0 } else { 1.0 };
                let residual = moved
                    .amplitudes()
                    .iter()
                    .zip(state.amplitudes())
                    .map(|(m, s)| (m - s * sign).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                Ok(SymmetrySign { element: g, chi, residual })
            })
            .collect()
    }

    pub fn describe(&self) -> BundleSummary {
        BundleSummary {
            rank: self.group.rank(),
            order: self.order(),
            element_order: self.group.labels().to_vec(),
            n_bulk: self.n_bulk(),
            bulk_dim: self.bulk_dim,
            gate_elements: self.gate_elements().iter().map(|&g| self.label(g).to_string()).collect(),
            h: self.h.iter().map(|&g| self.label(g).to_string()).collect(),
        }
    }

    /// Parses a bundle file; see [`parse_bundle`].
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        parse_bundle(&path.display().to_string(), &text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetrySign {
    pub element: GroupElement,
    pub chi: u8,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleSummary {
    pub rank: usize,
    pub order: usize,
    pub element_order: Vec<String>,
    pub n_bulk: usize,
    pub bulk_dim: usize,
    pub gate_elements: Vec<String>,
    pub h: Vec<String>,
}

/// Reads `1,0; 0,1` or `0:1, 1:0 ; ...` (rows split by `;`, entries by `,` or spaces,
/// each entry `re` or `re:im`).
pub fn parse_matrix(text: &str) -> std::result::Result<CMatrix, String> {
    let rows: Vec<Vec<C64>> = text
        .split(';')
        .map(|row| {
            row.split(|ch: char| ch == ',' || ch.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| {
                    let (re, im) = t.split_once(':').unwrap_or((t, "0"));
                    let re: f64 = re.parse().map_err(|_| format!("bad number '{re}'"))?;
                    let im: f64 = im.parse().map_err(|_| format!("bad number '{im}'"))?;
                    Ok(c(re, im))
                })
                .collect::<std::result::Result<Vec<_>, String>>()
        })
        .collect::<std::result::Result<_, _>>()?;
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(format!("expected a square matrix, found {n} rows of lengths {:?}", rows.iter().map(Vec::len).collect::<Vec<_>>()));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// Bundle description file.
///
/// ```text
/// builtin = spin1      # optional; only `n` may accompany it
/// n = 4
/// m = 2
/// bulk_dim = 3
/// labels = e z x y     # optional display names in lexicographic order
/// u0.x = 0,1; 1,0      # keys: u0 | u | vr0 | vl | s, then an element label or bit string
/// s.z = 1,0,0; 0,0,0; 0,0,-1
/// ```
/// Missing `u0`, `u`, `vr0`, `vl` entries are products over generators; `s` entries mark the
/// gate set.
pub fn parse_bundle(source: &str, text: &str) -> Result<RepresentationBundle> {
    let entries = kv::parse(source, text)?;
    let get = |key: &str| entries.iter().find(|e| e.key == key);
    let n_entry = get("n").ok_or_else(|| Error::parse(source, 0, "missing 'n' (bulk length)"))?;
    let n_bulk: usize = kv::parse_value(source, n_entry)?;
    if let Some(b) = get("builtin") {
        if b.value != "spin1" {
            return Err(Error::parse(source, b.line, format!("unknown builtin bundle '{}'", b.value)));
        }
        if let Some(extra) = entries.iter().find(|e| e.key != "builtin" && e.key != "n") {
            return Err(Error::parse(source, extra.line, format!("'{}' cannot be combined with a builtin bundle", extra.key)));
        }
        return spin1_bundle(n_bulk);
    }
    let m_entry = get("m").ok_or_else(|| Error::parse(source, 0, "missing 'm' (group rank)"))?;
    let rank: usize = kv::parse_value(source, m_entry)?;
    let bulk_dim: usize = match get("bulk_dim") {
        Some(e) => kv::parse_value(source, e)?,
        None => 3,
    };
    let group = match get("labels") {
        Some(e) => {
            let labels: Vec<&str> = e.value.split_whitespace().collect();
            Group::with_labels(rank, &labels).map_err(|err| Error::parse(source, e.line, err.to_string()))?
        }
        None => Group::new(rank).map_err(|err| Error::parse(source, m_entry.line, err.to_string()))?,
    };
    let mut parts = BundleParts::empty(group.clone(), n_bulk, bulk_dim);
    for e in &entries {
        if matches!(e.key.as_str(), "n" | "m" | "bulk_dim" | "labels") {
            continue;
        }
        let (kind, label) = e
            .key
            .split_once('.')
            .ok_or_else(|| Error::parse(source, e.line, format!("unknown key '{}'", e.key)))?;
        let g = group.parse_element(label).map_err(|err| Error::parse(source, e.line, err.to_string()))?;
        let m = parse_matrix(&e.value).map_err(|msg| Error::parse(source, e.line, msg))?;
        let slot = match kind {
            "u0" => &mut parts.u0,
            "u" => &mut parts.u,
            "vr0" => &mut parts.vr0,
            "vl" => &mut parts.vl,
            "s" => &mut parts.s,
            other => return Err(Error::parse(source, e.line, format!("unknown operator kind '{other}'"))),
        };
        slot[g.index()] = Some(m);
    }
    RepresentationBundle::new(parts).map_err(|err| match err {
        Error::InvalidBundle(msg) => Error::parse(source, 0, msg),
        other => other,
    })
}

/// A zero matrix of the bulk dimension, handy for building counterexamples.
pub fn zero_bulk(bulk_dim: usize) -> CMatrix {
    CMatrix::from_element(bulk_dim, bulk_dim, ZERO)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::build_aklt_prime;

    fn el(b: &RepresentationBundle, label: &str) -> GroupElement {
        b.group().parse_element(label).unwrap()
    }

    #[test]
    fn spin1_bundle_structure() {
        let b = spin1_bundle(3).unwrap();
        let (x, z, y, e) = (el(&b, "x"), el(&b, "z"), el(&b, "y"), el(&b, "e"));
        assert_eq!(b.kappa(x, z), 1);
        assert_eq!(b.kappa(x, x), 0);
        assert_eq!(b.kappa(e, y), 0);
        assert_eq!(b.h(), &[e, x]);
        assert!(b.h_spec_residual() < 1e-15);
        assert!(b.hermiticity_residual().0 < 1e-12);
        assert!(b.linear_representation_residual() < 1e-12);
        assert!(b.kappa_consistency_residual() < 1e-12);
        assert!(b.s_covariance_residual() < 1e-12);
        // σ^x σ^z = −iσ^y.
        assert!((b.omega(x, z) - c(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn maximal_commuting_subgroups_of_pauli_pairs() {
        let b = spin1_bundle(2).unwrap();
        let subs = b.maximal_commuting_subgroups();
        assert_eq!(subs.len(), 3);
        // Only {e, x} has u0 = vr0.
        let ok: Vec<_> = subs.iter().filter(|s| b.h_spec_residual_for(s) < 1e-12).collect();
        assert_eq!(ok.len(), 1);
    }

    #[test]
    fn symmetry_signs_at_the_aklt_point() {
        let b = spin1_bundle(4).unwrap();
        let psi = build_aklt_prime(4).unwrap();
        let signs = b.symmetry_signs(&psi).unwrap();
        let chis: Vec<u8> = signs.iter().map(|s| s.chi).collect();
        assert_eq!(chis, vec![0, 1, 1, 1]);
        assert!(signs.iter().all(|s| s.residual < 1e-10));
    }

    #[test]
    fn derived_elements_are_phase_fixed() {
        let mut parts = spin1_parts(2);
        let y = 3;
        parts.vl[y] = None;
        parts.u[y] = None;
        let b = RepresentationBundle::new(parts).unwrap();
        let yel = GroupElement(3);
        let yy = b.vl(yel);
        assert!(op_norm(&(yy * yy - identity(2))) < 1e-14);
        assert!(op_norm(&(yy - yy.adjoint())) < 1e-14);
        assert!(op_norm(&(b.u(yel) - spin1().pi_rotation(Axis::Y))) < 1e-12);
    }

    #[test]
    fn file_round_trip_for_builtin_and_explicit() {
        let b = parse_bundle("b", "builtin = spin1\nn = 3\n").unwrap();
        assert_eq!(b.n_bulk(), 3);
        let text = "\
n = 2
m = 2
labels = e z x y
u0.x = 0,1; 1,0
u0.z = 1,0; 0,1
u.x = -1,0,0; 0,1,0; 0,0,-1
u.z = -1,0,0; 0,-1,0; 0,0,1
vr0.x = 0,1; 1,0
vr0.z = 1,0; 0,-1
vl.x = 0,1; 1,0
vl.z = 1,0; 0,-1
s.z = 1,0,0; 0,0,0; 0,0,-1
";
        let b = parse_bundle("explicit", text).unwrap();
        assert_eq!(b.gate_elements(), vec![GroupElement(1)]);
        assert_eq!(b.h(), &[GroupElement(0), GroupElement(2)]);
        // The y element of vl is derived and Hermitian.
        assert!(op_norm(&(b.vl(GroupElement(3)) - pauli(Axis::Y))).min(op_norm(&(b.vl(GroupElement(3)) + pauli(Axis::Y)))) < 1e-14);
    }

    #[test]
    fn file_errors_carry_lines() {
        let err = parse_bundle("bad", "n = 2\nm = 2\nvl.x = 0,1; 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
        let err = parse_bundle("bad", "n = 2\nm = 2\nq.x = 1,0;0,1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
        let err = parse_bundle("bad", "n = 2\nm = 1\nvl.1 = 1,0; 0,1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 0, .. }), "{err:?}");
        let err = parse_bundle("bad", "builtin = spin1\nn = 2\nm = 2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn matrix_text_with_imaginary_parts() {
        let m = parse_matrix("0, 0:-1; 0:1, 0").unwrap();
        assert!(op_norm(&(m - pauli(Axis::Y))) < 1e-15);
        assert!(parse_matrix("1,2;3").is_err());
    }
}
