//! Byproduct bookkeeping and adaptive angles.

use serde::{Deserialize, Serialize};

use crate::qcore::spin::Axis;

/// Pauli axis of the byproduct created by the site-0 outcome: σ^z for x or y
/// measurements, σ^x for a z measurement.
pub fn site0_byproduct(site0_axis: Axis) -> Axis {
    match site0_axis {
        Axis::X | Axis::Y => Axis::Z,
        Axis::Z => Axis::X,
    }
}

/// Accumulated outcome record that fixes the sign of every logical Pauli.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ByproductFrame {
    site0_axis: Axis,
    s0: u8,
    outcomes: Vec<Axis>,
    parity: [i8; 3],
}

impl ByproductFrame {
    pub fn new(site0_axis: Axis, s0: u8) -> Self {
        let b = site0_byproduct(site0_axis);
        let mut parity = [1i8; 3];
        if s0 == 1 {
            for a in Axis::ALL {
                if a != b {
                    parity[a.index()] = -1;
                }
            }
        }
        ByproductFrame { site0_axis, s0, outcomes: Vec::new(), parity }
    }

    /// Records a bulk outcome: every axis other than the outcome flips.
    pub fn record(&mut self, outcome: Axis) {
        for a in Axis::ALL {
            if a != outcome {
                self.parity[a.index()] = -self.parity[a.index()];
            }
        }
        self.outcomes.push(outcome);
    }

    /// `(−1)^{s0[α ≠ B]} Π_j (−1)^{1−δ_{α,s_j}}`.
    pub fn parity(&self, axis: Axis) -> i8 {
        self.parity[axis.index()]
    }

    /// Tilt actually used for algorithm angle `phi` about `gamma`.
    pub fn adaptive_angle(&self, phi: f64, gamma: Axis) -> f64 {
        phi * f64::from(self.parity(gamma))
    }

    pub fn s0(&self) -> u8 {
        self.s0
    }

    pub fn site0_axis(&self) -> Axis {
        self.site0_axis
    }

    pub fn outcomes(&self) -> &[Axis] {
        &self.outcomes
    }
}

/// `θ_k = φ (−1)^{s0(1−δ_{γ,z})} Π_j (−1)^{1−δ_{γ,s_j}}` for the default σ^x site-0 measurement.
pub fn adaptive_angle(phi: f64, gamma: Axis, s0: u8, prior: &[Axis]) -> f64 {
    let mut frame = ByproductFrame::new(Axis::X, s0);
    prior.iter().for_each(|&o| frame.record(o));
    frame.adaptive_angle(phi, gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn documented_examples() {
        assert_eq!(adaptive_angle(0.4, Axis::Y, 0, &[]), 0.4);
        assert_eq!(adaptive_angle(0.4, Axis::X, 1, &[]), -0.4);
        assert_eq!(adaptive_angle(0.4, Axis::Z, 1, &[]), 0.4);
        assert_eq!(adaptive_angle(0.4, Axis::Z, 0, &[Axis::X, Axis::Z, Axis::Y]), 0.4);
    }

    #[test]
    fn direct_formula_oracle() {
        let outcomes = [Axis::X, Axis::X, Axis::Y, Axis::Z];
        for gamma in Axis::ALL {
            for s0 in 0..2u8 {
                let mut exponent = if gamma != Axis::Z { u32::from(s0) } else { 0 };
                exponent += outcomes.iter().filter(|&&o| o != gamma).count() as u32;
                let expected = 0.9 * (-1f64).powi(exponent as i32);
                assert_eq!(adaptive_angle(0.9, gamma, s0, &outcomes), expected);
            }
        }
    }

    proptest! {
        #[test]
        fn non_matching_outcome_flips_sign(phi in -3.0f64..3.0, g in 0usize..3, s0 in 0u8..2,
                                           prior in proptest::collection::vec(0usize..3, 0..8)) {
            let gamma = Axis::ALL[g];
            let prior: Vec<Axis> = prior.into_iter().map(|i| Axis::ALL[i]).collect();
            let other = Axis::ALL[(g + 1) % 3];
            let mut extended = prior.clone();
            extended.push(other);
            prop_assert_eq!(adaptive_angle(phi, gamma, s0, &extended), -adaptive_angle(phi, gamma, s0, &prior));
        }
    }
}
