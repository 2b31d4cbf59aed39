//! Elementary abelian 2-groups `(Z₂)^m` as bit-vectors.
//!
//! Elements are stored as integers whose binary digits, most significant first, are the
//! bit-vector; integer order is therefore lexicographic order on bit-vectors, and it is the
//! row order of every group-indexed table in this crate.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported rank; subgroup enumeration is exhaustive.
pub const MAX_RANK: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement(pub u8);

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_identity(self) -> bool {
        self.0 == 0
    }

    /// Group law.
    pub fn mul(self, other: GroupElement) -> GroupElement {
        GroupElement(self.0 ^ other.0)
    }

    pub fn bits(self, rank: usize) -> String {
        (0..rank).rev().map(|b| if self.0 >> b & 1 == 1 { '1' } else { '0' }).collect()
    }
}

impl std::ops::Mul for GroupElement {
    type Output = GroupElement;
    fn mul(self, rhs: GroupElement) -> GroupElement {
        GroupElement::mul(self, rhs)
    }
}

/// The group itself plus display names for its elements.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Group {
    rank: usize,
    labels: Vec<String>,
}

impl Group {
    pub fn new(rank: usize) -> Result<Self> {
        if rank == 0 || rank > MAX_RANK {
            return Err(Error::Unsupported(format!("group rank {rank} (supported 1..={MAX_RANK})")));
        }
        let labels = (0..1u8 << rank).map(|i| GroupElement(i).bits(rank)).collect();
        Ok(Group { rank, labels })
    }

    pub fn with_labels(rank: usize, labels: &[&str]) -> Result<Self> {
        let mut g = Group::new(rank)?;
        if labels.len() != g.order() {
            return Err(Error::InvalidParameter(format!("{} labels for a group of order {}", labels.len(), g.order())));
        }
        g.labels = labels.iter().map(|s| s.to_string()).collect();
        Ok(g)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn order(&self) -> usize {
        1 << self.rank
    }

    /// All elements in lexicographic order.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> {
        (0..self.order() as u8).map(GroupElement)
    }

    /// Elements with a single set bit.
    pub fn generators(&self) -> impl Iterator<Item = GroupElement> {
        (0..self.rank).rev().map(|b| GroupElement(1 << b))
    }

    pub fn label(&self, g: GroupElement) -> &str {
        &self.labels[g.index()]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Accepts a display label or a bit string of length `rank`.
    pub fn parse_element(&self, text: &str) -> Result<GroupElement> {
        if let Some(i) = self.labels.iter().position(|l| l == text) {
            return Ok(GroupElement(i as u8));
        }
        if text.len() == self.rank && text.chars().all(|c| c == '0' || c == '1') {
            return Ok(GroupElement(u8::from_str_radix(text, 2).expect("binary digits")));
        }
        Err(Error::InvalidParameter(format!("unknown group element '{text}'")))
    }

    pub fn contains(&self, g: GroupElement) -> bool {
        g.index() < self.order()
    }

    /// Every subgroup as a sorted element list.
    pub fn subgroups(&self) -> Vec<Vec<GroupElement>> {
        let order = self.order();
        let mut out = Vec::new();
        // Brute force over element subsets; at most 2^16 masks for the largest rank.
        for mask in 0u32..(1u32 << order) {
            if mask & 1 == 0 {
                continue;
            }
            let members: Vec<u8> = (0..order as u8).filter(|&i| mask >> i & 1 == 1).collect();
            let closed = members.iter().all(|&a| members.iter().all(|&b| mask >> (a ^ b) & 1 == 1));
            if closed {
                out.push(members.into_iter().map(GroupElement).collect());
            }
        }
        out
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}
