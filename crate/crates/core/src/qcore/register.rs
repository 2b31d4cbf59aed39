//! Tensor-product layouts: arbitrary registers and validated spin chains.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest total dimension accepted for dense storage.
pub const MAX_DENSE_DIM: usize = 1 << 26;

/// A tensor product of sites with row-major indexing, site 0 most significant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Register {
    dims: Vec<usize>,
    strides: Vec<usize>,
    total: usize,
}

impl Register {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidLayout("a register needs at least one site".into()));
        }
        if let Some(site) = dims.iter().position(|&d| d == 0) {
            return Err(Error::InvalidLayout(format!("site {site} has dimension 0")));
        }
        let mut strides = vec![1usize; dims.len()];
        let mut total: usize = 1;
        for site in (0..dims.len()).rev() {
            strides[site] = total;
            total = total
                .checked_mul(dims[site])
                .filter(|&t| t <= MAX_DENSE_DIM)
                .ok_or_else(|| Error::InvalidLayout(format!("total dimension exceeds {MAX_DENSE_DIM}")))?;
        }
        Ok(Register { dims, strides, total })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n_sites(&self) -> usize {
        self.dims.len()
    }

    pub fn site_dim(&self, site: usize) -> usize {
        self.dims[site]
    }

    pub fn stride(&self, site: usize) -> usize {
        self.strides[site]
    }

    pub fn total_dim(&self) -> usize {
        self.total
    }

    pub fn flat_index(&self, occupations: &[usize]) -> Result<usize> {
        if occupations.len() != self.dims.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} occupations for {} sites",
                occupations.len(),
                self.dims.len()
            )));
        }
        let mut index = 0;
        for (site, (&label, &dim)) in occupations.iter().zip(&self.dims).enumerate() {
            if label >= dim {
                return Err(Error::IndexOutOfRange { site, label, dim });
            }
            index += label * self.strides[site];
        }
        Ok(index)
    }

    pub fn occupations(&self, mut index: usize) -> Vec<usize> {
        self.strides
            .iter()
            .zip(&self.dims)
            .map(|(&stride, &dim)| {
                let label = index / stride;
                index -= label * stride;
                label % dim
            })
            .collect()
    }

    /// The register of sites `from..`.
    pub fn tail(&self, from: usize) -> Result<Register> {
        if from >= self.dims.len() {
            return Err(Error::InvalidLayout(format!("no sites left after dropping {from}")));
        }
        Register::new(self.dims[from..].to_vec())
    }

    pub(crate) fn check_site(&self, site: usize, dim: usize) -> Result<()> {
        match self.dims.get(site) {
            None => Err(Error::DimensionMismatch(format!("site {site} outside a {}-site register", self.dims.len()))),
            Some(&d) if d != dim => Err(Error::DimensionMismatch(format!(
                "operator of dimension {dim} on site {site} of dimension {d}"
            ))),
            Some(_) => Ok(()),
        }
    }
}

/// Chain layout (2, d, …, d, 2): two boundary qubits around `n_bulk` sites of dimension `d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainSpec {
    register: Register,
    n_bulk: usize,
}

impl ChainSpec {
    pub fn new(n_bulk: usize, bulk_dim: usize) -> Result<Self> {
        if n_bulk == 0 {
            return Err(Error::InvalidLayout("a chain needs at least one bulk site".into()));
        }
        if bulk_dim < 2 {
            return Err(Error::InvalidLayout(format!("bulk dimension {bulk_dim} < 2")));
        }
        let mut dims = vec![2];
        dims.extend(std::iter::repeat(bulk_dim).take(n_bulk));
        dims.push(2);
        Ok(ChainSpec { register: Register::new(dims)?, n_bulk })
    }

    pub fn spin1(n_bulk: usize) -> Result<Self> {
        ChainSpec::new(n_bulk, 3)
    }

    /// Validates an arbitrary register as a chain layout.
    pub fn from_register(register: &Register) -> Result<Self> {
        let dims = register.dims();
        if dims.len() < 3 || dims[0] != 2 || dims[dims.len() - 1] != 2 {
            return Err(Error::InvalidLayout(format!("{dims:?} is not a (2, d, …, d, 2) chain")));
        }
        let bulk = dims[1];
        if dims[1..dims.len() - 1].iter().any(|&d| d != bulk) {
            return Err(Error::InvalidLayout(format!("bulk dimensions of {dims:?} differ")));
        }
        ChainSpec::new(dims.len() - 2, bulk)
    }

    pub fn register(&self) -> &Register {
        &self.register
    }

    pub fn n_bulk(&self) -> usize {
        self.n_bulk
    }

    pub fn bulk_dim(&self) -> usize {
        self.register.site_dim(1)
    }

    /// Index of the right boundary qubit, `N + 1`.
    pub fn right_site(&self) -> usize {
        self.n_bulk + 1
    }

    pub fn total_dim(&self) -> usize {
        self.register.total_dim()
    }

    pub fn flat_index(&self, occupations: &[usize]) -> Result<usize> {
        self.register.flat_index(occupations)
    }
}

pub fn flat_index(spec: &ChainSpec, occupations: &[usize]) -> Result<usize> {
    spec.flat_index(occupations)
}
