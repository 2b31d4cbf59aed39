//! Local operators, operator strings and sums of strings.

use std::collections::BTreeMap;

use super::linalg::{identity, is_identity, kron, real, CMatrix, C64, ONE, ZERO};
use super::register::Register;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LocalOperator {
    site: usize,
    matrix: CMatrix,
}

impl LocalOperator {
    pub fn new(site: usize, matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "local operator on site {site} is {}×{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(LocalOperator { site, matrix })
    }

    pub fn site(&self) -> usize {
        self.site
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// A scalar times a product of local operators on strictly increasing sites.
/// Identity factors are dropped on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorString {
    coefficient: C64,
    factors: Vec<LocalOperator>,
}

const IDENTITY_TOL: f64 = 1e-15;

impl OperatorString {
    pub fn identity() -> Self {
        OperatorString { coefficient: ONE, factors: Vec::new() }
    }

    pub fn new(factors: Vec<LocalOperator>) -> Result<Self> {
        for pair in factors.windows(2) {
            if pair[0].site >= pair[1].site {
                return Err(Error::InvalidParameter(format!(
                    "operator string sites must increase strictly ({} then {})",
                    pair[0].site, pair[1].site
                )));
            }
        }
        let factors = factors.into_iter().filter(|f| !is_identity(&f.matrix, IDENTITY_TOL)).collect();
        Ok(OperatorString { coefficient: ONE, factors })
    }

    /// Builds a string from `(site, matrix)` pairs in any order; repeated sites are
    /// multiplied in the order given (earlier pairs act last, as in a written product).
    pub fn product_of(pairs: impl IntoIterator<Item = (usize, CMatrix)>) -> Result<Self> {
        let mut by_site: BTreeMap<usize, CMatrix> = BTreeMap::new();
        for (site, m) in pairs {
            match by_site.remove(&site) {
                Some(prev) => {
                    if prev.shape() != m.shape() {
                        return Err(Error::DimensionMismatch(format!("inconsistent dimensions on site {site}")));
                    }
                    by_site.insert(site, prev * m);
                }
                None => {
                    by_site.insert(site, m);
                }
            }
        }
        let factors = by_site
            .into_iter()
            .map(|(site, m)| LocalOperator::new(site, m))
            .collect::<Result<Vec<_>>>()?;
        OperatorString::new(factors)
    }

    pub fn single(site: usize, matrix: CMatrix) -> Result<Self> {
        OperatorString::new(vec![LocalOperator::new(site, matrix)?])
    }

    pub fn scaled(mut self, factor: C64) -> Self {
        self.coefficient *= factor;
        self
    }

    pub fn coefficient(&self) -> C64 {
        self.coefficient
    }

    pub fn factors(&self) -> &[LocalOperator] {
        &self.factors
    }

    pub fn factor_at(&self, site: usize) -> Option<&LocalOperator> {
        self.factors.iter().find(|f| f.site == site)
    }

    /// `self · other`.
    pub fn times(&self, other: &OperatorString) -> Result<OperatorString> {
        let pairs = self
            .factors
            .iter()
            .chain(other.factors.iter())
            .map(|f| (f.site, f.matrix.clone()));
        Ok(OperatorString::product_of(pairs)?.scaled(self.coefficient * other.coefficient))
    }

    pub fn adjoint(&self) -> OperatorString {
        OperatorString {
            coefficient: self.coefficient.conj(),
            factors: self
                .factors
                .iter()
                .map(|f| LocalOperator { site: f.site, matrix: f.matrix.adjoint() })
                .collect(),
        }
    }

    pub fn check(&self, register: &Register) -> Result<()> {
        self.factors.iter().try_for_each(|f| register.check_site(f.site, f.dim()))
    }

    /// Full matrix on `register`; only for small registers.
    pub fn to_dense(&self, register: &Register) -> Result<CMatrix> {
        self.check(register)?;
        let mut out = identity(1);
        for site in 0..register.n_sites() {
            let local = match self.factor_at(site) {
                Some(f) => f.matrix.clone(),
                None => identity(register.site_dim(site)),
            };
            out = kron(&out, &local);
        }
        Ok(out * self.coefficient)
    }
}

/// A linear combination of operator strings.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OperatorSum {
    terms: Vec<OperatorString>,
}

impl OperatorSum {
    pub fn zero() -> Self {
        OperatorSum { terms: Vec::new() }
    }

    pub fn identity() -> Self {
        OperatorSum { terms: vec![OperatorString::identity()] }
    }

    pub fn from_string(s: OperatorString) -> Self {
        OperatorSum { terms: vec![s] }
    }

    pub fn terms(&self) -> &[OperatorString] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&mut self, other: &OperatorSum) {
        self.terms.extend(other.terms.iter().cloned());
    }

    pub fn push(&mut self, s: OperatorString) {
        self.terms.push(s);
    }

    /// `self · other`, expanded term by term.
    pub fn times(&self, other: &OperatorSum) -> Result<OperatorSum> {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(a.times(b)?);
            }
        }
        Ok(OperatorSum { terms })
    }

    pub fn scaled(&self, factor: C64) -> OperatorSum {
        OperatorSum { terms: self.terms.iter().cloned().map(|t| t.scaled(factor)).collect() }
    }

    pub fn to_dense(&self, register: &Register) -> Result<CMatrix> {
        let dim = register.total_dim();
        self.terms.iter().try_fold(CMatrix::from_element(dim, dim, ZERO), |acc, t| Ok(acc + t.to_dense(register)?))
    }
}

impl From<OperatorString> for OperatorSum {
    fn from(s: OperatorString) -> Self {
        OperatorSum::from_string(s)
    }
}

/// Convenience: `coefficient × identity`.
pub fn scalar_string(value: f64) -> OperatorString {
    OperatorString::identity().scaled(real(value))
}
