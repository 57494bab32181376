//! Escape data for the singular values: one address and one potential each.

use alloc::vec::Vec;

use crate::addresses::ExternalAddress;
use crate::error::{Error, Result};
use crate::real::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct EscapeSpec {
    pub d: usize,
    pub addresses: Vec<ExternalAddress>,
    pub potentials: Vec<Real>,
    overlap_allowed: bool,
}

impl EscapeSpec {
    /// Validated spec: equal lengths, `T_i > 0`, pairwise non-overlapping
    /// addresses.
    pub fn new(d: usize, addresses: Vec<ExternalAddress>, potentials: Vec<Real>) -> Result<Self> {
        let spec = Self::new_allowing_overlap(d, addresses, potentials)?;
        for i in 0..spec.addresses.len() {
            for k in i + 1..spec.addresses.len() {
                if spec.addresses[i].overlapping(&spec.addresses[k]) {
                    return Err(Error::OverlapError(i, k));
                }
            }
        }
        Ok(EscapeSpec { overlap_allowed: false, ..spec })
    }

    /// As [`EscapeSpec::new`] but accepting overlapping orbits. Such specs
    /// are fine for grid and cluster experiments; the solver rejects them.
    pub fn new_allowing_overlap(d: usize, addresses: Vec<ExternalAddress>, potentials: Vec<Real>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidDegree(d));
        }
        if addresses.is_empty() {
            return Err(Error::InvalidSpec("at least one address is required"));
        }
        if addresses.len() != potentials.len() {
            return Err(Error::InvalidSpec("address and potential counts differ"));
        }
        if potentials.iter().any(|t| !(*t > Real::ZERO) || !t.is_finite()) {
            return Err(Error::InvalidSpec("potentials must be finite and positive"));
        }
        Ok(EscapeSpec { d, addresses, potentials, overlap_allowed: true })
    }

    pub fn from_f64(d: usize, addresses: Vec<ExternalAddress>, potentials: &[f64]) -> Result<Self> {
        Self::new(d, addresses, potentials.iter().map(|&t| Real::from(t)).collect())
    }

    pub fn m(&self) -> usize {
        self.addresses.len()
    }

    pub fn overlap_allowed(&self) -> bool {
        self.overlap_allowed
    }

    /// First overlapping pair, if any.
    pub fn first_overlap(&self) -> Option<(usize, usize)> {
        let n = self.addresses.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |k| (i, k)))
            .find(|&(i, k)| self.addresses[i].overlapping(&self.addresses[k]))
    }

    /// Same addresses with new potentials.
    pub fn with_potentials(&self, potentials: Vec<Real>) -> Result<Self> {
        if self.overlap_allowed {
            Self::new_allowing_overlap(self.d, self.addresses.clone(), potentials)
        } else {
            Self::new(self.d, self.addresses.clone(), potentials)
        }
    }

    /// Same potentials with new addresses.
    pub fn with_addresses(&self, addresses: Vec<ExternalAddress>) -> Result<Self> {
        if self.overlap_allowed {
            Self::new_allowing_overlap(self.d, addresses, self.potentials.clone())
        } else {
            Self::new(self.d, addresses, self.potentials.clone())
        }
    }
}
