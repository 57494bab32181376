//! Disks `D_ij^kl` of normalized displacement quotients.

use crate::complex::Complex;
use crate::error::{Error, Result};
use crate::real::Real;

use super::{MarkedGrid, PointId};

/// `{d(w - z) / (2πi Δs) : w ∈ D(a_kl, 1/l), z ∈ D(a_ij, 1/j)}`, which is
/// the disk with the center and radius below.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuotientDisk {
    pub center: Complex,
    pub radius: Real,
}

impl QuotientDisk {
    /// From raw data: the two points, their steps `j, l >= 1`, first
    /// entries, and the degree.
    pub fn from_points(a_ij: Complex, a_kl: Complex, j: usize, l: usize, s_ij: i64, s_kl: i64, d: usize) -> Result<Self> {
        if j == 0 || l == 0 {
            return Err(Error::IndexError("quotient disks need j >= 1 and l >= 1"));
        }
        if s_ij == s_kl {
            return Err(Error::SameEntry);
        }
        let ds = Real::from(s_kl - s_ij);
        let dd = Real::from(d);
        let center = (a_kl - a_ij).scale(dd) / (Complex::new(Real::ZERO, Real::TAU * ds));
        let radius = dd * (Real::ONE / Real::from(j) + Real::ONE / Real::from(l)) / (Real::TAU * ds.abs());
        Ok(QuotientDisk { center, radius })
    }

    pub fn from_grid(grid: &MarkedGrid, a: PointId, b: PointId) -> Result<Self> {
        if a.1 == 0 || b.1 == 0 {
            return Err(Error::IndexError("quotient disks need j >= 1 and l >= 1"));
        }
        if !grid.same_potential(a, b) {
            return Err(Error::NotSamePotential);
        }
        Self::from_points(
            grid.position(a)?,
            grid.position(b)?,
            a.1,
            b.1,
            grid.first_entry(a),
            grid.first_entry(b),
            grid.d(),
        )
    }

    pub fn contains(&self, delta: Complex) -> bool {
        (delta - self.center).norm() < self.radius
    }

    /// Point at relative radius `r` in `[0, 1]` and angle `theta`.
    pub fn point(&self, r: Real, theta: Real) -> Complex {
        self.center + Complex::cis(theta).scale(self.radius * r)
    }
}
