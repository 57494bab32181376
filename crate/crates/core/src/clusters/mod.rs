//! The marked grid `a_ij` of post-singular points, its clusters, and the
//! forward/backward separation indices of cluster pairs.
//!
//! Indices are 0-based throughout: orbit `i` in `0..m`, step `j` in `0..`.

mod quotient;
mod sector;

pub use quotient::QuotientDisk;
pub use sector::{sector_product_law, ProductLawReport, SectorSet};

use alloc::vec::Vec;

use crate::addresses::{lcm, GrowthFn};
use crate::complex::Complex;
use crate::entiremap::EntireMap;
use crate::error::{Error, Result};
use crate::escape::EscapeSpec;
use crate::rays::{asymptotic_center, asymptotic_residual, ray_point, RayConfig};
use crate::real::Real;

/// Relative tolerance for identifying two potentials.
pub const EPS_POT: f64 = 1e-9;

pub type PointId = (usize, usize);

#[derive(Clone, Debug)]
pub struct GridConfig {
    pub ray: RayConfig,
    pub eps_pot: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { ray: RayConfig::default(), eps_pot: EPS_POT }
    }
}

#[derive(Clone, Debug)]
pub struct MarkedGrid {
    pub spec: EscapeSpec,
    /// Requested depth `J`.
    pub depth: usize,
    /// `potentials[i][j] = F^j(T_i)` for every representable `j <= J`.
    pub potentials: Vec<Vec<Real>>,
    /// Positions `a_ij`, one per representable potential.
    pub positions: Vec<Vec<Complex>>,
    /// Normalized asymptotic residuals of the ray points, when the grid was
    /// built from rays.
    pub residuals: Option<Vec<Vec<f64>>>,
    /// Sorted distinct potentials.
    pub potential_set: Vec<Real>,
    pub rho_index: usize,
    pub rho: Real,
    /// Largest `j` with `a_i0, ..., a_ij` all inside `D_rho`, or -1.
    pub n_inside: Vec<i64>,
    pub eps_pot: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cluster {
    pub potential: Real,
    pub entry: i64,
    pub members: Vec<PointId>,
}

impl Cluster {
    pub fn is_nontrivial(&self) -> bool {
        self.members.len() > 1
    }

    pub fn representative(&self) -> PointId {
        self.members[0]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    /// Ordered by representative `(i, j)`.
    pub clusters: Vec<Cluster>,
    /// `label[i][j]` indexes `clusters`.
    pub label: Vec<Vec<usize>>,
}

impl Partition {
    pub fn cluster_of(&self, p: PointId) -> Option<usize> {
        self.label.get(p.0).and_then(|row| row.get(p.1)).copied()
    }

    /// All unordered same-cluster pairs, in index order.
    pub fn pairs(&self) -> Vec<(PointId, PointId)> {
        let mut out = Vec::new();
        for c in &self.clusters {
            for (a, p) in c.members.iter().enumerate() {
                for q in &c.members[a + 1..] {
                    out.push((*p, *q));
                }
            }
        }
        out
    }
}

/// One row of a grid dump.
#[derive(Clone, Debug, PartialEq)]
pub struct GridPoint {
    pub i: usize,
    pub j: usize,
    pub t: Real,
    pub s_first: i64,
    pub position: Complex,
    pub cluster: usize,
}

fn potential_orbit(f: &GrowthFn, t: Real, depth: usize) -> Vec<Real> {
    let mut out = alloc::vec![t];
    while out.len() <= depth {
        match f.apply(*out.last().unwrap()) {
            Ok(v) => out.push(v),
            Err(_) => break,
        }
    }
    out
}

fn rel_close(a: Real, b: Real, eps: f64) -> bool {
    let scale = a.abs().max(b.abs());
    (a - b).abs() <= scale * Real::from(eps)
}

impl MarkedGrid {
    /// Grid of ray points `a_ij = R_{σ^j s_i}(F^j(T_i))` for `j <= J`
    /// (as far as `F^j` stays representable).
    pub fn build(g: &EntireMap, spec: &EscapeSpec, depth: usize, rho_index: usize, cfg: &GridConfig) -> Result<Self> {
        if g.degree() != spec.d {
            return Err(Error::InvalidSpec("map degree differs from spec degree"));
        }
        if !spec.overlap_allowed() {
            if let Some((i, k)) = spec.first_overlap() {
                return Err(Error::OverlapError(i, k));
            }
        }
        let f = GrowthFn::new(spec.d)?;
        let mut positions = Vec::with_capacity(spec.m());
        let mut residuals = Vec::with_capacity(spec.m());
        for (s, &t) in spec.addresses.iter().zip(spec.potentials.iter()) {
            let orbit = potential_orbit(&f, t, depth);
            let mut row = Vec::with_capacity(orbit.len());
            let mut res = Vec::with_capacity(orbit.len());
            for (j, &tj) in orbit.iter().enumerate() {
                let sample = ray_point(g, &s.shift_by(j), tj, &cfg.ray)?;
                res.push(asymptotic_residual(&sample));
                row.push(sample.position);
            }
            positions.push(row);
            residuals.push(res);
        }
        let mut grid = Self::from_positions(spec, depth, positions, rho_index, cfg.eps_pot)?;
        grid.residuals = Some(residuals);
        Ok(grid)
    }

    /// Grid with caller-supplied positions; `positions[i]` may be shorter
    /// than the representable depth but not longer.
    pub fn from_positions(
        spec: &EscapeSpec,
        depth: usize,
        positions: Vec<Vec<Complex>>,
        rho_index: usize,
        eps_pot: f64,
    ) -> Result<Self> {
        if positions.len() != spec.m() {
            return Err(Error::InvalidSpec("one position row per orbit is required"));
        }
        let f = GrowthFn::new(spec.d)?;
        let potentials: Vec<Vec<Real>> = spec
            .potentials
            .iter()
            .zip(positions.iter())
            .map(|(&t, row)| {
                let mut orbit = potential_orbit(&f, t, depth);
                orbit.truncate(row.len());
                orbit
            })
            .collect();
        if potentials.iter().zip(positions.iter()).any(|(p, row)| p.len() != row.len() || row.is_empty()) {
            return Err(Error::IndexError("position rows must be nonempty and within the representable depth"));
        }
        let mut all: Vec<Real> = potentials.iter().flatten().copied().collect();
        all.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
        let mut potential_set: Vec<Real> = Vec::new();
        for t in all {
            if potential_set.last().is_none_or(|&u| !rel_close(u, t, eps_pot)) {
                potential_set.push(t);
            }
        }
        if rho_index + 1 >= potential_set.len() {
            return Err(Error::IndexError("rho_index exceeds the number of potential midpoints"));
        }
        let rho = (potential_set[rho_index] + potential_set[rho_index + 1]).mul_pow2(-1);
        let n_inside = positions
            .iter()
            .map(|row| row.iter().take_while(|a| a.norm() < rho).count() as i64 - 1)
            .collect();
        Ok(MarkedGrid {
            spec: spec.clone(),
            depth,
            potentials,
            positions,
            residuals: None,
            potential_set,
            rho_index,
            rho,
            n_inside,
            eps_pot,
        })
    }

    pub fn m(&self) -> usize {
        self.spec.m()
    }

    pub fn d(&self) -> usize {
        self.spec.d
    }

    /// Midpoints of consecutive potentials; `rho` is one of them.
    pub fn midpoints(&self) -> Vec<Real> {
        self.potential_set.windows(2).map(|w| (w[0] + w[1]).mul_pow2(-1)).collect()
    }

    /// Largest positioned `j` on orbit `i`.
    pub fn positioned_depth(&self, i: usize) -> usize {
        self.positions[i].len() - 1
    }

    pub fn position(&self, p: PointId) -> Result<Complex> {
        self.positions
            .get(p.0)
            .and_then(|row| row.get(p.1))
            .copied()
            .ok_or(Error::MissingPoint(p.0, p.1))
    }

    pub fn potential(&self, p: PointId) -> Result<Real> {
        self.potentials
            .get(p.0)
            .and_then(|row| row.get(p.1))
            .copied()
            .ok_or(Error::MissingPoint(p.0, p.1))
    }

    /// `s_ij`, the first entry of `σ^j s_i`; defined for every `j`.
    pub fn first_entry(&self, p: PointId) -> i64 {
        self.spec.addresses[p.0].entry(p.1)
    }

    /// Whether `F^j(T_i) = F^l(T_k)`, decided without evaluating the larger
    /// iterate: `F` is injective, so the common number of steps cancels.
    pub fn same_potential(&self, a: PointId, b: PointId) -> bool {
        let f = GrowthFn::new(self.d()).expect("degree validated");
        let q = a.1.min(b.1);
        let x = f.iterate(self.spec.potentials[a.0], a.1 - q);
        let y = f.iterate(self.spec.potentials[b.0], b.1 - q);
        match (x, y) {
            (Ok(x), Ok(y)) => rel_close(x, y, self.eps_pot),
            _ => false,
        }
    }

    pub fn same_cluster(&self, a: PointId, b: PointId) -> bool {
        self.first_entry(a) == self.first_entry(b) && self.same_potential(a, b)
    }

    /// Steps beyond which first entries of every orbit repeat periodically.
    pub fn symbolic_depth(&self) -> usize {
        let pre = self.spec.addresses.iter().map(|s| s.preperiod()).max().unwrap_or(0);
        let per = self.spec.addresses.iter().fold(1, |acc, s| lcm(acc, s.period()));
        self.depth + pre + per + 1
    }

    pub fn dump(&self, partition: &Partition) -> Vec<GridPoint> {
        let mut out = Vec::new();
        for (i, row) in self.positions.iter().enumerate() {
            for (j, &position) in row.iter().enumerate() {
                out.push(GridPoint {
                    i,
                    j,
                    t: self.potentials[i][j],
                    s_first: self.first_entry((i, j)),
                    position,
                    cluster: partition.label[i][j],
                });
            }
        }
        out
    }

    /// Same-cluster pairs violating `|a_ij - a_kl| <= 2 max(res) e^{-t/2}`,
    /// reported as `(p, q, distance, bound)`. Needs a grid built from rays.
    pub fn proximity_violations(&self, partition: &Partition) -> Option<Vec<(PointId, PointId, f64, f64)>> {
        self.residuals.as_ref()?;
        // res * e^{-t/2} is the raw deviation from the asymptotic center,
        // which stays finite where the scaled residual overflows
        let dev = |p: PointId| {
            let t = self.potentials[p.0][p.1];
            let center = asymptotic_center(&self.spec.addresses[p.0].shift_by(p.1), t, self.spec.d);
            (self.positions[p.0][p.1] - center).norm_f64()
        };
        let mut out = Vec::new();
        for (p, q) in partition.pairs() {
            let bound = 2.0 * dev(p).max(dev(q));
            let dist = (self.positions[p.0][p.1] - self.positions[q.0][q.1]).norm_f64();
            if !(dist <= bound) {
                out.push((p, q, dist, bound));
            }
        }
        Some(out)
    }
}

/// Clusters: same potential and same first entry. Every positioned point
/// lands in exactly one cluster.
pub fn cluster_decompose(grid: &MarkedGrid) -> Partition {
    let mut clusters: Vec<Cluster> = Vec::new();
    let mut label: Vec<Vec<usize>> = grid.positions.iter().map(|row| alloc::vec![0; row.len()]).collect();
    // walk points in (i, j) order so each cluster's first member is its
    // smallest index pair
    for (i, row) in grid.positions.iter().enumerate() {
        for j in 0..row.len() {
            let found = clusters.iter().position(|c| grid.same_cluster(c.representative(), (i, j)));
            match found {
                Some(idx) => {
                    clusters[idx].members.push((i, j));
                    label[i][j] = idx;
                }
                None => {
                    label[i][j] = clusters.len();
                    clusters.push(Cluster {
                        potential: grid.potentials[i][j],
                        entry: grid.first_entry((i, j)),
                        members: alloc::vec![(i, j)],
                    });
                }
            }
        }
    }
    Partition { clusters, label }
}

fn require_same_cluster(grid: &MarkedGrid, a: PointId, b: PointId) -> Result<()> {
    if a.0 >= grid.m() || b.0 >= grid.m() {
        return Err(Error::IndexError("orbit index out of range"));
    }
    if a == b || !grid.same_cluster(a, b) {
        return Err(Error::InvalidArgument("points are not a same-cluster pair"));
    }
    Ok(())
}

/// Least `h >= 1` with `a_{i(j+h)}` and `a_{k(l+h)}` in different clusters.
///
/// Equal potentials stay equal under `F`, so separation happens exactly at
/// the first differing address entry; this is decided symbolically, also
/// past the positioned depth.
pub fn h_index(grid: &MarkedGrid, a: PointId, b: PointId) -> Result<usize> {
    require_same_cluster(grid, a, b)?;
    let limit = grid.symbolic_depth();
    (1..=limit)
        .find(|&h| grid.first_entry((a.0, a.1 + h)) != grid.first_entry((b.0, b.1 + h)))
        .ok_or(Error::DepthExhausted(limit))
}

/// Least `L >= 1` with both predecessors defined and in different clusters;
/// `None` stands for infinity.
pub fn l_index(grid: &MarkedGrid, a: PointId, b: PointId) -> Result<Option<usize>> {
    require_same_cluster(grid, a, b)?;
    let reach = a.1.min(b.1);
    Ok((1..=reach).find(|&l| grid.first_entry((a.0, a.1 - l)) != grid.first_entry((b.0, b.1 - l))))
}
