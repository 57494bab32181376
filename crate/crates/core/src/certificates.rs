//! Numerical certificates for the invariant-subset conditions, the rotation
//! law inside clusters, and expansivity of inverse branches near infinity.
//!
//! Every check returns a [`CertificateReport`] listing one witness per
//! tested quantity; the verdict is the conjunction of the witnesses.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::addresses::GrowthFn;
use crate::clusters::{cluster_decompose, h_index, l_index, MarkedGrid, PointId, QuotientDisk, SectorSet};
use crate::complex::Complex;
use crate::entiremap::EntireMap;
use crate::error::{Error, Result};
use crate::real::Real;

/// Images `φ(a_ij)` of the marked points under a candidate map.
pub type Positions = BTreeMap<PointId, Complex>;

/// The grid's own points as positions.
pub fn identity_positions(grid: &MarkedGrid) -> Positions {
    let mut out = Positions::new();
    for (i, row) in grid.positions.iter().enumerate() {
        for (j, &a) in row.iter().enumerate() {
            out.insert((i, j), a);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// `value < bound`
    Below,
    /// `value <= bound`
    AtMost,
    /// `value > bound`
    Above,
}

impl Relation {
    pub fn holds(self, value: f64, bound: f64) -> bool {
        match self {
            Relation::Below => value < bound,
            Relation::AtMost => value <= bound,
            Relation::Above => value > bound,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Below => "<",
            Relation::AtMost => "<=",
            Relation::Above => ">",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub a: Option<PointId>,
    pub b: Option<PointId>,
    pub label: &'static str,
    pub value: f64,
    pub bound: f64,
    pub relation: Relation,
    pub passed: bool,
}

impl Witness {
    fn new(a: Option<PointId>, b: Option<PointId>, label: &'static str, value: f64, bound: f64, relation: Relation) -> Self {
        let passed = relation.holds(value, bound);
        Witness { a, b, label, value, bound, relation, passed }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertificateReport {
    pub name: &'static str,
    pub passed: bool,
    pub witnesses: Vec<Witness>,
    pub config: Vec<(&'static str, f64)>,
}

impl CertificateReport {
    fn new(name: &'static str, witnesses: Vec<Witness>, config: Vec<(&'static str, f64)>) -> Self {
        let passed = witnesses.iter().all(|w| w.passed);
        CertificateReport { name, passed, witnesses, config }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Witness> {
        self.witnesses.iter().filter(|w| !w.passed)
    }
}

fn lookup(positions: &Positions, p: PointId) -> Result<Complex> {
    positions.get(&p).copied().ok_or(Error::MissingPoint(p.0, p.1))
}

/// Points with `j <= N_i` stay inside `D_rho`.
pub fn check_inside_disk(grid: &MarkedGrid, positions: &Positions) -> Result<CertificateReport> {
    let rho = grid.rho.to_f64();
    let mut witnesses = Vec::new();
    for (i, &n) in grid.n_inside.iter().enumerate() {
        for j in 0..(n + 1).max(0) as usize {
            let p = lookup(positions, (i, j))?;
            witnesses.push(Witness::new(Some((i, j)), None, "|phi(a_ij)|", p.norm_f64(), rho, Relation::Below));
        }
    }
    Ok(CertificateReport::new("inside_disk", witnesses, alloc::vec![("rho", rho)]))
}

/// Points with `j > N_i` move by less than `1/j`.
pub fn check_asymptotics_outside(grid: &MarkedGrid, positions: &Positions) -> Result<CertificateReport> {
    let mut witnesses = Vec::new();
    for (i, &n) in grid.n_inside.iter().enumerate() {
        let first = (n + 1) as usize;
        for j in first..=grid.positioned_depth(i) {
            let p = lookup(positions, (i, j))?;
            let dev = (p - grid.positions[i][j]).norm_f64();
            let bound = if j == 0 { f64::INFINITY } else { 1.0 / j as f64 };
            witnesses.push(Witness::new(Some((i, j)), None, "|phi(a_ij) - a_ij|", dev, bound, Relation::Below));
        }
    }
    Ok(CertificateReport::new("asymptotics_outside", witnesses, alloc::vec![("rho", grid.rho.to_f64())]))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RigidityConfig {
    /// `resolution` radii times `resolution` angles over the quotient disk.
    /// The grid for `r (r + 2)` contains the grid for `r`.
    pub resolution: usize,
    /// Also test pairs with `j <= N_i` or `l <= N_k`.
    pub all_pairs: bool,
}

impl Default for RigidityConfig {
    fn default() -> Self {
        RigidityConfig { resolution: 33, all_pairs: false }
    }
}

/// Result of factoring one same-cluster displacement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Factorization {
    pub h: usize,
    /// `(φ(a_kl) - φ(a_ij)) d (F^H)'(t) / (2πi Δs)`.
    pub omega: Complex,
    pub disk: QuotientDisk,
    pub sector: SectorSet,
    /// Smallest `max(|log|ω/δ||, |Arg ω/δ|)` over the search grid.
    pub best: f64,
    pub best_delta: Complex,
}

/// Searches `δ ∈ D` with `ω/δ ∈ A_{t,H-1}` for the pair `(a, b)`.
pub fn rigidity_factorization(
    grid: &MarkedGrid,
    positions: &Positions,
    a: PointId,
    b: PointId,
    resolution: usize,
) -> Result<Factorization> {
    let h = h_index(grid, a, b)?;
    let fa = (a.0, a.1 + h);
    let fb = (b.0, b.1 + h);
    if fa.1 > grid.positioned_depth(a.0) || fb.1 > grid.positioned_depth(b.0) {
        return Err(Error::DepthExhausted(a.1.max(b.1) + h));
    }
    let disk = QuotientDisk::from_grid(grid, fa, fb)?;
    let t = grid.potential(a)?;
    let f = GrowthFn::new(grid.d())?;
    let dfh = f.derivative_iter(t, h).map_err(|_| Error::DepthExhausted(a.1.max(b.1) + h))?;
    let ds = Real::from(grid.first_entry(fb) - grid.first_entry(fa));
    let diff = lookup(positions, b)? - lookup(positions, a)?;
    let omega = diff.scale(Real::from(grid.d()) * dfh) / Complex::new(Real::ZERO, Real::TAU * ds);
    let sector = SectorSet::new(t.to_f64(), h - 1, grid.d())?;

    let score = |delta: Complex| -> Option<f64> {
        if delta.is_zero() {
            return None;
        }
        sector.slack(omega / delta).ok().map(|s| s + sector.bound())
    };
    let mut best = f64::INFINITY;
    let mut best_delta = disk.center;
    let res = resolution.max(1);
    let mut consider = |delta: Complex| {
        if let Some(v) = score(delta) {
            if v < best {
                best = v;
                best_delta = delta;
            }
        }
    };
    consider(disk.center);
    for ra in 1..=res {
        // radii strictly inside the open disk
        let r = Real::from(ra as f64 / (res + 1) as f64);
        for tb in 0..res {
            let theta = Real::TAU * Real::from(tb as f64 / res as f64);
            consider(disk.point(r, theta));
        }
    }
    Ok(Factorization { h, omega, disk, sector, best, best_delta })
}

/// Same-cluster displacements factor as `2πiΔs/(d(F^H)'(t)) ν δ` with
/// `ν ∈ A_{t,H-1}` and `δ ∈ D_{i(j+H)}^{k(l+H)}`.
pub fn check_cluster_rigidity(grid: &MarkedGrid, positions: &Positions, cfg: &RigidityConfig) -> Result<CertificateReport> {
    let partition = cluster_decompose(grid);
    let mut witnesses = Vec::new();
    for (a, b) in partition.pairs() {
        let outside = a.1 as i64 > grid.n_inside[a.0] && b.1 as i64 > grid.n_inside[b.0];
        if !cfg.all_pairs && !outside {
            continue;
        }
        let fact = rigidity_factorization(grid, positions, a, b, cfg.resolution)?;
        witnesses.push(Witness::new(Some(a), Some(b), "sector slack of omega/delta", fact.best, fact.sector.bound(), Relation::Below));
    }
    Ok(CertificateReport::new(
        "cluster_rigidity",
        witnesses,
        alloc::vec![("resolution", cfg.resolution as f64), ("all_pairs", if cfg.all_pairs { 1.0 } else { 0.0 })],
    ))
}

/// `α = (post₂ - post₁) F'(t) / (pre₂ - pre₁)` must lie in `A_{t,0}`.
pub fn check_negligible_rotation(
    t: Real,
    pre: (Complex, Complex),
    post: (Complex, Complex),
    d: usize,
) -> Result<CertificateReport> {
    let den = pre.1 - pre.0;
    if den.is_zero() {
        return Err(Error::DegeneratePair);
    }
    let f = GrowthFn::new(d)?;
    let alpha = (post.1 - post.0).scale(f.derivative(t)?) / den;
    let sector = SectorSet::new(t.to_f64(), 0, d)?;
    let value = sector.slack(alpha)? + sector.bound();
    let w = Witness::new(None, None, "max(|log|alpha||, |arg alpha|)", value, sector.bound(), Relation::Below);
    Ok(CertificateReport::new("negligible_rotation", alloc::vec![w], alloc::vec![("t", t.to_f64())]))
}

/// Pulls both points of a pair back one step through the branches labeled
/// by the first entries.
pub fn pullback_pair(g: &EntireMap, pre: (Complex, Complex), entries: (i64, i64)) -> Result<(Complex, Complex)> {
    Ok((g.inverse_branch(pre.0, entries.0)?, g.inverse_branch(pre.1, entries.1)?))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpansivityConfig {
    pub steps: usize,
    /// Constant in `|z_1 - z_0| <= C_exp / |w|`; defaults to
    /// `10 (1 + segment length)`.
    pub c_exp: Option<f64>,
    /// Constant in `Re z_u > C log|w|`; defaults to `1/(2d)`.
    pub c_log: Option<f64>,
}

impl Default for ExpansivityConfig {
    fn default() -> Self {
        ExpansivityConfig { steps: 16, c_exp: None, c_log: None }
    }
}

/// Preimage path `z_u` with `g_u(z_u) = w` along the coefficient segment,
/// by Newton continuation from `z_0 = inverse_branch(g0, w, s)`.
pub fn continue_preimage(g0: &EntireMap, g1: &EntireMap, w: Complex, s: i64, steps: usize) -> Result<Vec<Complex>> {
    if g0.degree() != g1.degree() {
        return Err(Error::InvalidArgument("segment endpoints must share the degree"));
    }
    let d = g0.degree();
    let threshold = g0.r_min().max(g1.r_min());
    if !(w.norm_f64() >= threshold) {
        return Err(Error::BelowThreshold { modulus: w.norm_f64(), threshold });
    }
    let steps = steps.max(1);
    let mut z = g0.inverse_branch(w, s)?;
    if g0 == g1 {
        return Ok(alloc::vec![z; steps + 1]);
    }
    let mut path = alloc::vec![z];
    let jump = core::f64::consts::PI / d as f64;
    for k in 1..=steps {
        let g = g0.lerp(g1, Real::from(k as f64 / steps as f64));
        let start = z;
        let mut converged = false;
        for _ in 0..100 {
            let step = (g.evaluate(z)? - w) / g.derivative(z)?;
            z -= step;
            if step.norm_f64() <= 1e-58 * z.norm_f64().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence);
        }
        let moved = (z - start).norm_f64();
        if moved > jump {
            return Err(Error::ContinuationJump(moved));
        }
        path.push(z);
    }
    Ok(path)
}

/// `|z_1 - z_0|` along the segment from `g0` to `g1`.
pub fn expansivity_deviation(g0: &EntireMap, g1: &EntireMap, w: Complex, s: i64, steps: usize) -> Result<f64> {
    let path = continue_preimage(g0, g1, w, s, steps)?;
    Ok((*path.last().unwrap() - path[0]).norm_f64())
}

pub fn check_expansivity(
    g0: &EntireMap,
    g1: &EntireMap,
    w: Complex,
    s: i64,
    rho: f64,
    cfg: &ExpansivityConfig,
) -> Result<CertificateReport> {
    let d = g0.degree();
    for u in 0..=cfg.steps.max(1) {
        let g = g0.lerp(g1, Real::from(u as f64 / cfg.steps.max(1) as f64));
        if g.singular_values(1e-12).iter().any(|v| !(v.norm_f64() < rho)) {
            return Err(Error::InvalidArgument("singular values must stay inside D_rho along the segment"));
        }
    }
    let path = continue_preimage(g0, g1, w, s, cfg.steps)?;
    let seg_len = g0.coeff_distance(g1);
    let c_exp = cfg.c_exp.unwrap_or(10.0 * (1.0 + seg_len));
    let c_log = cfg.c_log.unwrap_or(1.0 / (2.0 * d as f64));
    let modulus = w.norm_f64();
    let log_w = w.ln_norm().to_f64();
    let dev = (*path.last().unwrap() - path[0]).norm_f64();
    let mut witnesses = alloc::vec![Witness::new(None, None, "|z_1 - z_0|", dev, c_exp / modulus, Relation::AtMost)];
    for z in &path {
        witnesses.push(Witness::new(None, None, "Re z_u", z.re.to_f64(), c_log * log_w, Relation::Above));
    }
    Ok(CertificateReport::new(
        "expansivity",
        witnesses,
        alloc::vec![("c_exp", c_exp), ("c_log", c_log), ("steps", cfg.steps as f64), ("rho", rho)],
    ))
}

/// Constants of the conditions whose definitions live outside this crate's
/// scope; the corresponding checks run only when these are supplied.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExternalConstants {
    /// Separation scale `β`, taken constant over all pairs.
    pub beta: f64,
    pub m_rho: f64,
    pub a: f64,
    pub c: f64,
}

/// Distinct points inside `D_rho` stay apart by `β / M_rho^n`.
pub fn check_separation_inside(grid: &MarkedGrid, positions: &Positions, k: &ExternalConstants) -> Result<CertificateReport> {
    let mut inside = Vec::new();
    for (i, &n) in grid.n_inside.iter().enumerate() {
        for j in 0..(n + 1).max(0) as usize {
            inside.push((i, j));
        }
    }
    let mut witnesses = Vec::new();
    for (x, &p) in inside.iter().enumerate() {
        for &q in &inside[x + 1..] {
            let n = (grid.n_inside[p.0] + 1 - p.1 as i64).min(grid.n_inside[q.0] + 1 - q.1 as i64);
            let bound = k.beta / libm::pow(k.m_rho, n as f64);
            let dist = (lookup(positions, q)? - lookup(positions, p)?).norm_f64();
            witnesses.push(Witness::new(Some(p), Some(q), "|phi(a_kl) - phi(a_ij)|", dist, bound, Relation::Above));
        }
    }
    Ok(CertificateReport::new("separation_inside", witnesses, alloc::vec![("beta", k.beta), ("m_rho", k.m_rho)]))
}

/// `|W_ij| < A^{N_i+1-j} ((N_i+1)!/j!)^4 C`, given the word lengths.
pub fn check_bounded_homotopy(
    grid: &MarkedGrid,
    word_lengths: &BTreeMap<PointId, f64>,
    k: &ExternalConstants,
) -> Result<CertificateReport> {
    let mut witnesses = Vec::new();
    for (i, &n) in grid.n_inside.iter().enumerate() {
        for j in 0..(n + 1).max(0) as usize {
            let len = *word_lengths.get(&(i, j)).ok_or(Error::MissingPoint(i, j))?;
            let ratio: f64 = ((j + 1)..=(n as usize + 1)).map(|v| v as f64).product();
            let bound = libm::pow(k.a, (n + 1 - j as i64) as f64) * libm::pow(ratio, 4.0) * k.c;
            witnesses.push(Witness::new(Some((i, j)), None, "|W_ij|", len, bound, Relation::Below));
        }
    }
    Ok(CertificateReport::new("bounded_homotopy", witnesses, alloc::vec![("A", k.a), ("C", k.c)]))
}

/// Backward behavior of the clusters that leave `D_rho` together with the
/// asymptotic-value orbit (orbit 0).
pub fn check_clusters_inside(grid: &MarkedGrid, positions: &Positions, k: &ExternalConstants) -> Result<CertificateReport> {
    let d = grid.d() as f64;
    let big_n = grid.n_inside.iter().copied().max().unwrap_or(-1).max(0) as f64;
    let first = |i: usize| (grid.n_inside[i] + 1) as usize;
    let anchor = (0, first(0));
    let mut witnesses = Vec::new();
    for other in 1..grid.m() {
        let b = (other, first(other));
        if b.1 > grid.positioned_depth(other) || anchor.1 > grid.positioned_depth(0) || !grid.same_cluster(anchor, b) {
            continue;
        }
        let l = l_index(grid, anchor, b)?;
        for n in 0..=anchor.1.min(b.1) {
            let p = (0, anchor.1 - n);
            let q = (other, b.1 - n);
            let dist = (lookup(positions, q)? - lookup(positions, p)?).norm_f64();
            let before_split = l.is_none_or(|l| n < l);
            let w = if before_split {
                let bound = 4.0 * k.beta * libm::pow(k.m_rho, 2.0 * d * big_n * n as f64);
                Witness::new(Some(p), Some(q), "|phi(a_k) - phi(a_1)| (n < L)", dist, bound, Relation::Below)
            } else {
                let l = l.unwrap_or(0) as f64;
                let expo = 2.0 * libm::pow(d, 4.0) * big_n + n as f64 - l;
                let bound = libm::pow(1.0 / k.m_rho, expo);
                Witness::new(Some(p), Some(q), "|phi(a_k) - phi(a_1)| (n >= L)", dist, bound, Relation::Above)
            };
            witnesses.push(w);
        }
    }
    Ok(CertificateReport::new("clusters_inside", witnesses, alloc::vec![("beta", k.beta), ("m_rho", k.m_rho)]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::addresses::ExternalAddress;
    use crate::clusters::{GridConfig, EPS_POT};
    use crate::escape::EscapeSpec;
    use alloc::vec;

    fn addr(s: &str) -> ExternalAddress {
        s.parse().unwrap()
    }

    fn exp_grid() -> MarkedGrid {
        let spec = EscapeSpec::from_f64(1, vec![addr("| 0"), addr("| 1")], &[10.0, 12.0]).unwrap();
        MarkedGrid::build(&EntireMap::exponential(), &spec, 2, 1, &GridConfig::default()).unwrap()
    }

    #[test]
    fn inside_disk_examples() {
        let grid = exp_grid();
        let mut pos = identity_positions(&grid);
        let r = check_inside_disk(&grid, &pos).unwrap();
        assert!(r.passed);
        assert!(!r.witnesses.is_empty());
        let rho = grid.rho.to_f64();
        pos.insert((0, 0), Complex::from_f64(rho + 1.0, 0.0));
        let r = check_inside_disk(&grid, &pos).unwrap();
        assert!(!r.passed);
        assert_eq!(r.failures().next().unwrap().a, Some((0, 0)));
        pos.remove(&(0, 0));
        assert_eq!(check_inside_disk(&grid, &pos), Err(Error::MissingPoint(0, 0)));
    }

    #[test]
    fn inside_disk_vacuous() {
        let spec = EscapeSpec::from_f64(1, vec![addr("| 0")], &[5.0]).unwrap();
        let grid = MarkedGrid::from_positions(&spec, 1, vec![vec![Complex::from_f64(1e9, 0.0), Complex::from_f64(2e9, 0.0)]], 0, EPS_POT)
            .unwrap();
        assert_eq!(grid.n_inside, vec![-1]);
        let r = check_inside_disk(&grid, &identity_positions(&grid)).unwrap();
        assert!(r.passed && r.witnesses.is_empty());
    }

    #[test]
    fn asymptotics_outside_examples() {
        let grid = exp_grid();
        let mut pos = identity_positions(&grid);
        assert!(check_asymptotics_outside(&grid, &pos).unwrap().passed);
        // a point outside with j >= 1
        let (i, j) = (0..grid.m())
            .flat_map(|i| ((grid.n_inside[i] + 1) as usize..=grid.positioned_depth(i)).map(move |j| (i, j)))
            .find(|p| p.1 >= 1)
            .unwrap();
        let a = grid.positions[i][j];
        pos.insert((i, j), a + Complex::from(Real::ONE / Real::from(j)));
        assert!(!check_asymptotics_outside(&grid, &pos).unwrap().passed);

        // positions from a slightly perturbed map
        let g1 = EntireMap::exp_plus(Complex::from_f64(1e-12, 0.0));
        let grid1 = MarkedGrid::build(&g1, &grid.spec, 2, 1, &GridConfig::default()).unwrap();
        assert!(check_asymptotics_outside(&grid, &identity_positions(&grid1)).unwrap().passed);
    }

    fn cluster_grid() -> MarkedGrid {
        let spec = EscapeSpec::new_allowing_overlap(1, vec![addr("| 0"), addr("0 1 | 0")], vec![Real::from(20.0); 2]).unwrap();
        MarkedGrid::build(&EntireMap::exponential(), &spec, 2, 0, &GridConfig::default()).unwrap()
    }

    #[test]
    fn rigidity_on_ray_grid() {
        let grid = cluster_grid();
        let pos = identity_positions(&grid);
        let default = check_cluster_rigidity(&grid, &pos, &RigidityConfig::default()).unwrap();
        assert!(default.passed);
        let all = check_cluster_rigidity(&grid, &pos, &RigidityConfig { all_pairs: true, ..Default::default() }).unwrap();
        assert!(all.passed);
        assert_eq!(all.witnesses.len(), 1);
    }

    #[test]
    fn rigidity_synthetic() {
        let grid = cluster_grid();
        let (a, b) = ((0, 0), (1, 0));
        let mut pos = identity_positions(&grid);
        let disk = QuotientDisk::from_grid(&grid, (0, 1), (1, 1)).unwrap();
        let f = GrowthFn::new(1).unwrap();
        let dfh = f.derivative_iter(grid.potential(a).unwrap(), 1).unwrap();
        let ds = Real::from(grid.first_entry((1, 1)) - grid.first_entry((0, 1)));
        let unit = Complex::new(Real::ZERO, Real::TAU * ds) / Complex::from(dfh);
        // exact factorization with ν = 1, δ = center
        pos.insert(b, pos[&a] + unit * disk.center);
        let fact = rigidity_factorization(&grid, &pos, a, b, 33).unwrap();
        assert!(fact.best < 1e-40);
        // push ν beyond the sector: no δ in the disk can compensate
        let bound = fact.sector.bound();
        let far = Real::from(libm::exp(2.0 * bound)) * (Real::ONE + disk.radius / disk.center.norm()).powi(2);
        pos.insert(b, pos[&a] + (unit * disk.center).scale(far));
        let cfg = RigidityConfig { all_pairs: true, ..Default::default() };
        assert!(!check_cluster_rigidity(&grid, &pos, &cfg).unwrap().passed);
    }

    #[test]
    fn finer_search_never_flips_pass() {
        let grid = cluster_grid();
        let pos = identity_positions(&grid);
        let coarse = rigidity_factorization(&grid, &pos, (0, 0), (1, 0), 3).unwrap();
        let fine = rigidity_factorization(&grid, &pos, (0, 0), (1, 0), 15).unwrap();
        assert!(coarse.best < coarse.sector.bound());
        assert!(fine.best <= coarse.best);
    }

    #[test]
    fn negligible_rotation_examples() {
        let t = Real::from(9.0);
        let f = GrowthFn::new(1).unwrap();
        let pre = (Complex::from_f64(1e4, 0.0), Complex::from_f64(1e4, 3.0));
        let post1 = Complex::from_f64(9.0, 0.0);
        let post = (post1, post1 + (pre.1 - pre.0) / Complex::from(f.derivative(t).unwrap()));
        assert!(check_negligible_rotation(t, pre, post, 1).unwrap().passed);
        let post = (post1, post1 + (pre.1 - pre.0).scale(Real::from(2.0)) / Complex::from(f.derivative(t).unwrap()));
        assert!(!check_negligible_rotation(t, pre, post, 1).unwrap().passed);
        assert_eq!(check_negligible_rotation(t, (pre.0, pre.0), post, 1), Err(Error::DegeneratePair));
    }

    #[test]
    fn negligible_rotation_on_genuine_pullback() {
        let spec = EscapeSpec::new_allowing_overlap(1, vec![addr("0 1 | 0"), addr("0 -1 | 0")], vec![Real::from(12.0); 2]).unwrap();
        let g = EntireMap::exponential();
        let grid = MarkedGrid::build(&g, &spec, 1, 0, &GridConfig::default()).unwrap();
        let pre = (grid.positions[0][1], grid.positions[1][1]);
        let post = pullback_pair(&g, pre, (0, 0)).unwrap();
        assert!((post.0 - grid.positions[0][0]).norm_f64() < 1e-40);
        assert!(check_negligible_rotation(Real::from(12.0), pre, post, 1).unwrap().passed);
    }

    #[test]
    fn expansivity_examples() {
        let g0 = EntireMap::exponential();
        let w = Complex::from(Real::from(20.0).exp());
        assert_eq!(expansivity_deviation(&g0, &g0, w, 0, 16).unwrap(), 0.0);
        let g1 = EntireMap::exp_plus(Complex::from_f64(0.1, 0.0));
        let r = check_expansivity(&g0, &g1, w, 0, 1.0, &ExpansivityConfig::default()).unwrap();
        assert!(r.passed);
        assert!(r.witnesses[0].value <= 11.0 / libm::exp(20.0));
        let w10 = Complex::from(Real::from(10.0).exp());
        let ratio = expansivity_deviation(&g0, &g1, w10, 0, 16).unwrap() / expansivity_deviation(&g0, &g1, w, 0, 16).unwrap();
        assert!(ratio >= libm::exp(9.0));
    }

    #[test]
    fn expansivity_threshold_and_jump() {
        let g0 = EntireMap::exponential();
        let g1 = EntireMap::exp_plus(Complex::from_f64(0.1, 0.0));
        assert!(matches!(
            check_expansivity(&g0, &g1, Complex::from_f64(2.0, 0.0), 0, 1.0, &ExpansivityConfig::default()),
            Err(Error::BelowThreshold { .. })
        ));
        let sq = EntireMap::monomial(2).unwrap();
        assert!(matches!(continue_preimage(&g0, &sq, Complex::from_f64(1e9, 0.0), 0, 4), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn optional_conditions() {
        let grid = exp_grid();
        let pos = identity_positions(&grid);
        let k = ExternalConstants { beta: 1e-3, m_rho: 2.0, a: 2.0, c: 10.0 };
        assert!(check_separation_inside(&grid, &pos, &k).unwrap().passed);
        let mut words = BTreeMap::new();
        for (i, &n) in grid.n_inside.iter().enumerate() {
            for j in 0..=n.max(-1) {
                words.insert((i, j as usize), 1.0);
            }
        }
        assert!(check_bounded_homotopy(&grid, &words, &k).unwrap().passed);
        assert!(check_clusters_inside(&grid, &pos, &k).unwrap().passed);
    }
}
