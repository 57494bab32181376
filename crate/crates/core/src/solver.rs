//! Fixed-point iteration in coefficient space: find a monic `p` such that
//! each singular value of `p∘exp` sits on its prescribed ray at its
//! prescribed potential.
//!
//! One outer step computes the target ray points for the current map, then
//! moves the coefficients by damped Newton until the labeled singular values
//! hit those targets.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::addresses::{ExternalAddress, GrowthFn};
use crate::complex::Complex;
use crate::entiremap::EntireMap;
use crate::error::{Error, Result};
use crate::escape::EscapeSpec;
use crate::rays::{asymptotic_center, ray_point, RayConfig};
use crate::real::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub newton_budget: usize,
    /// Critical points closer than this to 0 make a map degenerate.
    pub eps_sv: f64,
    /// Forward-orbit certificate depth `J_check`.
    pub cert_depth: usize,
    /// Seed placement; the tolerance is overridden by `tol / 10`.
    pub ray: RayConfig,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig { tol: 1e-9, max_iter: 200, newton_budget: 60, eps_sv: 1e-9, cert_depth: 3, ray: RayConfig::default() }
    }
}

impl SolveConfig {
    fn ray_cfg(&self) -> RayConfig {
        RayConfig { tol: self.tol / 10.0, ..self.ray }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult {
    pub map: EntireMap,
    /// Singular values in label order: asymptotic value first.
    pub singular_values: Vec<Complex>,
    /// Ray points of the final map at the prescribed data.
    pub targets: Vec<Complex>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
    /// `certificate[i][j] = |g^j(v_i) - R_{σ^j s_i}(F^j(T_i))|`, for every
    /// `j <= cert_depth` before overflow.
    pub certificate: Vec<Vec<f64>>,
}

impl SolveResult {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_certificate_error(&self) -> f64 {
        self.certificate.iter().flatten().copied().fold(0.0, f64::max)
    }
}

fn validate(spec: &EscapeSpec, g: &EntireMap) -> Result<()> {
    if let Some((i, k)) = spec.first_overlap() {
        return Err(Error::OverlapError(i, k));
    }
    if spec.d > 3 {
        return Err(Error::InvalidDegree(spec.d));
    }
    if g.degree() != spec.d {
        return Err(Error::InvalidSpec("initial map degree differs from the spec degree"));
    }
    if spec.m() != spec.d {
        return Err(Error::InvalidSpec("need one address per singular value"));
    }
    Ok(())
}

/// Labeled singular values and the critical point behind each (`None` for
/// the asymptotic value). Critical values are ordered to minimize the total
/// displacement from `prev`, when given.
fn labeled(g: &EntireMap, prev: Option<&[Complex]>, eps: f64) -> Result<(Vec<Complex>, Vec<Option<Complex>>)> {
    let sv = g.labeled_singular_values(eps)?;
    let mut crit = sv.critical;
    if let Some(prev) = prev {
        let perm = best_permutation(&crit, &prev[1..]);
        crit = perm.iter().map(|&k| crit[k]).collect();
    }
    let mut values = alloc::vec![sv.asymptotic];
    let mut points = alloc::vec![None];
    for (w, v) in crit {
        values.push(v);
        points.push(Some(w));
    }
    Ok((values, points))
}

fn best_permutation(crit: &[(Complex, Complex)], prev: &[Complex]) -> Vec<usize> {
    let n = crit.len();
    let mut best = (f64::INFINITY, (0..n).collect::<Vec<_>>());
    let mut perm: Vec<usize> = (0..n).collect();
    permute(&mut perm, 0, &mut |p| {
        let cost: f64 = p.iter().zip(prev).map(|(&k, &v)| (crit[k].1 - v).norm_f64()).sum();
        if cost < best.0 {
            best = (cost, p.to_vec());
        }
    });
    best.1
}

fn permute(p: &mut [usize], k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        visit(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, visit);
        p.swap(k, i);
    }
}

fn max_dist(a: &[Complex], b: &[Complex]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (*x - *y).norm_f64()).fold(0.0, f64::max)
}

/// Gaussian elimination with partial pivoting.
fn solve_linear(mut a: Vec<Vec<Complex>>, mut b: Vec<Complex>) -> Result<Vec<Complex>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| a[x][col].norm_f64().total_cmp(&a[y][col].norm_f64()))
            .unwrap();
        if a[piv][col].is_zero() {
            return Err(Error::SingularJacobian);
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                let sub = f * a[col][k];
                a[row][k] -= sub;
            }
            let sub = f * b[col];
            b[row] -= sub;
        }
    }
    let mut x = alloc::vec![Complex::ZERO; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularJacobian);
    }
    Ok(x)
}

/// Damped Newton on the coefficients so that the labeled singular values
/// equal `targets`, starting from `start` whose labels are `prev`.
pub fn match_singular_values(
    start: &EntireMap,
    prev: &[Complex],
    targets: &[Complex],
    cfg: &SolveConfig,
) -> Result<(EntireMap, Vec<Complex>)> {
    let d = start.degree();
    let mut g = start.clone();
    let (mut vals, mut points) = labeled(&g, Some(prev), cfg.eps_sv)?;
    let mut norm = max_dist(&vals, targets);
    let floor = 1e-50 * (1.0 + targets.iter().map(|w| w.norm_f64()).fold(0.0, f64::max));
    for _ in 0..cfg.newton_budget {
        if norm <= floor {
            break;
        }
        // p(u_k) is stationary in u_k, so row k is (1, u_k, ..., u_k^{d-1})
        let jac: Vec<Vec<Complex>> = points
            .iter()
            .map(|pt| match pt {
                None => (0..d).map(|k| if k == 0 { Complex::ONE } else { Complex::ZERO }).collect(),
                Some(u) => (0..d).map(|k| u.powu(k as u32)).collect(),
            })
            .collect();
        let rhs: Vec<Complex> = targets.iter().zip(&vals).map(|(w, v)| *w - *v).collect();
        let step = solve_linear(jac, rhs)?;
        let mut lambda = Real::ONE;
        let mut accepted = false;
        for _ in 0..40 {
            let coeffs: Vec<Complex> = g.coeffs().iter().zip(&step).map(|(c, s)| *c + s.scale(lambda)).collect();
            if let Ok(trial) = EntireMap::new(coeffs) {
                if let Ok((tv, tp)) = labeled(&trial, Some(&vals), cfg.eps_sv) {
                    let tn = max_dist(&tv, targets);
                    if tn < norm {
                        g = trial;
                        vals = tv;
                        points = tp;
                        norm = tn;
                        accepted = true;
                        break;
                    }
                }
            }
            lambda = lambda.mul_pow2(-1);
        }
        if !accepted {
            break;
        }
    }
    if !(norm < cfg.tol * 1e-3) {
        return Err(Error::SingularJacobian);
    }
    Ok((g, vals))
}

fn ray_targets(g: &EntireMap, spec: &EscapeSpec, cfg: &SolveConfig) -> Result<Vec<Complex>> {
    let rc = cfg.ray_cfg();
    spec.addresses
        .iter()
        .zip(&spec.potentials)
        .map(|(s, &t)| ray_point(g, s, t, &rc).map(|r| r.position))
        .collect()
}

/// Map whose singular values sit at the leading-order ray positions
/// `T_i + 2πi s_i0 / d`.
pub fn initial_guess(spec: &EscapeSpec, cfg: &SolveConfig) -> Result<EntireMap> {
    let d = spec.d;
    let targets: Vec<Complex> = spec
        .addresses
        .iter()
        .zip(&spec.potentials)
        .map(|(s, &t)| asymptotic_center(s, t, d))
        .collect();
    // critical points spread on a circle, then Newton onto the targets
    let scale = libm::pow(targets.iter().map(|w| w.norm_f64()).fold(1.0, f64::max), 1.0 / d as f64);
    let crit: Vec<Complex> = (1..d)
        .map(|k| Complex::cis(Real::TAU * Real::from(k as f64 / d as f64) + Real::from(0.3)).scale(Real::from(scale)))
        .collect();
    // p' = d ∏(u - u_k); integrate with p(0) = w_0
    let mut dp = alloc::vec![Complex::from(Real::from(d))];
    for u in &crit {
        let mut next = alloc::vec![Complex::ZERO; dp.len() + 1];
        for (k, c) in dp.iter().enumerate() {
            next[k + 1] += *c;
            next[k] -= *c * *u;
        }
        dp = next;
    }
    let mut coeffs = alloc::vec![targets[0]];
    for (k, c) in dp.iter().enumerate().take(d - 1) {
        coeffs.push(c.scale(Real::ONE / Real::from(k + 1)));
    }
    let start = EntireMap::new(coeffs)?;
    let (prev, _) = labeled(&start, None, cfg.eps_sv)?;
    let loose = SolveConfig { tol: cfg.tol.max(1e-6), ..*cfg };
    Ok(match_singular_values(&start, &prev, &targets, &loose)?.0)
}

/// `|g^j(v_i) - R_{σ^j s_i}(F^j(T_i))|` for `j = 0..=depth`, stopping at
/// the first overflow.
pub fn forward_certificate(g: &EntireMap, spec: &EscapeSpec, values: &[Complex], cfg: &SolveConfig) -> Result<Vec<Vec<f64>>> {
    let f = GrowthFn::new(spec.d)?;
    let rc = cfg.ray_cfg();
    let mut out = Vec::with_capacity(values.len());
    for (i, &v) in values.iter().enumerate() {
        let mut row = Vec::new();
        let mut z = v;
        let mut t = spec.potentials[i];
        let mut s: ExternalAddress = spec.addresses[i].clone();
        for j in 0..=cfg.cert_depth {
            if j > 0 {
                z = match g.evaluate(z) {
                    Ok(w) if w.is_finite() => w,
                    _ => break,
                };
                t = match f.apply(t) {
                    Ok(x) => x,
                    Err(_) => break,
                };
                s = s.shift();
            }
            let target = match ray_point(g, &s, t, &rc) {
                Ok(r) => r.position,
                Err(_) => break,
            };
            row.push((z - target).norm_f64());
        }
        out.push(row);
    }
    Ok(out)
}

pub fn solve(spec: &EscapeSpec, g_init: &EntireMap, cfg: &SolveConfig) -> Result<SolveResult> {
    validate(spec, g_init)?;
    let mut g = g_init.clone();
    let (mut vals, _) = labeled(&g, None, cfg.eps_sv)?;
    let mut targets = ray_targets(&g, spec, cfg)?;
    for it in 1..=cfg.max_iter {
        let (next, next_vals) = match_singular_values(&g, &vals, &targets, cfg)?;
        let change = g.coeff_distance(&next);
        let next_targets = ray_targets(&next, spec, cfg)?;
        let residuals: Vec<f64> = next_vals.iter().zip(&next_targets).map(|(v, w)| (*v - *w).norm_f64()).collect();
        g = next;
        vals = next_vals;
        targets = next_targets;
        if change < cfg.tol && residuals.iter().all(|&r| r < cfg.tol) {
            let certificate = forward_certificate(&g, spec, &vals, cfg)?;
            return Ok(SolveResult { map: g, singular_values: vals, targets, residuals, iterations: it, certificate });
        }
    }
    Err(Error::NonConvergence(cfg.max_iter))
}

/// Solves along a path of potential tuples, warm-starting each step.
pub fn trace(spec0: &EscapeSpec, g_init: &EntireMap, path: &[Vec<Real>], cfg: &SolveConfig) -> Result<Vec<SolveResult>> {
    let mut out: Vec<SolveResult> = Vec::with_capacity(path.len());
    for (step, tuple) in path.iter().enumerate() {
        let spec = spec0.with_potentials(tuple.clone())?;
        if step > 0 && path[step - 1] == *tuple {
            let prev = out[step - 1].clone();
            out.push(prev);
            continue;
        }
        let start = out.last().map(|r| r.map.clone()).unwrap_or_else(|| g_init.clone());
        match solve(&spec, &start, cfg) {
            Ok(r) => out.push(r),
            Err(e) if step == 0 => return Err(e),
            Err(Error::NonConvergence(_)) | Err(Error::SingularJacobian) => return Err(Error::StepTooLarge(step)),
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Largest coefficient jump between consecutive trace entries.
pub fn max_jump(trace: &[SolveResult]) -> f64 {
    trace.windows(2).map(|w| w[0].map.coeff_distance(&w[1].map)).fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbeMode {
    Address,
    Potential,
    Both,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeConfig {
    pub mode: ProbeMode,
    pub first: usize,
    pub last: usize,
    /// Address approximants keep `n` entries and continue with this tail.
    pub tail: ExternalAddress,
}

impl ProbeConfig {
    pub fn new(mode: ProbeMode, first: usize, last: usize) -> Self {
        ProbeConfig { mode, first, last, tail: ExternalAddress::constant(0) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContinuityReport {
    pub center: SolveResult,
    /// `(n, |coeffs(G(α_n)) - coeffs(G(α))|)`.
    pub distances: Vec<(usize, f64)>,
    pub passed: bool,
}

/// The `n`-th approximant of `spec` under `cfg`.
pub fn approximant(spec: &EscapeSpec, n: usize, cfg: &ProbeConfig) -> Result<EscapeSpec> {
    let mut out = spec.clone();
    if matches!(cfg.mode, ProbeMode::Address | ProbeMode::Both) {
        out = out.with_addresses(spec.addresses.iter().map(|s| s.splice(n, &cfg.tail)).collect())?;
    }
    if matches!(cfg.mode, ProbeMode::Potential | ProbeMode::Both) {
        let bump = Real::ONE / Real::from(n.max(1));
        out = out.with_potentials(spec.potentials.iter().map(|&t| t + bump).collect())?;
    }
    Ok(out)
}

/// Solves the approximants `α_n` for `n` in `first..=last` and measures their
/// coefficient distance to `G(α)`. Passes when the distances never increase
/// and the last one is below the tolerance.
pub fn continuity_probe(spec: &EscapeSpec, g_init: &EntireMap, probe: &ProbeConfig, cfg: &SolveConfig) -> Result<ContinuityReport> {
    if probe.first > probe.last {
        return Err(Error::InvalidArgument("empty probe range"));
    }
    let center = solve(spec, g_init, cfg)?;
    let mut distances = Vec::new();
    for n in probe.first..=probe.last {
        let approx = approximant(spec, n, probe)?;
        if approx == *spec {
            distances.push((n, 0.0));
            continue;
        }
        let r = solve(&approx, &center.map, cfg)?;
        distances.push((n, r.map.coeff_distance(&center.map)));
    }
    let monotone = distances.windows(2).all(|w| w[1].1 <= w[0].1);
    let passed = monotone && distances.last().is_some_and(|&(_, v)| v < cfg.tol.max(1e-6));
    Ok(ContinuityReport { center, distances, passed })
}

#[derive(Clone, Debug, PartialEq)]
pub struct UniquenessReport {
    pub starts: usize,
    pub reproduced: usize,
    pub diverged: usize,
    /// Converged maps farther than `1e-6` from the reference whose forward
    /// certificate also holds.
    pub distinct: Vec<EntireMap>,
}

impl UniquenessReport {
    pub fn passed(&self) -> bool {
        self.distinct.is_empty()
    }
}

/// Restarts the solver from random coefficient perturbations of size at
/// most `radius` (per real coordinate) around `reference`.
pub fn uniqueness_probe(
    spec: &EscapeSpec,
    reference: &EntireMap,
    starts: usize,
    radius: f64,
    seed: u64,
    cfg: &SolveConfig,
) -> Result<UniquenessReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = UniquenessReport { starts, reproduced: 0, diverged: 0, distinct: Vec::new() };
    for _ in 0..starts {
        let coeffs: Vec<Complex> = reference
            .coeffs()
            .iter()
            .map(|c| {
                let re: f64 = rng.random_range(-radius..=radius);
                let im: f64 = rng.random_range(-radius..=radius);
                *c + Complex::from_f64(re, im)
            })
            .collect();
        let start = EntireMap::new(coeffs)?;
        match solve(spec, &start, cfg) {
            Ok(r) if r.map.coeff_distance(reference) <= 1e-6 => report.reproduced += 1,
            Ok(r) if r.max_certificate_error() < 1e-6 => report.distinct.push(r.map),
            _ => report.diverged += 1,
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn addr(s: &str) -> ExternalAddress {
        s.parse().unwrap()
    }

    /// Real κ with `κ = log(e^20 - 1 - κ)`: the zero-ray point at
    /// potential 20 equals κ, by bisection in f64.
    fn kappa_oracle(t: f64) -> f64 {
        let ft = libm::expm1(t);
        let h = |k: f64| libm::log(ft - k) - k;
        let (mut lo, mut hi) = (t - 1.0, t + 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if h(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn linear_solver() {
        let a = vec![
            vec![Complex::from_f64(0.0, 0.0), Complex::from_f64(1.0, 0.0)],
            vec![Complex::from_f64(2.0, 1.0), Complex::from_f64(1.0, 0.0)],
        ];
        let b = vec![Complex::from_f64(3.0, 0.0), Complex::from_f64(5.0, 2.0)];
        let x = solve_linear(a.clone(), b.clone()).unwrap();
        for r in 0..2 {
            let ax = a[r][0] * x[0] + a[r][1] * x[1];
            assert!((ax - b[r]).norm_f64() < 1e-60);
        }
        assert!((x[0].to_f64().0 - 1.2).abs() < 1e-15 && (x[0].to_f64().1 - 0.4).abs() < 1e-15);
        let sing = vec![vec![Complex::ONE, Complex::ONE], vec![Complex::ONE, Complex::ONE]];
        assert_eq!(solve_linear(sing, vec![Complex::ONE, Complex::ZERO]), Err(Error::SingularJacobian));
    }

    #[test]
    fn solve_zero_ray() {
        let spec = EscapeSpec::from_f64(1, vec![addr("| 0")], &[20.0]).unwrap();
        let r = solve(&spec, &EntireMap::exponential(), &SolveConfig::default()).unwrap();
        let k = r.map.coeffs()[0];
        assert!(k.im.to_f64().abs() < 1e-30);
        assert!((k.re.to_f64() - 20.0).abs() < 0.1);
        assert!(r.max_residual() < 1e-9);
        assert!((k.re.to_f64() - kappa_oracle(20.0)).abs() < 1e-6);
    }

    #[test]
    fn fixed_point_returns_immediately() {
        let spec = EscapeSpec::from_f64(1, vec![addr("| 0")], &[20.0]).unwrap();
        let cfg = SolveConfig::default();
        let r = solve(&spec, &EntireMap::exponential(), &cfg).unwrap();
        let again = solve(&spec, &r.map, &cfg).unwrap();
        assert_eq!(again.iterations, 1);
        assert!(again.map.coeff_distance(&r.map) < cfg.tol);
    }

    #[test]
    fn solve_periodic_one() {
        let spec = EscapeSpec::from_f64(1, vec![addr("| 1")], &[20.0]).unwrap();
        let r = solve(&spec, &EntireMap::exponential(), &SolveConfig::default()).unwrap();
        let k = r.map.coeffs()[0].to_f64();
        let pred = (20.0, core::f64::consts::TAU);
        assert!(libm::hypot(k.0 - pred.0, k.1 - pred.1) < libm::exp(-10.0));
        assert!(r.certificate[0].len() >= 2);
        assert!(r.max_certificate_error() < 1e-6);
    }

    #[test]
    fn degree_two() {
        let spec = EscapeSpec::from_f64(2, vec![addr("| 0"), addr("| 1")], &[10.0, 12.0]).unwrap();
        let cfg = SolveConfig::default();
        let g0 = initial_guess(&spec, &cfg).unwrap();
        let r = solve(&spec, &g0, &cfg).unwrap();
        assert!(r.max_residual() < 1e-9);
        assert!((r.singular_values[1] - Complex::from_f64(12.0, core::f64::consts::PI)).norm_f64() < 1e-3);
        assert!(r.max_certificate_error() < 1e-6);
    }

    #[test]
    fn rejects_bad_specs() {
        let cfg = SolveConfig::default();
        let spec = EscapeSpec::new_allowing_overlap(1, vec![addr("| 0"), addr("1 | 0")], vec![Real::from(5.0); 2]).unwrap();
        assert_eq!(solve(&spec, &EntireMap::exponential(), &cfg), Err(Error::OverlapError(0, 1)));
        let spec = EscapeSpec::from_f64(1, vec![addr("| 0")], &[20.0]).unwrap();
        assert!(matches!(solve(&spec, &EntireMap::monomial(2).unwrap(), &cfg), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn constant_trace_is_constant() {
        let spec = EscapeSpec::from_f64(1, vec![addr("| 0")], &[20.0]).unwrap();
        let path = vec![vec![Real::from(20.0)]; 3];
        let tr = trace(&spec, &EntireMap::exponential(), &path, &SolveConfig::default()).unwrap();
        assert_eq!(tr[0], tr[1]);
        assert_eq!(tr[1], tr[2]);
    }

    #[test]
    fn identical_approximants_give_zero() {
        // a purely periodic address truncated after n entries and continued
        // by itself is the same address
        let spec = EscapeSpec::from_f64(1, vec![addr("| 1")], &[20.0]).unwrap();
        let probe = ProbeConfig { tail: addr("| 1"), ..ProbeConfig::new(ProbeMode::Address, 1, 3) };
        let rep = continuity_probe(&spec, &EntireMap::exponential(), &probe, &SolveConfig::default()).unwrap();
        assert!(rep.distances.iter().all(|&(_, v)| v == 0.0));
        assert!(rep.passed);
    }
}
