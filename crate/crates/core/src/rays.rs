//! Dynamic rays: seed deep along the orbit of the potential, then pull back
//! through the inverse branches named by the address.

use alloc::vec::Vec;

use crate::addresses::{ExternalAddress, GrowthFn};
use crate::complex::Complex;
use crate::entiremap::EntireMap;
use crate::error::{Error, Result};
use crate::real::Real;

const MAX_DEPTH: usize = 4096;
/// Relative floor of the arithmetic, folded into every error bound.
const ARITH_FLOOR: f64 = 1e-58;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RayConfig {
    /// Target bound on the seed error `e^{-F^k(t)/2}`.
    pub tol: f64,
    /// Seeds are placed at potential at least this large when representable.
    pub r_big: f64,
}

impl Default for RayConfig {
    fn default() -> Self {
        RayConfig { tol: 1e-10, r_big: 1e6 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RaySample {
    pub address: ExternalAddress,
    pub potential: Real,
    pub position: Complex,
    pub depth: usize,
    pub err_bound: f64,
    pub degree: usize,
}

/// `t + 2πi s_0 / d`, the leading term of the ray asymptotics.
pub fn asymptotic_center(s: &ExternalAddress, t: Real, d: usize) -> Complex {
    let im = Real::TAU * Real::from(s.entry(0)) / Real::from(d);
    Complex::new(t, im)
}

/// Orbit `t, F(t), ..., F^k(t)` up to the chosen seed depth.
fn seed_orbit(g: &EntireMap, t: Real, cfg: &RayConfig) -> Result<Vec<Real>> {
    let f = GrowthFn::new(g.degree())?;
    let floor = cfg.r_big.max(g.r_min());
    let r_min = g.r_min();
    let small_enough = |x: Real| libm::exp(-x.to_f64() / 2.0) < cfg.tol;
    let mut orbit = alloc::vec![t];
    loop {
        let x = *orbit.last().unwrap();
        if x.to_f64() >= floor && small_enough(x) {
            return Ok(orbit);
        }
        let next = match f.apply(x) {
            Ok(v) if orbit.len() <= MAX_DEPTH => v,
            _ => {
                // R_big is out of reach; use the deepest level that still
                // clears the branch threshold and the tolerance
                while let Some(&x) = orbit.last() {
                    if x.to_f64() >= r_min && small_enough(x) {
                        return Ok(orbit);
                    }
                    orbit.pop();
                }
                return Err(Error::DepthOverflow { t: t.to_f64() });
            }
        };
        orbit.push(next);
    }
}

fn pull_back(
    g: &EntireMap,
    s: &ExternalAddress,
    t: Real,
    orbit: &[Real],
) -> Result<RaySample> {
    let d = g.degree();
    let k = orbit.len() - 1;
    let xk = orbit[k];
    let mut z = asymptotic_center(&s.shift_by(k), xk, d);
    let mut log_contraction = 0.0f64;
    for j in (0..k).rev() {
        z = g.inverse_branch(z, s.entry(j))?;
        log_contraction -= g.derivative(z).map(|v| v.ln_norm().to_f64()).unwrap_or(f64::INFINITY);
    }
    let scale: f64 = 1.0 + g.coeffs().iter().map(|c| c.norm_f64()).sum::<f64>();
    let seed_err = scale * libm::exp(-xk.to_f64() / 2.0 + log_contraction);
    let err_bound = seed_err + ARITH_FLOOR * z.norm_f64().max(1.0);
    Ok(RaySample { address: s.clone(), potential: t, position: z, depth: k, err_bound, degree: d })
}

/// The point of potential `t` on the ray with address `s`.
pub fn ray_point(g: &EntireMap, s: &ExternalAddress, t: Real, cfg: &RayConfig) -> Result<RaySample> {
    if !(t > Real::ZERO) {
        return Err(Error::InvalidArgument("potential must exceed the minimal potential 0"));
    }
    if !(cfg.tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive"));
    }
    let orbit = seed_orbit(g, t, cfg)?;
    pull_back(g, s, t, &orbit)
}

/// Same as [`ray_point`] with the seed depth forced to `k`.
pub fn ray_point_at_depth(g: &EntireMap, s: &ExternalAddress, t: Real, k: usize) -> Result<RaySample> {
    if !(t > Real::ZERO) {
        return Err(Error::InvalidArgument("potential must exceed the minimal potential 0"));
    }
    let f = GrowthFn::new(g.degree())?;
    let mut orbit = alloc::vec![t];
    for _ in 0..k {
        let x = f.apply(*orbit.last().unwrap()).map_err(|_| Error::DepthOverflow { t: t.to_f64() })?;
        orbit.push(x);
    }
    pull_back(g, s, t, &orbit)
}

/// `n` ray points at geometrically spaced potentials in `[t_lo, t_hi]`.
pub fn ray_sample(
    g: &EntireMap,
    s: &ExternalAddress,
    t_lo: f64,
    t_hi: f64,
    n: usize,
    cfg: &RayConfig,
) -> Result<Vec<RaySample>> {
    if !(t_lo > 0.0 && t_lo < t_hi) {
        return Err(Error::InvalidArgument("need 0 < t_lo < t_hi"));
    }
    if n < 2 {
        return Err(Error::InvalidArgument("need at least two samples"));
    }
    let ratio = t_hi / t_lo;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let t = if i == n - 1 {
            t_hi
        } else {
            t_lo * libm::pow(ratio, i as f64 / (n - 1) as f64)
        };
        out.push(ray_point(g, s, Real::from(t), cfg)?);
    }
    // snap each sample to the 2πi-translate nearest its predecessor
    for i in 1..n {
        let prev = out[i - 1].position.im.to_f64();
        let cur = out[i].position.im.to_f64();
        let turns = libm::round((prev - cur) / core::f64::consts::TAU);
        if turns != 0.0 {
            out[i].position.im += Real::TAU * Real::from(turns);
        }
    }
    Ok(out)
}

/// `|position - t - 2πi s_0/d| e^{t/2}`.
pub fn asymptotic_residual(sample: &RaySample) -> f64 {
    let center = asymptotic_center(&sample.address, sample.potential, sample.degree);
    let dev = (sample.position - center).norm();
    (dev * (sample.potential.mul_pow2(-1)).exp()).to_f64()
}
