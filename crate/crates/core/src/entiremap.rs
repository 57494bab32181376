//! Maps `g = p ∘ exp` with `p` monic of degree `d`.

use alloc::vec::Vec;

use crate::complex::Complex;
use crate::error::{Error, Result};
use crate::real::Real;

const NEWTON_BUDGET: usize = 100;
const NEWTON_REL_TOL: f64 = 1e-58;
const HOMOTOPY_STEPS: usize = 16;
const RESIDUAL_TOL: f64 = 1e-12;

/// `p(ζ) = ζ^d + c_{d-1} ζ^{d-1} + ... + c_0`, composed with `exp`.
#[derive(Clone, Debug, PartialEq)]
pub struct EntireMap {
    coeffs: Vec<Complex>,
}

/// Singular values with their origin kept: the asymptotic value `p(0)` and
/// one `(critical point, critical value)` pair per root of `p'`.
#[derive(Clone, Debug)]
pub struct LabeledSingularValues {
    pub asymptotic: Complex,
    pub critical: Vec<(Complex, Complex)>,
}

impl EntireMap {
    /// `coeffs[k]` is `c_k`; the degree is `coeffs.len()`.
    pub fn new(coeffs: Vec<Complex>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidDegree(0));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("coefficients must be finite"));
        }
        Ok(EntireMap { coeffs })
    }

    pub fn from_f64(coeffs: &[(f64, f64)]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&(re, im)| Complex::from_f64(re, im)).collect())
    }

    /// `exp` itself.
    pub fn exponential() -> Self {
        EntireMap { coeffs: alloc::vec![Complex::ZERO] }
    }

    /// `exp(z) + kappa`.
    pub fn exp_plus(kappa: Complex) -> Self {
        EntireMap { coeffs: alloc::vec![kappa] }
    }

    /// `exp(z)^d`.
    pub fn monomial(d: usize) -> Result<Self> {
        Self::new(alloc::vec![Complex::ZERO; d])
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    pub fn coeffs_f64(&self) -> Vec<(f64, f64)> {
        self.coeffs.iter().map(|c| c.to_f64()).collect()
    }

    /// Euclidean distance between coefficient vectors.
    pub fn coeff_distance(&self, other: &EntireMap) -> f64 {
        self.coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(a, b)| (*a - *b).norm_sqr())
            .sum::<Real>()
            .sqrt()
            .to_f64()
    }

    /// Point `(1-u) self + u other` on the straight coefficient segment.
    pub fn lerp(&self, other: &EntireMap, u: Real) -> EntireMap {
        let coeffs = self
            .coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(a, b)| *a + (*b - *a).scale(u))
            .collect();
        EntireMap { coeffs }
    }

    /// `p(ζ)`.
    pub fn poly(&self, zeta: Complex) -> Complex {
        let mut acc = Complex::ONE;
        for c in self.coeffs.iter().rev() {
            acc = acc * zeta + *c;
        }
        acc
    }

    /// `p'(ζ)`.
    pub fn poly_deriv(&self, zeta: Complex) -> Complex {
        let d = self.degree();
        let mut acc = Complex::from(Real::from(d));
        for k in (1..d).rev() {
            acc = acc * zeta + self.coeffs[k].scale(Real::from(k));
        }
        acc
    }

    /// `g(z) = p(e^z)`.
    pub fn evaluate(&self, z: Complex) -> Result<Complex> {
        let v = self.poly(z.exp());
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Overflow)
        }
    }

    /// `g'(z) = p'(e^z) e^z`.
    pub fn derivative(&self, z: Complex) -> Result<Complex> {
        let zeta = z.exp();
        let v = self.poly_deriv(zeta) * zeta;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Overflow)
        }
    }

    /// `(log|g(z)|, arg g(z))`, usable when `g(z)` itself overflows.
    pub fn evaluate_log(&self, z: Complex) -> Result<(Real, Real)> {
        let d = self.degree();
        if z.re < Real::from(600.0 / d as f64) {
            let v = self.evaluate(z)?;
            if v.is_zero() {
                return Err(Error::ZeroInput);
            }
            return Ok((v.ln_norm(), v.arg()));
        }
        // g = e^{dz} (1 + sum c_k e^{(k-d) z})
        let mut tail = Complex::ONE;
        for (k, c) in self.coeffs.iter().enumerate() {
            let m = Real::from(k as i64 - d as i64);
            tail += *c * (z.scale(m)).exp();
        }
        let dz = z.scale(Real::from(d));
        let lg = dz.re + tail.ln_norm();
        let mut arg = dz.im + tail.arg();
        let turns = (arg / Real::TAU).round();
        arg -= Real::TAU * turns;
        if arg <= -Real::PI {
            arg += Real::TAU;
        }
        Ok((lg, arg))
    }

    /// Roots of `p'`.
    pub fn critical_points(&self) -> Vec<Complex> {
        let d = self.degree();
        match d {
            1 => Vec::new(),
            2 => alloc::vec![-self.coeffs[1].mul_pow2(-1)],
            3 => {
                // ζ² + (2 c2 / 3) ζ + c1 / 3
                let third = Real::ONE / Real::from(3.0);
                let b = self.coeffs[2].scale(third).mul_pow2(1);
                let c = self.coeffs[1].scale(third);
                let (r1, r2) = quadratic_roots(b, c);
                alloc::vec![r1, r2]
            }
            _ => {
                let dd = Real::from(d);
                let monic: Vec<Complex> =
                    (1..d).map(|k| self.coeffs[k].scale(Real::from(k) / dd)).collect();
                durand_kerner(&monic)
            }
        }
    }

    /// `{p(0)} ∪ {p(w) : p'(w) = 0, |w| > eps}`, deduplicated within `eps`.
    pub fn singular_values(&self, eps: f64) -> Vec<Complex> {
        let mut out = alloc::vec![self.coeffs[0]];
        for w in self.critical_points() {
            if w.norm_f64() <= eps {
                continue;
            }
            let v = self.poly(w);
            if out.iter().all(|u| (*u - v).norm_f64() > eps) {
                out.push(v);
            }
        }
        out
    }

    /// Singular values keyed by their critical point; a critical point at 0
    /// makes the map unusable for the solver.
    pub fn labeled_singular_values(&self, eps: f64) -> Result<LabeledSingularValues> {
        let mut critical = Vec::new();
        for w in self.critical_points() {
            if w.norm_f64() <= eps {
                return Err(Error::DegenerateMap);
            }
            critical.push((w, self.poly(w)));
        }
        Ok(LabeledSingularValues { asymptotic: self.coeffs[0], critical })
    }

    /// `4 (1 + sum |c_k|)^2`.
    pub fn r_min(&self) -> f64 {
        let s: f64 = self.coeffs.iter().map(|c| c.norm_f64()).sum();
        4.0 * (1.0 + s) * (1.0 + s)
    }

    /// The preimage of `w` labeled `s`: root sector `s mod d`, log sheet
    /// `floor(s / d)`.
    pub fn inverse_branch(&self, w: Complex, s: i64) -> Result<Complex> {
        let d = self.degree();
        let modulus = w.norm_f64();
        let threshold = self.r_min();
        if !(modulus >= threshold) {
            return Err(Error::BelowThreshold { modulus, threshold });
        }
        let r = s.rem_euclid(d as i64);
        let n = (s - r) / d as i64;
        let theta0 = (w.arg().to_f64() + core::f64::consts::TAU * r as f64) / d as f64;
        let radius = libm::exp(w.ln_norm().to_f64() / d as f64);
        let lead = Complex::from_f64(radius * libm::cos(theta0), radius * libm::sin(theta0));
        let shift = self.coeffs[d - 1].scale(Real::ONE / Real::from(d));

        let zeta = match self.newton(lead - shift, w) {
            Some(z) => z,
            None => self.homotopy(lead, w).ok_or(Error::NoConvergence)?,
        };
        let resid = ((self.poly(zeta) - w).norm() / w.norm()).to_f64();
        if !(resid < RESIDUAL_TOL) {
            return Err(Error::NoConvergence);
        }
        let arg = zeta.arg();
        let turns = libm::round((theta0 - arg.to_f64()) / core::f64::consts::TAU);
        let im = arg + Real::TAU * Real::from(turns + n as f64);
        Ok(Complex::new(zeta.ln_norm(), im))
    }

    fn newton_on(&self, mut zeta: Complex, w: Complex, lambda: Option<Real>) -> Option<Complex> {
        for _ in 0..NEWTON_BUDGET {
            let (f, df) = match lambda {
                None => (self.poly(zeta) - w, self.poly_deriv(zeta)),
                Some(l) => self.homotopy_eval(zeta, w, l),
            };
            if df.is_zero() {
                return None;
            }
            let step = f / df;
            zeta -= step;
            if !zeta.is_finite() {
                return None;
            }
            if step.norm_f64() <= NEWTON_REL_TOL * zeta.norm_f64() {
                return Some(zeta);
            }
        }
        None
    }

    fn newton(&self, start: Complex, w: Complex) -> Option<Complex> {
        self.newton_on(start, w, None)
    }

    /// `ζ^d + λ Σ c_k ζ^k - w` and its derivative.
    fn homotopy_eval(&self, zeta: Complex, w: Complex, lambda: Real) -> (Complex, Complex) {
        let d = self.degree();
        let mut low = Complex::ZERO;
        let mut dlow = Complex::ZERO;
        for k in (0..d).rev() {
            dlow = dlow * zeta + low;
            low = low * zeta + self.coeffs[k];
        }
        let zd1 = zeta.powu(d as u32 - 1);
        let f = zd1 * zeta + low.scale(lambda) - w;
        let df = zd1.scale(Real::from(d)) + dlow.scale(lambda);
        (f, df)
    }

    /// Continue the root of `ζ^d = w` at `lead` to `p(ζ) = w`.
    fn homotopy(&self, lead: Complex, w: Complex) -> Option<Complex> {
        let mut zeta = lead;
        for step in 1..=HOMOTOPY_STEPS {
            let lambda = Real::from(step as f64 / HOMOTOPY_STEPS as f64);
            zeta = self.newton_on(zeta, w, Some(lambda))?;
        }
        Some(zeta)
    }
}

/// Roots of `ζ² + bζ + c`, computed without cancellation.
fn quadratic_roots(b: Complex, c: Complex) -> (Complex, Complex) {
    let disc = (b.square() - c.mul_pow2(2)).sqrt();
    let plus = b + disc;
    let minus = b - disc;
    let big = if plus.norm() >= minus.norm() { plus } else { minus };
    if big.is_zero() {
        return (Complex::ZERO, Complex::ZERO);
    }
    let q = -big.mul_pow2(-1);
    (q, c / q)
}

/// All roots of the monic polynomial `ζ^n + a_{n-1} ζ^{n-1} + ... + a_0`.
fn durand_kerner(a: &[Complex]) -> Vec<Complex> {
    let n = a.len();
    let eval = |z: Complex| {
        let mut acc = Complex::ONE;
        for c in a.iter().rev() {
            acc = acc * z + *c;
        }
        acc
    };
    let bound = 1.0 + a.iter().map(|c| c.norm_f64()).fold(0.0, f64::max);
    let seed = Complex::from_f64(0.4, 0.9);
    let mut roots: Vec<Complex> = (0..n)
        .map(|k| seed.powu(k as u32).scale(Real::from(bound)))
        .collect();
    for _ in 0..500 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let mut den = Complex::ONE;
            for j in 0..n {
                if i != j {
                    den *= roots[i] - roots[j];
                }
            }
            if den.is_zero() {
                continue;
            }
            let step = eval(roots[i]) / den;
            roots[i] -= step;
            delta = delta.max(step.norm_f64() / (1.0 + roots[i].norm_f64()));
        }
        if delta < 1e-58 {
            break;
        }
    }
    roots
}
