//! Complex numbers over [`Real`].

use core::fmt;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use crate::real::Real;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Complex {
    pub re: Real,
    pub im: Real,
}

impl Complex {
    pub const ZERO: Complex = Complex { re: Real::ZERO, im: Real::ZERO };
    pub const ONE: Complex = Complex { re: Real::ONE, im: Real::ZERO };
    pub const I: Complex = Complex { re: Real::ZERO, im: Real::ONE };

    pub fn new(re: Real, im: Real) -> Complex {
        Complex { re, im }
    }

    pub fn from_f64(re: f64, im: f64) -> Complex {
        Complex { re: Real::from(re), im: Real::from(im) }
    }

    pub fn from_real(re: Real) -> Complex {
        Complex { re, im: Real::ZERO }
    }

    pub fn to_f64(self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn is_zero(self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(self) -> Complex {
        Complex { re: self.re, im: -self.im }
    }

    pub fn scale(self, k: Real) -> Complex {
        Complex { re: self.re * k, im: self.im * k }
    }

    pub fn mul_pow2(self, k: i32) -> Complex {
        Complex { re: self.re.mul_pow2(k), im: self.im.mul_pow2(k) }
    }

    /// Multiplication by `i`.
    pub fn mul_i(self) -> Complex {
        Complex { re: -self.im, im: self.re }
    }

    fn max_exponent(self) -> i32 {
        let er = if self.re.is_zero() { i32::MIN } else { self.re.exponent() };
        let ei = if self.im.is_zero() { i32::MIN } else { self.im.exponent() };
        er.max(ei)
    }

    pub fn norm_sqr(self) -> Real {
        self.re.square() + self.im.square()
    }

    /// Modulus, scaled to avoid intermediate overflow.
    pub fn norm(self) -> Real {
        if self.is_zero() {
            return Real::ZERO;
        }
        if !self.is_finite() {
            return Real::INFINITY;
        }
        let e = self.max_exponent();
        self.mul_pow2(-e).norm_sqr().sqrt().mul_pow2(e)
    }

    pub fn norm_f64(self) -> f64 {
        self.norm().to_f64()
    }

    /// `ln |z|`, valid for any finite nonzero `z`.
    pub fn ln_norm(self) -> Real {
        if self.is_zero() {
            return -Real::INFINITY;
        }
        let e = self.max_exponent();
        self.mul_pow2(-e).norm_sqr().ln().mul_pow2(-1) + Real::LN_2 * Real::from(e)
    }

    /// Principal argument in `(-pi, pi]`.
    pub fn arg(self) -> Real {
        Real::atan2(self.im, self.re)
    }

    /// Principal logarithm.
    pub fn ln(self) -> Complex {
        Complex { re: self.ln_norm(), im: self.arg() }
    }

    pub fn exp(self) -> Complex {
        let m = self.re.exp();
        let (s, c) = self.im.sin_cos();
        Complex { re: m * c, im: m * s }
    }

    /// `e^{i theta}`.
    pub fn cis(theta: Real) -> Complex {
        let (s, c) = theta.sin_cos();
        Complex { re: c, im: s }
    }

    pub fn square(self) -> Complex {
        self * self
    }

    pub fn powu(self, n: u32) -> Complex {
        let mut acc = Complex::ONE;
        let mut base = self;
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            k >>= 1;
            if k > 0 {
                base = base.square();
            }
        }
        acc
    }

    pub fn recip(self) -> Complex {
        Complex::ONE / self
    }

    pub fn sqrt(self) -> Complex {
        if self.is_zero() {
            return Complex::ZERO;
        }
        let r = self.norm();
        let re = ((r + self.re.abs()).mul_pow2(-1)).sqrt();
        if self.re >= Real::ZERO {
            Complex { re, im: self.im / re.mul_pow2(1) }
        } else {
            let im = if self.im.is_sign_negative() { -re } else { re };
            Complex { re: self.im / im.mul_pow2(1), im }
        }
    }
}

impl From<Real> for Complex {
    fn from(re: Real) -> Complex {
        Complex::from_real(re)
    }
}

impl From<f64> for Complex {
    fn from(re: f64) -> Complex {
        Complex::from_f64(re, 0.0)
    }
}

impl Neg for Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex { re: -self.re, im: -self.im }
    }
}

impl Add for Complex {
    type Output = Complex;
    fn add(self, rhs: Complex) -> Complex {
        Complex { re: self.re + rhs.re, im: self.im + rhs.im }
    }
}

impl Sub for Complex {
    type Output = Complex;
    fn sub(self, rhs: Complex) -> Complex {
        Complex { re: self.re - rhs.re, im: self.im - rhs.im }
    }
}

impl Mul for Complex {
    type Output = Complex;
    fn mul(self, rhs: Complex) -> Complex {
        Complex {
            re: self.re * rhs.re - self.im * rhs.im,
            im: self.re * rhs.im + self.im * rhs.re,
        }
    }
}

impl Mul<Real> for Complex {
    type Output = Complex;
    fn mul(self, rhs: Real) -> Complex {
        self.scale(rhs)
    }
}

impl Div<Real> for Complex {
    type Output = Complex;
    fn div(self, rhs: Real) -> Complex {
        Complex { re: self.re / rhs, im: self.im / rhs }
    }
}

impl Div for Complex {
    type Output = Complex;
    fn div(self, rhs: Complex) -> Complex {
        if rhs.is_zero() {
            return Complex { re: self.re / Real::ZERO, im: self.im / Real::ZERO };
        }
        // scale the divisor to order one so |rhs|^2 cannot overflow
        let e = rhs.max_exponent();
        let b = rhs.mul_pow2(-e);
        let den = b.norm_sqr();
        let num = self * b.conj();
        Complex { re: (num.re / den).mul_pow2(-e), im: (num.im / den).mul_pow2(-e) }
    }
}

impl AddAssign for Complex {
    fn add_assign(&mut self, rhs: Complex) {
        *self = *self + rhs;
    }
}

impl SubAssign for Complex {
    fn sub_assign(&mut self, rhs: Complex) {
        *self = *self - rhs;
    }
}

impl MulAssign for Complex {
    fn mul_assign(&mut self, rhs: Complex) {
        *self = *self * rhs;
    }
}

impl fmt::Display for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = f.precision().unwrap_or(17);
        if self.im.is_sign_negative() {
            write!(f, "{:.p$}-{:.p$}i", self.re, -self.im)
        } else {
            write!(f, "{:.p$}+{:.p$}i", self.re, self.im)
        }
    }
}
