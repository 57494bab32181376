//! Fixed-precision real numbers carried as four non-overlapping `f64` limbs.
//!
//! A [`Real`] holds roughly 212 bits of significand with the exponent range
//! of `f64`. Ray points at large potentials are huge (`e^{dt}` with `dt` up to
//! ~700) while the quantities checked against them are absolute differences
//! of order `1e-7`, so plain doubles do not carry enough digits.
//!
//! Every operation first forms the exact sum of the partial results as a
//! floating-point expansion (error-free `two_sum` / `two_prod` transforms),
//! compresses it, and keeps the four largest components.

use core::cmp::Ordering;
use core::fmt;
use core::iter::Sum;
use core::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use core::str::FromStr;

const LIMBS: usize = 4;
const CAP: usize = 72;

const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1
const SPLIT_THRESHOLD: f64 = 6.696_928_794_914_17e299; // 2^996

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Requires `|a| >= |b|` (or `a == 0`).
#[inline]
fn fast_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    if libm::fabs(a) > SPLIT_THRESHOLD {
        let a = a * 3.725_290_298_461_914e-9; // 2^-28
        let t = SPLITTER * a;
        let hi = t - (t - a);
        let lo = a - hi;
        (hi * 268_435_456.0, lo * 268_435_456.0)
    } else {
        let t = SPLITTER * a;
        let hi = t - (t - a);
        (hi, a - hi)
    }
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

/// Exact accumulator: a non-overlapping expansion in increasing magnitude.
struct Expansion {
    e: [f64; CAP],
    len: usize,
    naive: f64,
    finite: bool,
}

impl Expansion {
    fn new() -> Self {
        Self { e: [0.0; CAP], len: 0, naive: 0.0, finite: true }
    }

    fn push(&mut self, b: f64) {
        self.naive += b;
        if !b.is_finite() {
            self.finite = false;
        }
        if !self.finite || b == 0.0 {
            return;
        }
        let mut q = b;
        let mut k = 0;
        for i in 0..self.len {
            let (s, h) = two_sum(q, self.e[i]);
            q = s;
            if h != 0.0 {
                self.e[k] = h;
                k += 1;
            }
        }
        if q != 0.0 {
            self.e[k] = q;
            k += 1;
        }
        if !q.is_finite() {
            self.finite = false;
        }
        self.len = k;
        if self.len + 2 >= CAP {
            let mut out = [0.0; CAP];
            let n = compress(&self.e[..self.len], &mut out);
            self.e[..n].copy_from_slice(&out[..n]);
            self.len = n;
        }
    }

    fn finish(&self) -> Real {
        if !self.finite {
            return Real::from_limb(self.naive);
        }
        let mut out = [0.0; CAP];
        let n = compress(&self.e[..self.len], &mut out);
        let mut c = [0.0; LIMBS];
        for (slot, v) in c.iter_mut().zip(out[..n].iter().rev()) {
            *slot = *v;
        }
        Real { c }
    }
}

/// Shewchuk's compression of an increasing non-overlapping expansion.
fn compress(e: &[f64], out: &mut [f64; CAP]) -> usize {
    let m = e.len();
    if m == 0 {
        return 0;
    }
    let mut g = [0.0; CAP];
    let mut q = e[m - 1];
    let mut bottom = m - 1;
    for i in (0..m - 1).rev() {
        let (s, lo) = fast_two_sum(q, e[i]);
        if lo != 0.0 {
            g[bottom] = s;
            bottom -= 1;
            q = lo;
        } else {
            q = s;
        }
    }
    g[bottom] = q;
    let mut top = 0;
    for &gi in &g[bottom + 1..m] {
        let (s, lo) = fast_two_sum(gi, q);
        if lo != 0.0 {
            out[top] = lo;
            top += 1;
        }
        q = s;
    }
    out[top] = q;
    top + 1
}

/// A real number with ~212 bits of precision.
#[derive(Clone, Copy, Debug, Default)]
pub struct Real {
    c: [f64; LIMBS],
}

impl Real {
    pub const ZERO: Real = Real { c: [0.0; LIMBS] };
    pub const ONE: Real = Real { c: [1.0, 0.0, 0.0, 0.0] };
    pub const PI: Real = Real {
        c: [3.141592653589793, 1.2246467991473532e-16, -2.9947698097183397e-33, 1.1124542208633653e-49],
    };
    pub const TAU: Real = Real {
        c: [6.283185307179586, 2.4492935982947064e-16, -5.989539619436679e-33, 2.2249084417267306e-49],
    };
    pub const FRAC_PI_2: Real = Real {
        c: [1.5707963267948966, 6.123233995736766e-17, -1.4973849048591698e-33, 5.562271104316826e-50],
    };
    pub const LN_2: Real = Real {
        c: [0.6931471805599453, 2.3190468138462996e-17, 5.707708438416212e-34, -3.5824322106018114e-50],
    };
    pub const E: Real = Real {
        c: [2.718281828459045, 1.4456468917292502e-16, -2.1277171080381768e-33, 1.5156301598412191e-49],
    };
    /// Unit roundoff of the representation, about `2^-209`.
    pub const EPSILON: f64 = 1.5e-63;
    pub const INFINITY: Real = Real { c: [f64::INFINITY, 0.0, 0.0, 0.0] };
    pub const NAN: Real = Real { c: [f64::NAN, 0.0, 0.0, 0.0] };

    const fn from_limb(x: f64) -> Real {
        Real { c: [x, 0.0, 0.0, 0.0] }
    }

    /// Sum of arbitrary doubles, rounded to four limbs.
    pub fn from_terms(terms: &[f64]) -> Real {
        let mut acc = Expansion::new();
        for &t in terms {
            acc.push(t);
        }
        acc.finish()
    }

    pub fn limbs(self) -> [f64; LIMBS] {
        self.c
    }

    /// Leading limb; the nearest double to the value.
    #[inline]
    pub fn hi(self) -> f64 {
        self.c[0]
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.c[0] + self.c[1]
    }

    pub fn is_finite(self) -> bool {
        self.c[0].is_finite()
    }

    pub fn is_nan(self) -> bool {
        self.c[0].is_nan()
    }

    pub fn is_zero(self) -> bool {
        self.c[0] == 0.0
    }

    pub fn is_sign_negative(self) -> bool {
        self.c[0] < 0.0
    }

    pub fn abs(self) -> Real {
        if self.c[0] < 0.0 {
            -self
        } else {
            self
        }
    }

    /// Binary exponent `e` with `|self| = m * 2^e`, `m` in `[0.5, 1)`.
    pub fn exponent(self) -> i32 {
        if self.c[0] == 0.0 || !self.c[0].is_finite() {
            return 0;
        }
        libm::frexp(self.c[0]).1
    }

    /// Exact multiplication by `2^k` (barring under/overflow).
    pub fn mul_pow2(self, k: i32) -> Real {
        Real {
            c: [
                libm::scalbn(self.c[0], k),
                libm::scalbn(self.c[1], k),
                libm::scalbn(self.c[2], k),
                libm::scalbn(self.c[3], k),
            ],
        }
    }

    pub fn mul_f64(self, b: f64) -> Real {
        let mut acc = Expansion::new();
        for &a in &self.c {
            let (p, e) = two_prod(a, b);
            acc.push(p);
            acc.push(e);
        }
        acc.finish()
    }

    pub fn square(self) -> Real {
        self * self
    }

    pub fn recip(self) -> Real {
        Real::ONE / self
    }

    pub fn floor(self) -> Real {
        let mut r = [0.0; LIMBS];
        r[0] = libm::floor(self.c[0]);
        if r[0] == self.c[0] {
            r[1] = libm::floor(self.c[1]);
            if r[1] == self.c[1] {
                r[2] = libm::floor(self.c[2]);
                if r[2] == self.c[2] {
                    r[3] = libm::floor(self.c[3]);
                }
            }
        }
        Real::from_terms(&r)
    }

    pub fn round(self) -> Real {
        (self + Real::from(0.5)).floor()
    }

    pub fn min(self, other: Real) -> Real {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Real) -> Real {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn powi(self, n: i32) -> Real {
        if n == 0 {
            return Real::ONE;
        }
        let mut base = self;
        let mut k = n.unsigned_abs();
        let mut acc = Real::ONE;
        while k > 0 {
            if k & 1 == 1 {
                acc *= base;
            }
            k >>= 1;
            if k > 0 {
                base = base.square();
            }
        }
        if n < 0 {
            acc.recip()
        } else {
            acc
        }
    }

    pub fn sqrt(self) -> Real {
        if self.c[0] == 0.0 {
            return Real::ZERO;
        }
        if self.c[0] < 0.0 || self.is_nan() {
            return Real::NAN;
        }
        if !self.is_finite() {
            return self;
        }
        let mut y = Real::from(libm::sqrt(self.c[0]));
        for _ in 0..3 {
            y = (y + self / y).mul_pow2(-1);
        }
        y
    }

    /// `e^x - 1` for `|x|` of order one or smaller, without cancellation.
    pub fn exp_m1(self) -> Real {
        if libm::fabs(self.c[0]) > 0.5 {
            return self.exp() - Real::ONE;
        }
        let r = self.mul_pow2(-10);
        let mut s = taylor_expm1(r);
        for _ in 0..10 {
            s = s * s + s.mul_pow2(1);
        }
        s
    }

    pub fn exp(self) -> Real {
        let x0 = self.c[0];
        if x0.is_nan() {
            return Real::NAN;
        }
        if x0 > 709.79 {
            return Real::INFINITY;
        }
        if x0 < -745.2 {
            return Real::ZERO;
        }
        let m = libm::round(x0 / Real::LN_2.c[0]);
        let r = (self - Real::LN_2.mul_f64(m)).mul_pow2(-10);
        let mut s = taylor_expm1(r);
        for _ in 0..10 {
            s = s * s + s.mul_pow2(1);
        }
        let out = (s + Real::ONE).mul_pow2(m as i32);
        if out.c[0].is_finite() {
            out
        } else {
            Real::INFINITY
        }
    }

    pub fn ln(self) -> Real {
        if self.c[0] < 0.0 || self.is_nan() {
            return Real::NAN;
        }
        if self.c[0] == 0.0 {
            return -Real::INFINITY;
        }
        if !self.is_finite() {
            return self;
        }
        let e = self.exponent();
        let y = self.mul_pow2(-e);
        let mut z = Real::from(libm::log(y.c[0]));
        for _ in 0..3 {
            z = z + y * (-z).exp() - Real::ONE;
        }
        z + Real::LN_2.mul_f64(e as f64)
    }

    /// `(sin x, cos x)`.
    pub fn sin_cos(self) -> (Real, Real) {
        if !self.is_finite() {
            return (Real::NAN, Real::NAN);
        }
        if self.c[0] == 0.0 {
            return (Real::ZERO, Real::ONE);
        }
        let k = libm::round(self.c[0] / Real::TAU.c[0]);
        let r = self - Real::TAU.mul_f64(k);
        let j = libm::round(r.c[0] / Real::FRAC_PI_2.c[0]);
        let t = (r - Real::FRAC_PI_2.mul_f64(j)).mul_pow2(-4);

        let t2 = t.square();
        let mut term = t;
        let mut s = t;
        let mut n = 1.0;
        loop {
            term = -(term * t2) / Real::from((n + 1.0) * (n + 2.0));
            n += 2.0;
            s += term;
            if libm::fabs(term.c[0]) <= 1e-68 * libm::fabs(s.c[0]) || term.c[0] == 0.0 {
                break;
            }
        }
        let mut c = (Real::ONE - s.square()).sqrt();
        for _ in 0..4 {
            let s2 = (s * c).mul_pow2(1);
            c = (c - s) * (c + s);
            s = s2;
        }
        match (j as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }

    pub fn sin(self) -> Real {
        self.sin_cos().0
    }

    pub fn cos(self) -> Real {
        self.sin_cos().1
    }

    /// Principal value of `atan2(y, x)` in `(-pi, pi]`.
    pub fn atan2(y: Real, x: Real) -> Real {
        if y.c[0] == 0.0 {
            return if x.c[0] < 0.0 { Real::PI } else { Real::ZERO };
        }
        if x.c[0] == 0.0 {
            return if y.c[0] > 0.0 { Real::FRAC_PI_2 } else { -Real::FRAC_PI_2 };
        }
        let e = y.exponent().max(x.exponent());
        let (y, x) = (y.mul_pow2(-e), x.mul_pow2(-e));
        let mut z = Real::from(libm::atan2(y.c[0], x.c[0]));
        for _ in 0..3 {
            let (s, c) = z.sin_cos();
            z += (y * c - x * s) / (x * c + y * s);
        }
        if z > Real::PI {
            z -= Real::TAU;
        } else if z <= -Real::PI {
            z += Real::TAU;
        }
        z
    }

    fn pow10(e: i32) -> Real {
        Real::from(10.0).powi(e)
    }

    fn write_sci(self, f: &mut fmt::Formatter<'_>, digits: usize) -> fmt::Result {
        if self.is_nan() {
            return f.write_str("NaN");
        }
        if !self.is_finite() {
            return f.write_str(if self.c[0] > 0.0 { "inf" } else { "-inf" });
        }
        if self.c[0] == 0.0 {
            return f.write_str("0");
        }
        let digits = digits.clamp(1, 64);
        let neg = self.c[0] < 0.0;
        let x = self.abs();
        let mut e10 = libm::floor(libm::log10(x.c[0])) as i32;
        let mut y = x / Real::pow10(e10);
        if y >= Real::from(10.0) {
            y = y / Real::from(10.0);
            e10 += 1;
        }
        if y < Real::ONE {
            y = y * Real::from(10.0);
            e10 -= 1;
        }
        let mut buf = [0u8; 66];
        for slot in buf.iter_mut().take(digits + 1) {
            let d = y.floor().c[0].clamp(0.0, 9.0);
            *slot = d as u8;
            y = (y - Real::from(d)) * Real::from(10.0);
        }
        if buf[digits] >= 5 {
            let mut i = digits;
            loop {
                if i == 0 {
                    // carry out of the leading digit
                    buf[0] = 1;
                    for b in buf.iter_mut().take(digits).skip(1) {
                        *b = 0;
                    }
                    e10 += 1;
                    break;
                }
                i -= 1;
                if buf[i] == 9 {
                    buf[i] = 0;
                } else {
                    buf[i] += 1;
                    break;
                }
            }
        }
        if neg {
            f.write_str("-")?;
        }
        write!(f, "{}", buf[0])?;
        if digits > 1 {
            f.write_str(".")?;
            for &b in &buf[1..digits] {
                write!(f, "{b}")?;
            }
        }
        write!(f, "e{e10}")
    }
}

fn taylor_expm1(r: Real) -> Real {
    let mut term = r;
    let mut sum = r;
    let mut n = 2.0;
    loop {
        term = term * r / Real::from(n);
        sum += term;
        if libm::fabs(term.c[0]) <= 1e-68 * libm::fabs(sum.c[0]) || term.c[0] == 0.0 {
            break;
        }
        n += 1.0;
    }
    sum
}

impl From<f64> for Real {
    fn from(x: f64) -> Real {
        Real::from_limb(x)
    }
}

impl From<i64> for Real {
    fn from(x: i64) -> Real {
        let hi = x as f64;
        let lo = (x as i128 - hi as i128) as f64;
        Real::from_terms(&[hi, lo])
    }
}

impl From<i32> for Real {
    fn from(x: i32) -> Real {
        Real::from_limb(x as f64)
    }
}

impl From<usize> for Real {
    fn from(x: usize) -> Real {
        Real::from(x as i64)
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real { c: [-self.c[0], -self.c[1], -self.c[2], -self.c[3]] }
    }
}

impl Add for Real {
    type Output = Real;
    fn add(self, rhs: Real) -> Real {
        let mut acc = Expansion::new();
        for i in (0..LIMBS).rev() {
            acc.push(self.c[i]);
            acc.push(rhs.c[i]);
        }
        acc.finish()
    }
}

impl Sub for Real {
    type Output = Real;
    fn sub(self, rhs: Real) -> Real {
        self + (-rhs)
    }
}

impl Mul for Real {
    type Output = Real;
    fn mul(self, rhs: Real) -> Real {
        let a = self.c;
        let b = rhs.c;
        if !(a[0] * b[0]).is_finite() {
            return Real::from_limb(a[0] * b[0]);
        }
        let mut acc = Expansion::new();
        // products a_i b_j with i + j = 4 only contribute at the 2^-212 level
        acc.push(a[1] * b[3]);
        acc.push(a[2] * b[2]);
        acc.push(a[3] * b[1]);
        for s in (0..LIMBS).rev() {
            for i in 0..=s {
                let (p, e) = two_prod(a[i], b[s - i]);
                acc.push(e);
                acc.push(p);
            }
        }
        acc.finish()
    }
}

impl Div for Real {
    type Output = Real;
    fn div(self, rhs: Real) -> Real {
        let b0 = rhs.c[0];
        if b0 == 0.0 || !b0.is_finite() || !self.c[0].is_finite() {
            return Real::from_limb(self.c[0] / b0);
        }
        let mut q = [0.0; 5];
        let mut r = self;
        for slot in q.iter_mut() {
            let qi = r.c[0] / b0;
            *slot = qi;
            if qi == 0.0 {
                break;
            }
            let mut acc = Expansion::new();
            for i in (0..LIMBS).rev() {
                acc.push(r.c[i]);
                let (p, e) = two_prod(rhs.c[i], qi);
                acc.push(-e);
                acc.push(-p);
            }
            r = acc.finish();
        }
        Real::from_terms(&q)
    }
}

macro_rules! forward_ops {
    ($($tr:ident $f:ident $atr:ident $af:ident),*) => {$(
        impl $tr<f64> for Real {
            type Output = Real;
            fn $f(self, rhs: f64) -> Real { $tr::$f(self, Real::from(rhs)) }
        }
        impl $tr<Real> for f64 {
            type Output = Real;
            fn $f(self, rhs: Real) -> Real { $tr::$f(Real::from(self), rhs) }
        }
        impl $atr for Real {
            fn $af(&mut self, rhs: Real) { *self = $tr::$f(*self, rhs); }
        }
        impl $atr<f64> for Real {
            fn $af(&mut self, rhs: f64) { *self = $tr::$f(*self, Real::from(rhs)); }
        }
    )*};
}

forward_ops!(
    Add add AddAssign add_assign,
    Sub sub SubAssign sub_assign,
    Mul mul MulAssign mul_assign,
    Div div DivAssign div_assign
);

impl Sum for Real {
    fn sum<I: Iterator<Item = Real>>(iter: I) -> Real {
        let mut acc = Expansion::new();
        let mut tmp = Real::ZERO;
        for (n, x) in iter.enumerate() {
            for &c in x.c.iter().rev() {
                acc.push(c);
            }
            // keep the exact accumulator bounded for long sums
            if n % 8 == 7 {
                tmp += acc.finish();
                acc = Expansion::new();
            }
        }
        tmp + acc.finish()
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Real) -> bool {
        (*self - *other).c[0] == 0.0
    }
}

impl PartialEq<f64> for Real {
    fn eq(&self, other: &f64) -> bool {
        *self == Real::from(*other)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Real) -> Option<Ordering> {
        if self.is_nan() || other.is_nan() {
            return None;
        }
        if !self.is_finite() || !other.is_finite() {
            return self.c[0].partial_cmp(&other.c[0]);
        }
        (*self - *other).c[0].partial_cmp(&0.0)
    }
}

impl PartialOrd<f64> for Real {
    fn partial_cmp(&self, other: &f64) -> Option<Ordering> {
        self.partial_cmp(&Real::from(*other))
    }
}

impl fmt::Display for Real {
    /// Scientific notation; the formatter precision sets the number of
    /// significant digits (default 40).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_sci(f, f.precision().unwrap_or(40))
    }
}

/// Error from parsing a decimal string into a [`Real`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRealError;

impl fmt::Display for ParseRealError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("invalid decimal number")
    }
}

impl core::error::Error for ParseRealError {}

impl FromStr for Real {
    type Err = ParseRealError;

    fn from_str(s: &str) -> Result<Real, ParseRealError> {
        let s = s.trim();
        match s {
            "inf" | "+inf" | "infinity" => return Ok(Real::INFINITY),
            "-inf" | "-infinity" => return Ok(-Real::INFINITY),
            "NaN" | "nan" => return Ok(Real::NAN),
            _ => {}
        }
        let bytes = s.as_bytes();
        let mut i = 0;
        let mut neg = false;
        if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
            neg = bytes[i] == b'-';
            i += 1;
        }
        let mut mantissa = Real::ZERO;
        let mut n_digits = 0;
        let mut scale: i32 = 0;
        let mut seen_point = false;
        while i < bytes.len() {
            match bytes[i] {
                b'0'..=b'9' => {
                    if n_digits < 70 {
                        mantissa = mantissa * Real::from(10.0) + Real::from((bytes[i] - b'0') as f64);
                        if seen_point {
                            scale -= 1;
                        }
                    } else if !seen_point {
                        scale += 1;
                    }
                    n_digits += 1;
                }
                b'.' if !seen_point => seen_point = true,
                b'e' | b'E' => break,
                b'_' => {}
                _ => return Err(ParseRealError),
            }
            i += 1;
        }
        if n_digits == 0 {
            return Err(ParseRealError);
        }
        if i < bytes.len() {
            let exp: i32 = s[i + 1..].parse().map_err(|_| ParseRealError)?;
            scale = scale.checked_add(exp).ok_or(ParseRealError)?;
        }
        let value = if scale >= 0 {
            mantissa * Real::pow10(scale)
        } else {
            mantissa / Real::pow10(-scale)
        };
        Ok(if neg { -value } else { value })
    }
}
