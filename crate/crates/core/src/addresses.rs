//! External addresses, the growth function `F(t) = exp(dt) - 1`, and wedges.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::real::Real;

/// An eventually periodic integer sequence `prefix cycle cycle ...`.
///
/// Always stored in normal form: the cycle is primitive and the prefix does
/// not end with the cycle's last entry, so structural equality is equality of
/// sequences.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExternalAddress {
    prefix: Vec<i64>,
    cycle: Vec<i64>,
}

impl ExternalAddress {
    pub fn new(prefix: Vec<i64>, cycle: Vec<i64>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::EmptyCycle);
        }
        let mut a = ExternalAddress { prefix, cycle };
        a.normalize();
        Ok(a)
    }

    /// Purely periodic address `(c0 c1 ...)` repeated.
    pub fn periodic(cycle: Vec<i64>) -> Result<Self> {
        Self::new(Vec::new(), cycle)
    }

    /// The constant address `(n n n ...)`.
    pub fn constant(n: i64) -> Self {
        ExternalAddress { prefix: Vec::new(), cycle: alloc::vec![n] }
    }

    fn normalize(&mut self) {
        let n = self.cycle.len();
        if let Some(p) = (1..=n).find(|&p| n % p == 0 && (p..n).all(|i| self.cycle[i] == self.cycle[i - p])) {
            self.cycle.truncate(p);
        }
        while let Some(&last) = self.prefix.last() {
            if last != *self.cycle.last().unwrap() {
                break;
            }
            self.prefix.pop();
            self.cycle.rotate_right(1);
        }
    }

    pub fn prefix(&self) -> &[i64] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[i64] {
        &self.cycle
    }

    pub fn entry(&self, i: usize) -> i64 {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// `sigma(s)`: drop the first entry.
    pub fn shift(&self) -> Self {
        if self.prefix.is_empty() {
            let mut cycle = self.cycle.clone();
            cycle.rotate_left(1);
            ExternalAddress { prefix: Vec::new(), cycle }
        } else {
            ExternalAddress { prefix: self.prefix[1..].to_vec(), cycle: self.cycle.clone() }
        }
    }

    pub fn shift_by(&self, k: usize) -> Self {
        let p = self.prefix.len();
        if k <= p {
            return ExternalAddress { prefix: self.prefix[k..].to_vec(), cycle: self.cycle.clone() };
        }
        let mut cycle = self.cycle.clone();
        let r = (k - p) % cycle.len();
        cycle.rotate_left(r);
        ExternalAddress { prefix: Vec::new(), cycle }
    }

    /// `(n s0 s1 ...)`.
    pub fn prepend(&self, n: i64) -> Self {
        let mut prefix = Vec::with_capacity(self.prefix.len() + 1);
        prefix.push(n);
        prefix.extend_from_slice(&self.prefix);
        let mut a = ExternalAddress { prefix, cycle: self.cycle.clone() };
        a.normalize();
        a
    }

    /// First `n` entries of `self` followed by `tail`.
    pub fn splice(&self, n: usize, tail: &ExternalAddress) -> Self {
        let head: Vec<i64> = (0..n).map(|i| self.entry(i)).collect();
        let mut prefix = head;
        prefix.extend_from_slice(&tail.prefix);
        let mut a = ExternalAddress { prefix, cycle: tail.cycle.clone() };
        a.normalize();
        a
    }

    /// Index after which the sequence is periodic with period `period()`.
    pub fn preperiod(&self) -> usize {
        self.prefix.len()
    }

    pub fn period(&self) -> usize {
        self.cycle.len()
    }

    pub fn max_abs_entry(&self) -> i64 {
        self.prefix.iter().chain(self.cycle.iter()).map(|v| v.abs()).max().unwrap_or(0)
    }

    /// Whether `sigma^k(self) = sigma^l(other)` for some `k, l >= 0`.
    ///
    /// Shifts of a normalized address eventually run through the rotations
    /// of its cycle, so the question reduces to comparing cycles up to
    /// rotation.
    pub fn overlapping(&self, other: &ExternalAddress) -> bool {
        let (a, b) = (&self.cycle, &other.cycle);
        if a.len() != b.len() {
            return false;
        }
        let n = a.len();
        (0..n).any(|r| (0..n).all(|i| a[(i + r) % n] == b[i]))
    }

    /// Infimal potential `t_s`; zero for every bounded address.
    pub fn min_potential(&self) -> f64 {
        0.0
    }

    /// `sup_{n >= 1} |s_n| / F^n(t)`.
    pub fn growth_diagnostic(&self, d: usize, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::InvalidArgument("diagnostic potential must be positive"));
        }
        if d == 0 {
            return Err(Error::InvalidDegree(d));
        }
        let big = self.max_abs_entry() as f64;
        let f = GrowthFn::new(d)?;
        let mut x = t;
        let mut sup = 0.0f64;
        for n in 1usize.. {
            x = f.apply_f64(x);
            if !x.is_finite() {
                break;
            }
            sup = sup.max(self.entry(n).unsigned_abs() as f64 / x);
            // later terms are at most big / F^n(t)
            if big / x <= sup {
                break;
            }
        }
        Ok(sup)
    }
}

impl fmt::Display for ExternalAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.prefix {
            write!(f, "{v} ")?;
        }
        f.write_str("|")?;
        for v in &self.cycle {
            write!(f, " {v}")?;
        }
        Ok(())
    }
}

impl FromStr for ExternalAddress {
    type Err = Error;

    /// Parses `"s0 s1 | c0 c1"`; the bar is mandatory and the cycle nonempty.
    fn from_str(s: &str) -> Result<Self> {
        let (pre, cyc) = s.split_once('|').ok_or(Error::ParseAddress("missing '|' separator"))?;
        let parse = |part: &str| -> Result<Vec<i64>> {
            part.split(|c: char| c.is_whitespace() || c == ',')
                .filter(|w| !w.is_empty())
                .map(|w| w.parse::<i64>().map_err(|_| Error::ParseAddress("entries must be integers")))
                .collect()
        };
        if cyc.contains('|') {
            return Err(Error::ParseAddress("more than one '|'"));
        }
        let prefix = parse(pre)?;
        let cycle = parse(cyc)?;
        if cycle.is_empty() {
            return Err(Error::EmptyCycle);
        }
        ExternalAddress::new(prefix, cycle)
    }
}

impl ExternalAddress {
    pub fn to_text(&self) -> String {
        alloc::format!("{self}")
    }
}

/// The growth function `F(t) = exp(dt) - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GrowthFn {
    d: usize,
}

impl GrowthFn {
    pub fn new(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidDegree(d));
        }
        Ok(GrowthFn { d })
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn apply(&self, t: Real) -> Result<Real> {
        let v = (t * Real::from(self.d)).exp_m1();
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Overflow)
        }
    }

    /// Double-precision `F`, saturating to infinity.
    pub fn apply_f64(&self, t: f64) -> f64 {
        libm::expm1(self.d as f64 * t)
    }

    /// `F^n(t)`.
    pub fn iterate(&self, t: Real, n: usize) -> Result<Real> {
        let mut x = t;
        for _ in 0..n {
            x = self.apply(x)?;
        }
        Ok(x)
    }

    /// `F'(x) = d exp(dx)`.
    pub fn derivative(&self, x: Real) -> Result<Real> {
        let v = (x * Real::from(self.d)).exp() * Real::from(self.d);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Overflow)
        }
    }

    /// `(F^h)'(t) = prod_{j<h} F'(F^j(t))`.
    pub fn derivative_iter(&self, t: Real, h: usize) -> Result<Real> {
        let mut x = t;
        let mut acc = Real::ONE;
        for _ in 0..h {
            acc *= self.derivative(x)?;
            if !acc.is_finite() {
                return Err(Error::Overflow);
            }
            x = self.apply(x)?;
        }
        Ok(acc)
    }
}

/// `W_{t,K}` around `center`: addresses whose entries at indices `i > 0`
/// satisfy `|s_i - center_i|^{2d} < K F^i(t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Wedge {
    pub center: ExternalAddress,
    pub t: f64,
    pub k: f64,
    pub d: usize,
}

impl Wedge {
    pub fn new(center: ExternalAddress, t: f64, k: f64, d: usize) -> Result<Self> {
        if !(t > 0.0) || !(k > 0.0) {
            return Err(Error::InvalidArgument("wedge needs t > 0 and K > 0"));
        }
        if d == 0 {
            return Err(Error::InvalidDegree(d));
        }
        Ok(Wedge { center, t, k, d })
    }

    pub fn contains(&self, s: &ExternalAddress) -> bool {
        wedge_contains(self, s)
    }
}

pub fn wedge_contains(w: &Wedge, s: &ExternalAddress) -> bool {
    let f = GrowthFn { d: w.d };
    let exp = (2 * w.d) as i32;
    let p = s.preperiod().max(w.center.preperiod());
    let l = lcm(s.period(), w.center.period());
    let diff = |i: usize| (s.entry(i) as i128 - w.center.entry(i) as i128).unsigned_abs() as f64;
    // differences are periodic from index p on, so this bounds all i >= 1
    let worst = (1..p + l + 1).map(diff).fold(0.0f64, f64::max);
    let worst_pow = libm::pow(worst, exp as f64);
    let mut x = w.t;
    for i in 1.. {
        x = f.apply_f64(x);
        let allowed = w.k * x;
        if libm::pow(diff(i), exp as f64) >= allowed {
            return false;
        }
        if allowed > worst_pow {
            return true;
        }
    }
    unreachable!()
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}
