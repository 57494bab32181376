//! Annular sectors `A_{x,n}` around 1.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::addresses::GrowthFn;
use crate::complex::Complex;
use crate::error::{Error, Result};

/// `{α : |log|α|| < b, |Arg α| < b}` with `b = Σ_{j<=n} e^{-F^j(x)/3}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SectorSet {
    pub x: f64,
    pub n: usize,
    pub d: usize,
    bound: f64,
}

impl SectorSet {
    pub fn new(x: f64, n: usize, d: usize) -> Result<Self> {
        if !(x > 0.0) {
            return Err(Error::InvalidArgument("sector parameter x must be positive"));
        }
        let f = GrowthFn::new(d)?;
        let mut bound = 0.0;
        let mut y = x;
        for _ in 0..=n {
            bound += libm::exp(-y / 3.0);
            y = f.apply_f64(y);
        }
        Ok(SectorSet { x, n, d, bound })
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// `max(|log|α||, |Arg α|) - bound`; negative inside.
    pub fn slack(&self, alpha: Complex) -> Result<f64> {
        if alpha.is_zero() {
            return Err(Error::ZeroInput);
        }
        let log_mod = alpha.ln_norm().to_f64().abs();
        let arg = alpha.arg().to_f64().abs();
        Ok(log_mod.max(arg) - self.bound)
    }

    pub fn contains(&self, alpha: Complex) -> Result<bool> {
        Ok(self.slack(alpha)? < 0.0)
    }

    pub fn slack_f64(&self, re: f64, im: f64) -> Result<f64> {
        if re == 0.0 && im == 0.0 {
            return Err(Error::ZeroInput);
        }
        let log_mod = libm::log(libm::hypot(re, im)).abs();
        Ok(log_mod.max(libm::atan2(im, re).abs()) - self.bound)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProductLawReport {
    pub x: f64,
    pub k: usize,
    pub samples: usize,
    pub violations: usize,
    /// Largest `max(|log|Π||, |Arg Π|) / bound` seen; below 1 means inside.
    pub worst_ratio: f64,
}

impl ProductLawReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Draws `α_i ∈ A_{F^{i-1}(x),0}` for `i = 1..=k` and checks that the
/// product lies in `A_{x,k-1}`.
pub fn sector_product_law(x: f64, k: usize, d: usize, samples: usize, seed: u64) -> Result<ProductLawReport> {
    if k == 0 {
        return Err(Error::InvalidArgument("need at least one factor"));
    }
    let f = GrowthFn::new(d)?;
    let target = SectorSet::new(x, k - 1, d)?;
    let mut factor_bounds = alloc::vec::Vec::with_capacity(k);
    let mut y = x;
    for _ in 0..k {
        factor_bounds.push(SectorSet::new(y, 0, d)?.bound());
        y = f.apply_f64(y);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0;
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let (mut re, mut im) = (1.0f64, 0.0f64);
        for &b in &factor_bounds {
            // u in the open interval (-1, 1); for far-out factors b underflows
            // and the factor is exactly 1, which still lies in the set
            let draw = |rng: &mut ChaCha8Rng| loop {
                let u: f64 = rng.random_range(-1.0..1.0);
                if u > -1.0 {
                    return u * b;
                }
            };
            let lm = draw(&mut rng);
            let ar = draw(&mut rng);
            let r = libm::exp(lm);
            let (ar_re, ar_im) = (r * libm::cos(ar), r * libm::sin(ar));
            let nre = re * ar_re - im * ar_im;
            im = re * ar_im + im * ar_re;
            re = nre;
        }
        let slack = target.slack_f64(re, im)?;
        worst = worst.max((slack + target.bound()) / target.bound());
        if slack >= 0.0 {
            violations += 1;
        }
    }
    Ok(ProductLawReport { x, k, samples, violations, worst_ratio: worst })
}
