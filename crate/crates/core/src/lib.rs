//! Dynamic rays, cluster combinatorics and singular-value realization for
//! entire maps of the form `g = p ∘ exp` with `p` a monic polynomial.
//!
//! The crate is `no_std` (it needs `alloc`). All numerics run on [`Real`],
//! a fixed ~212-bit floating type, because ray points at large potentials
//! have enormous modulus while the checks performed on them are absolute.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod addresses;
pub mod certificates;
pub mod clusters;
pub mod complex;
pub mod entiremap;
pub mod error;
pub mod escape;
pub mod rays;
pub mod real;
pub mod solver;


pub use addresses::{ExternalAddress, GrowthFn, Wedge};
pub use complex::Complex;
pub use entiremap::EntireMap;
pub use rays::{RayConfig, RaySample};

pub use error::{Error, Result};
pub use escape::EscapeSpec;
pub use solver::{SolveConfig, SolveResult};
pub use certificates::CertificateReport;


pub use real::Real;
