//! Finite Blaschke products fixing the origin, their Aleksandrov-Clark
//! measures, correlation integrals of iterates, coefficient-side variance
//! formulas and a Monte Carlo harness for the central limit theorem of
//! `sum a_n f^n` on the unit circle.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, worker
//! partitioning and the command line live in the `innerlab-tools` crate.
#![no_std]
// NaN must fail argument checks, so `!(x < bound)` is intended.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod blaschke;
pub mod clark;
pub mod clt;
pub mod correlations;
mod error;
pub mod quadrature;
pub mod rng;
pub mod stats;
pub mod variance;

pub use blaschke::{BlaschkeProduct, CirclePoint, InnerMap, Iterate, TaylorJet};
pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
