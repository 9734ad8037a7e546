//! Sample statistics against the circular complex Gaussian.

use alloc::vec::Vec;
use core::f64::consts::SQRT_2;

#[allow(unused_imports)]
use num_traits::Float;

use crate::quadrature::{pairwise_sum, pairwise_sum_real};
use crate::C64;

/// Variance of each coordinate of the limit law.
pub const COORDINATE_VARIANCE: f64 = 0.25;

/// CDF of the centered normal with the given variance.
pub fn normal_cdf(x: f64, variance: f64) -> f64 {
    0.5 * libm::erfc(-x / (SQRT_2 * variance.sqrt()))
}

/// `sup_x |F_n(x) - F(x)|`. Sorts `xs` in place.
pub fn ks_statistic(xs: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_unstable_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

pub fn ks_normal(xs: &[f64], variance: f64) -> f64 {
    let mut v = xs.to_vec();
    ks_statistic(&mut v, |x| normal_cdf(x, variance))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexMoments {
    pub mean: C64,
    /// `E|T|^2`
    pub e_abs2: f64,
    /// `E T^2`
    pub e_sq: C64,
    /// `E|T|^4`
    pub e_abs4: f64,
}

/// Raw (uncentered) moments.
pub fn complex_moments(samples: &[C64]) -> ComplexMoments {
    let m = samples.len() as f64;
    let abs2: Vec<f64> = samples.iter().map(|t| t.norm_sqr()).collect();
    let abs4: Vec<f64> = abs2.iter().map(|a| a * a).collect();
    let sq: Vec<C64> = samples.iter().map(|t| t * t).collect();
    ComplexMoments {
        mean: pairwise_sum(samples) / m,
        e_abs2: pairwise_sum_real(&abs2) / m,
        e_sq: pairwise_sum(&sq) / m,
        e_abs4: pairwise_sum_real(&abs4) / m,
    }
}
