//! Integration over the unit circle against normalized Lebesgue measure.

use alloc::vec::Vec;
use core::f64::consts::TAU;

#[allow(unused_imports)]
use num_traits::Float;

use crate::blaschke::InnerMap;
use crate::{rng, Error, Result, C64};

/// First grid of the doubling sequence.
pub const MIN_GRID: usize = 1 << 8;
/// Largest grid used by the degree-aware entry points.
pub const MAX_GRID: usize = 1 << 18;
/// Smallest accepted tolerance.
pub const MIN_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: C64,
    pub grid_size: usize,
    /// `|delta|` between the last two grids.
    pub est_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloResult {
    pub value: C64,
    pub samples: usize,
    pub stderr: f64,
    pub seed: u64,
}

impl MonteCarloResult {
    /// Mean and standard error of samples listed in index order.
    pub fn from_values(values: &[C64], seed: u64) -> Self {
        let m = values.len();
        let value = pairwise_sum(values) / m as f64;
        let dev: Vec<f64> = values.iter().map(|v| (v - value).norm_sqr()).collect();
        let var = if m > 1 {
            pairwise_sum_real(&dev) / (m - 1) as f64
        } else {
            0.0
        };
        Self {
            value,
            samples: m,
            stderr: (var / m as f64).sqrt(),
            seed,
        }
    }
}

/// Pairwise (cascade) summation, deterministic for a fixed input order.
pub fn pairwise_sum(xs: &[C64]) -> C64 {
    if xs.len() <= 16 {
        return xs.iter().fold(C64::new(0.0, 0.0), |a, &b| a + b);
    }
    let (l, r) = xs.split_at(xs.len() / 2);
    pairwise_sum(l) + pairwise_sum(r)
}

pub fn pairwise_sum_real(xs: &[f64]) -> f64 {
    if xs.len() <= 16 {
        return xs.iter().sum();
    }
    let (l, r) = xs.split_at(xs.len() / 2);
    pairwise_sum_real(l) + pairwise_sum_real(r)
}

/// Grid node `j` of an `n`-point grid.
pub fn node(j: usize, n: usize) -> C64 {
    C64::cis(TAU * j as f64 / n as f64)
}

/// Sum of `g` over the nodes `first, first + step, ...` of an `n`-point grid.
fn strided_sum<G: Fn(C64) -> C64>(g: &G, n: usize, first: usize, step: usize) -> C64 {
    let vals: Vec<C64> = (first..n).step_by(step).map(|j| g(node(j, n))).collect();
    pairwise_sum(&vals)
}

/// Doubles a uniform grid from 2^8 until consecutive averages agree to `tol`.
pub fn integrate<G: Fn(C64) -> C64>(g: G, tol: f64, max_grid: usize) -> Result<QuadratureResult> {
    integrate_from(g, tol, MIN_GRID, max_grid)
}

/// As [`integrate`], starting at grid `start` (a power of two).
pub fn integrate_from<G: Fn(C64) -> C64>(
    g: G,
    tol: f64,
    start: usize,
    max_grid: usize,
) -> Result<QuadratureResult> {
    if !(tol >= MIN_TOL) || !start.is_power_of_two() || max_grid < 2 * start {
        return Err(Error::InvalidArgument(
            "integrate: tol >= 1e-14, start a power of two, max_grid >= 2 start",
        ));
    }
    let mut n = start;
    let mut sum = strided_sum(&g, n, 0, 1);
    let mut value = sum / n as f64;
    loop {
        // the finer grid reuses every node of the coarse one
        let odd = strided_sum(&g, 2 * n, 1, 2);
        sum += odd;
        n *= 2;
        let next = sum / n as f64;
        let delta = (next - value).norm();
        if !delta.is_finite() {
            return Err(Error::NonFinite);
        }
        value = next;
        if delta <= tol {
            return Ok(QuadratureResult {
                value,
                grid_size: n,
                est_error: delta,
            });
        }
        if 2 * n > max_grid {
            return Err(Error::NonConvergence { grid: n, delta });
        }
    }
}

/// Vector-valued [`integrate_from`]: `g(z, out)` writes `len` values per node
/// and refinement stops once every component has settled.
pub fn integrate_vec_from<G: Fn(C64, &mut [C64])>(
    g: G,
    len: usize,
    tol: f64,
    start: usize,
    max_grid: usize,
) -> Result<(Vec<C64>, QuadratureResult)> {
    if !(tol >= MIN_TOL) || !start.is_power_of_two() || max_grid < 2 * start || len == 0 {
        return Err(Error::InvalidArgument(
            "integrate: tol >= 1e-14, start a power of two, max_grid >= 2 start",
        ));
    }
    let strided = |n: usize, first: usize, step: usize| -> Vec<C64> {
        // sequential sums over blocks of 64 nodes, pairwise across blocks
        let nodes: Vec<usize> = (first..n).step_by(step).collect();
        let mut buf = alloc::vec![C64::new(0.0, 0.0); len];
        let blocks: Vec<Vec<C64>> = nodes
            .chunks(64)
            .map(|chunk| {
                let mut acc = alloc::vec![C64::new(0.0, 0.0); len];
                for &j in chunk {
                    g(node(j, n), &mut buf);
                    for (a, b) in acc.iter_mut().zip(&buf) {
                        *a += b;
                    }
                }
                acc
            })
            .collect();
        (0..len)
            .map(|i| {
                let col: Vec<C64> = blocks.iter().map(|b| b[i]).collect();
                pairwise_sum(&col)
            })
            .collect()
    };
    let mut n = start;
    let mut sum = strided(n, 0, 1);
    let mut value: Vec<C64> = sum.iter().map(|s| s / n as f64).collect();
    loop {
        let odd = strided(2 * n, 1, 2);
        for (s, o) in sum.iter_mut().zip(&odd) {
            *s += o;
        }
        n *= 2;
        let next: Vec<C64> = sum.iter().map(|s| s / n as f64).collect();
        let delta = next
            .iter()
            .zip(&value)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if !delta.is_finite() {
            return Err(Error::NonFinite);
        }
        value = next;
        if delta <= tol {
            let head = QuadratureResult {
                value: value[0],
                grid_size: n,
                est_error: delta,
            };
            return Ok((value, head));
        }
        if 2 * n > max_grid {
            return Err(Error::NonConvergence { grid: n, delta });
        }
    }
}

/// Grid `next_pow2(4 D)` (at least 2^8) at which a degree-`D` integrand
/// starts; the first comparison is then against `8 D`.
pub fn grid_for_degree(degree: u64) -> Result<usize> {
    let top = degree
        .checked_mul(8)
        .filter(|&t| t <= MAX_GRID as u64)
        .ok_or(Error::DegreeBudgetExceeded(degree))?;
    Ok(((top / 2) as usize).next_power_of_two().max(MIN_GRID))
}

/// Quadrature of an integrand built from iterates of total degree `degree`.
/// Starting below `4 D` would let aliasing fake convergence.
pub fn integrate_for_degree<G: Fn(C64) -> C64>(
    g: G,
    degree: u64,
    tol: f64,
) -> Result<QuadratureResult> {
    let start = grid_for_degree(degree)?;
    integrate_from(g, tol, start, MAX_GRID.max(2 * start))
}

/// `g(e^{i theta_i})` for `i in offset..offset + out.len()`.
pub fn mc_fill<G: Fn(C64) -> C64>(g: &G, seed: u64, offset: u64, out: &mut [C64]) {
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = g(C64::cis(rng::angle(seed, offset + i as u64)));
    }
}

/// Mean of `g` over `m` seeded uniform angles.
pub fn mc_integrate<G: Fn(C64) -> C64>(g: G, m: usize, seed: u64) -> Result<MonteCarloResult> {
    if m < 100 {
        return Err(Error::InvalidArgument(
            "mc_integrate needs at least 100 samples",
        ));
    }
    let mut values = alloc::vec![C64::new(0.0, 0.0); m];
    mc_fill(&g, seed, 0, &mut values);
    Ok(MonteCarloResult::from_values(&values, seed))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvarianceReport {
    pub lhs: C64,
    pub rhs: C64,
    pub residual: f64,
    pub pass: bool,
}

/// Compares `∫ G∘f dm` with `∫ G dm`.
pub fn check_invariance<F, G>(f: &F, g: G, tol: f64) -> Result<InvarianceReport>
where
    F: InnerMap + ?Sized,
    G: Fn(C64) -> C64,
{
    let qtol = (tol / 10.0).max(MIN_TOL);
    let lhs = integrate(|z| g(f.boundary_value(z)), qtol, MAX_GRID)?.value;
    let rhs = integrate(&g, qtol, MAX_GRID)?.value;
    let residual = (lhs - rhs).norm();
    Ok(InvarianceReport {
        lhs,
        rhs,
        residual,
        pass: residual <= tol,
    })
}
