//! Monte Carlo sampling of normalized sums `∑ a_n f^n` at uniform boundary
//! points and the Gaussian diagnostics of the resulting samples.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::blaschke::{InnerMap, DEFAULT_MAX_ITERATE};
use crate::correlations::squared_moduli_integral;
use crate::quadrature::{self, pairwise_sum};
use crate::stats::{complex_moments, ks_normal, COORDINATE_VARIANCE};
use crate::variance::{
    asymptotic_sigma_squared, sigma_n_squared, tail_sigma_squared, CoefficientSequence,
};
use crate::{BlaschkeProduct, CirclePoint, Error, Result, C64};

/// Fewest samples accepted by [`simulate`].
pub const MIN_SAMPLES: usize = 1_000;
/// Fewest samples for which [`gauss_report`] computes KS distances.
pub const MIN_KS_SAMPLES: usize = 10_000;
/// Largest allowed ratio of unstored to stored tail mass.
pub const TRUNCATION_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Normalization {
    /// `∑_{n <= N} a_n f^n / (√2 sigma_N)`
    Main,
    /// `∑_{n <= N} a_n f^n / √(2 N sigma^2)` with the limiting `sigma^2`.
    Corollary,
    /// `∑_{n >= N} a_n f^n / (√2 sigma(N))` over the stored tail.
    Tail,
}

/// A normalized sum ready to be evaluated along boundary orbits.
#[derive(Debug, Clone)]
pub struct NormalizedSum<'a> {
    f: &'a BlaschkeProduct,
    a: &'a CoefficientSequence,
    n: usize,
    normalization: Normalization,
    first: usize,
    last: usize,
    scale: f64,
}

impl<'a> NormalizedSum<'a> {
    pub fn new(
        f: &'a BlaschkeProduct,
        a: &'a CoefficientSequence,
        n: usize,
        normalization: Normalization,
    ) -> Result<Self> {
        Self::with_cap(f, a, n, normalization, DEFAULT_MAX_ITERATE)
    }

    /// As [`NormalizedSum::new`] with a different bound on the orbit length.
    pub fn with_cap(
        f: &'a BlaschkeProduct,
        a: &'a CoefficientSequence,
        n: usize,
        normalization: Normalization,
        orbit_cap: usize,
    ) -> Result<Self> {
        if n == 0 || n > a.len() {
            return Err(Error::InvalidArgument(
                "N must be between 1 and the stored length",
            ));
        }
        let lambda = f.jet().c1;
        let (first, last, variance) = match normalization {
            Normalization::Main => (1, n, sigma_n_squared(a, lambda, n)?),
            Normalization::Corollary => (1, n, n as f64 * asymptotic_sigma_squared(lambda)?),
            Normalization::Tail => {
                let tail = a.mass(n - 1, a.len());
                let beyond = a.beyond_mass();
                if !(beyond <= TRUNCATION_LIMIT * tail) {
                    return Err(Error::TruncationTooHeavy { beyond, tail });
                }
                (n, a.len(), tail_sigma_squared(a, lambda, n)?)
            }
        };
        if last > orbit_cap {
            return Err(Error::IterateCapExceeded {
                requested: last,
                cap: orbit_cap,
            });
        }
        Ok(Self {
            f,
            a,
            n,
            normalization,
            first,
            last,
            scale: (2.0 * variance).sqrt(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    /// The divisor, `√2 sigma` for the chosen variance.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Unnormalized sum at a unimodular `z`, one pass along the orbit.
    pub fn raw(&self, z: C64) -> C64 {
        let mut w = z;
        let mut acc = C64::new(0.0, 0.0);
        for k in 1..=self.last {
            w = self.f.boundary_value(w);
            if k >= self.first {
                acc += self.a.get(k) * w;
            }
        }
        acc
    }

    /// `T` at `z`; zero when the normalizing variance vanishes.
    pub fn eval(&self, z: C64) -> C64 {
        if self.scale == 0.0 {
            return C64::new(0.0, 0.0);
        }
        self.raw(z) / self.scale
    }

    pub fn sample(&self, theta: CirclePoint) -> C64 {
        self.eval(theta.to_complex())
    }
}

/// `T_N(e^{i theta})` with the main normalization.
pub fn sample_t(
    f: &BlaschkeProduct,
    a: &CoefficientSequence,
    n: usize,
    theta: CirclePoint,
) -> Result<C64> {
    Ok(NormalizedSum::new(f, a, n, Normalization::Main)?.sample(theta))
}

/// Writes samples `offset .. offset + out.len()` of the seeded run.
pub fn simulate_into(sum: &NormalizedSum<'_>, seed: u64, offset: u64, out: &mut [C64]) {
    quadrature::mc_fill(&|z| sum.eval(z), seed, offset, out);
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    pub samples: Vec<C64>,
    pub n: usize,
    pub seed: u64,
    pub normalization: Normalization,
}

impl EmpiricalDistribution {
    /// Wraps samples produced elsewhere, e.g. by a parallel fill.
    pub fn from_samples(sum: &NormalizedSum<'_>, seed: u64, samples: Vec<C64>) -> Result<Self> {
        if samples.len() < MIN_SAMPLES {
            return Err(Error::InsufficientSamples {
                got: samples.len(),
                needed: MIN_SAMPLES,
            });
        }
        Ok(Self {
            samples,
            n: sum.n,
            seed,
            normalization: sum.normalization,
        })
    }

    pub fn m(&self) -> usize {
        self.samples.len()
    }
}

pub fn simulate(sum: &NormalizedSum<'_>, m: usize, seed: u64) -> Result<EmpiricalDistribution> {
    if m < MIN_SAMPLES {
        return Err(Error::InsufficientSamples {
            got: m,
            needed: MIN_SAMPLES,
        });
    }
    let mut samples = alloc::vec![C64::new(0.0, 0.0); m];
    simulate_into(sum, seed, 0, &mut samples);
    EmpiricalDistribution::from_samples(sum, seed, samples)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub mean: f64,
    pub abs2: f64,
    pub sq: f64,
    pub abs4: f64,
    pub ks: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            mean: 0.01,
            abs2: 0.01,
            sq: 0.02,
            abs4: 0.05,
            ks: 0.02,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussFitReport {
    pub samples: usize,
    pub mean: C64,
    pub e_abs2: f64,
    pub e_sq: C64,
    pub e_abs4: f64,
    pub ks_re: f64,
    pub ks_im: f64,
    pub pass: bool,
}

/// Compares the samples with the circular complex Gaussian of
/// `E|T|^2 = 1/2`, whose coordinates are independent `N(0, 1/4)`.
pub fn gauss_report(dist: &EmpiricalDistribution, tol: &Tolerances) -> Result<GaussFitReport> {
    gauss_report_samples(&dist.samples, tol)
}

pub fn gauss_report_samples(samples: &[C64], tol: &Tolerances) -> Result<GaussFitReport> {
    if samples.len() < MIN_KS_SAMPLES {
        return Err(Error::InsufficientSamples {
            got: samples.len(),
            needed: MIN_KS_SAMPLES,
        });
    }
    let m = complex_moments(samples);
    let re: Vec<f64> = samples.iter().map(|t| t.re).collect();
    let im: Vec<f64> = samples.iter().map(|t| t.im).collect();
    let ks_re = ks_normal(&re, COORDINATE_VARIANCE);
    let ks_im = ks_normal(&im, COORDINATE_VARIANCE);
    let pass = m.mean.norm() <= tol.mean
        && (m.e_abs2 - 0.5).abs() <= tol.abs2
        && m.e_sq.norm() <= tol.sq
        && (m.e_abs4 - 0.5).abs() <= tol.abs4
        && ks_re <= tol.ks
        && ks_im <= tol.ks;
    Ok(GaussFitReport {
        samples: samples.len(),
        mean: m.mean,
        e_abs2: m.e_abs2,
        e_sq: m.e_sq,
        e_abs4: m.e_abs4,
        ks_re,
        ks_im,
        pass,
    })
}

/// Diagnostics for the tail sum from `N` on.
pub fn tails_run(
    f: &BlaschkeProduct,
    a: &CoefficientSequence,
    n: usize,
    m: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<GaussFitReport> {
    let sum = NormalizedSum::new(f, a, n, Normalization::Tail)?;
    gauss_report(&simulate(&sum, m, seed)?, tol)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureMoments {
    /// `‖T_N‖_2^2`
    pub norm2: f64,
    /// `∫ T_N^2 dm`
    pub mean_square: C64,
}

/// Exact second moments of `T_N` (main normalization) by quadrature.
pub fn quadrature_moments(
    f: &BlaschkeProduct,
    a: &CoefficientSequence,
    n: usize,
) -> Result<QuadratureMoments> {
    let sum = NormalizedSum::new(f, a, n, Normalization::Main)?;
    if sum.scale == 0.0 {
        return Err(Error::InvalidArgument("coefficients vanish up to N"));
    }
    let block: Vec<(usize, C64)> = (1..=n).map(|k| (k, a.get(k))).collect();
    let s2 = sum.scale * sum.scale;
    let norm2 = squared_moduli_integral(f, &[&block])? / s2;
    let d = f.degree() as u64;
    let degree = u32::try_from(n - 1)
        .ok()
        .and_then(|e| d.checked_pow(e))
        .and_then(|v| v.checked_mul(2))
        .ok_or(Error::DegreeBudgetExceeded(u64::MAX))?;
    // f^1 .. f^N evaluated at w = f(z) as f^0 .. f^{N-1}
    let g = |w: C64| {
        let mut v = w;
        let mut terms = Vec::with_capacity(n);
        for k in 1..=n {
            terms.push(a.get(k) * v);
            v = f.boundary_value(v);
        }
        let s = pairwise_sum(&terms);
        s * s
    };
    let mean_square = quadrature::integrate_for_degree(g, degree, 1e-12)?.value / s2;
    Ok(QuadratureMoments { norm2, mean_square })
}
