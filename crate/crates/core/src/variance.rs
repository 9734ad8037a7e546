//! Coefficient-side variance formulas, hypothesis checks and the block
//! splitting of a partial sum.

use alloc::vec::Vec;
use core::f64::consts::TAU;

#[allow(unused_imports)]
use num_traits::Float;

use crate::blaschke::InnerMap;
use crate::correlations::squared_moduli_integral;
use crate::quadrature::{pairwise_sum, pairwise_sum_real};
use crate::{rng, BlaschkeProduct, Error, Result, C64};

/// How a stored sequence continues past its last entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Generator {
    /// Exactly the stored values, zero afterwards.
    Explicit,
    Constant(C64),
    RandomSigns {
        seed: u64,
    },
    /// `a_n = r^n`
    Geometric {
        ratio: C64,
    },
}

/// Coefficients `a_1, ..., a_L`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSequence {
    values: Vec<C64>,
    generator: Generator,
    /// `prefix[n] = ∑_{m <= n} |a_m|^2`
    prefix: Vec<f64>,
}

impl CoefficientSequence {
    fn build(values: Vec<C64>, generator: Generator) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("coefficient sequence is empty"));
        }
        if values
            .iter()
            .any(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::NonFinite);
        }
        let mut prefix = Vec::with_capacity(values.len() + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for v in &values {
            acc += v.norm_sqr();
            prefix.push(acc);
        }
        Ok(Self {
            values,
            generator,
            prefix,
        })
    }

    pub fn explicit(values: Vec<C64>) -> Result<Self> {
        Self::build(values, Generator::Explicit)
    }

    pub fn constant(c: C64, len: usize) -> Result<Self> {
        Self::build(alloc::vec![c; len], Generator::Constant(c))
    }

    /// `a_n = ±1` with independent fair signs.
    pub fn random_signs(seed: u64, len: usize) -> Result<Self> {
        let v = (0..len as u64)
            .map(|i| C64::new(rng::sign(seed, i), 0.0))
            .collect();
        Self::build(v, Generator::RandomSigns { seed })
    }

    pub fn geometric(ratio: C64, len: usize) -> Result<Self> {
        let v = (1..=len as i32).map(|n| ratio.powi(n)).collect();
        Self::build(v, Generator::Geometric { ratio })
    }

    pub fn generator(&self) -> Generator {
        self.generator
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `a_n`, 1-indexed.
    pub fn get(&self, n: usize) -> C64 {
        self.values[n - 1]
    }

    /// `S_N^2 = ∑_{n <= N} |a_n|^2`
    pub fn s2(&self, n: usize) -> f64 {
        self.prefix[n.min(self.len())]
    }

    /// `∑_{lo < n <= hi} |a_n|^2`
    pub fn mass(&self, lo: usize, hi: usize) -> f64 {
        self.s2(hi) - self.s2(lo)
    }

    /// `∑_{n > L} |a_n|^2` for the sequence the generator describes.
    pub fn beyond_mass(&self) -> f64 {
        match self.generator {
            Generator::Explicit => 0.0,
            Generator::Constant(c) if c.norm_sqr() == 0.0 => 0.0,
            Generator::Constant(_) | Generator::RandomSigns { .. } => f64::INFINITY,
            Generator::Geometric { ratio } => {
                let r2 = ratio.norm_sqr();
                if r2 < 1.0 {
                    r2.powi(self.len() as i32 + 1) / (1.0 - r2)
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    fn check_n(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.len() {
            Err(Error::InvalidArgument(
                "N must be between 1 and the stored length",
            ))
        } else {
            Ok(())
        }
    }
}

fn check_lambda(lambda: C64) -> Result<()> {
    if !(lambda.norm() < 1.0) {
        return Err(Error::InvalidArgument("|lambda| must be below 1"));
    }
    Ok(())
}

/// `∑_{n in (lo, hi]} |a_n|^2 + 2 Re ∑_k lambda^k ∑_{n, n+k in (lo, hi]} conj(a_n) a_{n+k}`
fn range_variance(a: &CoefficientSequence, lambda: C64, lo: usize, hi: usize) -> f64 {
    let vals = &a.values[lo..hi];
    let mut cross = Vec::new();
    let mut lk = C64::new(1.0, 0.0);
    for k in 1..vals.len() {
        lk *= lambda;
        if lk.norm_sqr() == 0.0 {
            break;
        }
        let lag: Vec<C64> = (0..vals.len() - k)
            .map(|i| vals[i].conj() * vals[i + k])
            .collect();
        cross.push(lk * pairwise_sum(&lag));
    }
    a.mass(lo, hi) + 2.0 * pairwise_sum(&cross).re
}

/// `sigma_N^2` by the exact double sum.
pub fn sigma_n_squared(a: &CoefficientSequence, lambda: C64, n: usize) -> Result<f64> {
    check_lambda(lambda)?;
    a.check_n(n)?;
    Ok(range_variance(a, lambda, 0, n))
}

/// `sigma^2(N)`, the same sum over `n >= N` of the stored sequence.
pub fn tail_sigma_squared(a: &CoefficientSequence, lambda: C64, n: usize) -> Result<f64> {
    check_lambda(lambda)?;
    a.check_n(n)?;
    Ok(range_variance(a, lambda, n - 1, a.len()))
}

/// `Re (1 + lambda) / (1 - lambda)`
pub fn asymptotic_sigma_squared(lambda: C64) -> Result<f64> {
    check_lambda(lambda)?;
    let one = C64::new(1.0, 0.0);
    Ok(((one + lambda) / (one - lambda)).re)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceReport {
    pub n: usize,
    pub s2: f64,
    pub sigma2: f64,
    pub lambda: C64,
    /// `(1 + |lambda|) / (1 - |lambda|)`
    pub sandwich_c: f64,
    pub symbol_min: f64,
    pub symbol_max: f64,
}

/// Number of points of the symbol grid.
pub const SYMBOL_GRID: usize = 1 << 12;

/// `s(z) = (1 - |lambda|^2) / |1 - conj(lambda) z|^2` on a grid rotated by
/// `arg lambda`, so both extremes `z = ±lambda/|lambda|` are nodes.
pub fn symbol_range(lambda: C64) -> (f64, f64) {
    let l2 = lambda.norm_sqr();
    let phase = if l2 > 0.0 { lambda.arg() } else { 0.0 };
    (0..SYMBOL_GRID)
        .map(|j| {
            let z = C64::cis(phase + TAU * j as f64 / SYMBOL_GRID as f64);
            (1.0 - l2) / (C64::new(1.0, 0.0) - lambda.conj() * z).norm_sqr()
        })
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
            (lo.min(s), hi.max(s))
        })
}

/// Checks `S_N^2 / C <= sigma_N^2 <= C S_N^2` and the symbol extremes.
pub fn toeplitz_sandwich(a: &CoefficientSequence, lambda: C64, n: usize) -> Result<VarianceReport> {
    let sigma2 = sigma_n_squared(a, lambda, n)?;
    let s2 = a.s2(n);
    let l = lambda.norm();
    let c = (1.0 + l) / (1.0 - l);
    let (symbol_min, symbol_max) = symbol_range(lambda);
    let slack = 1e-12 * s2.max(f64::MIN_POSITIVE) * c;
    let (lower, upper) = (s2 / c, s2 * c);
    if sigma2 < lower - slack || sigma2 > upper + slack {
        return Err(Error::SandwichViolation {
            lower,
            sigma2,
            upper,
        });
    }
    if (symbol_min - 1.0 / c).abs() > 1e-9 || (symbol_max - c).abs() > 1e-9 {
        return Err(Error::SandwichViolation {
            lower: symbol_min,
            sigma2: c,
            upper: symbol_max,
        });
    }
    Ok(VarianceReport {
        n,
        s2,
        sigma2,
        lambda,
        sandwich_c: c,
        symbol_min,
        symbol_max,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxiliaryBound {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
}

/// `|∑_{n < k in A} conj(a_n) a_k lambda^{k-n}| <= |lambda| / (1 - |lambda|) ∑_{n in A} |a_n|^2`
pub fn auxiliary_bound_check(
    a: &CoefficientSequence,
    lambda: C64,
    set: &[usize],
) -> Result<AuxiliaryBound> {
    check_lambda(lambda)?;
    let mut idx = set.to_vec();
    idx.sort_unstable();
    idx.dedup();
    if idx.first() == Some(&0) || idx.last().is_some_and(|&n| n > a.len()) {
        return Err(Error::InvalidArgument("index set outside the stored range"));
    }
    let mut terms = Vec::new();
    for (i, &n) in idx.iter().enumerate() {
        for &k in &idx[i + 1..] {
            terms.push(a.get(n).conj() * a.get(k) * lambda.powi((k - n) as i32));
        }
    }
    let lhs = pairwise_sum(&terms).norm();
    let mass: Vec<f64> = idx.iter().map(|&n| a.get(n).norm_sqr()).collect();
    let l = lambda.norm();
    let rhs = l / (1.0 - l) * pairwise_sum_real(&mass);
    Ok(AuxiliaryBound {
        lhs,
        rhs,
        slack: rhs - lhs,
        pass: lhs <= rhs + 1e-12,
    })
}

fn prefix_block(a: &CoefficientSequence, n: usize) -> Result<Vec<(usize, C64)>> {
    a.check_n(n)?;
    Ok((1..=n).map(|m| (m, a.get(m))).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L2Identity {
    /// `∫ |∑ a_n f^n|^2 dm`
    pub quadrature: f64,
    pub sigma2: f64,
    pub residual: f64,
}

pub fn l2_identity_check(
    f: &BlaschkeProduct,
    a: &CoefficientSequence,
    n: usize,
) -> Result<L2Identity> {
    let block = prefix_block(a, n)?;
    let quadrature = squared_moduli_integral(f, &[&block])?;
    let sigma2 = sigma_n_squared(a, f.jet().c1, n)?;
    Ok(L2Identity {
        quadrature,
        sigma2,
        residual: (quadrature - sigma2).abs(),
    })
}

/// `‖xi‖_4 / ‖xi‖_2` for `xi = ∑_{n <= N} a_n f^n`.
pub fn l4_ratio(f: &BlaschkeProduct, a: &CoefficientSequence, n: usize) -> Result<f64> {
    let block = prefix_block(a, n)?;
    let l2 = squared_moduli_integral(f, &[&block])?;
    let l4 = squared_moduli_integral(f, &[&block, &block])?;
    Ok(l4.powf(0.25) / l2.sqrt())
}

/// A statistic along increasing `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub points: Vec<(usize, f64)>,
    /// Strictly decreasing over the tested range.
    pub holds: bool,
}

impl Trajectory {
    fn new(points: Vec<(usize, f64)>) -> Self {
        let holds = points.windows(2).all(|w| w[1].1 < w[0].1);
        Self { points, holds }
    }

    pub fn last(&self) -> Option<f64> {
        self.points.last().map(|p| p.1)
    }
}

fn check_list(a: &CoefficientSequence, ns: &[usize]) -> Result<()> {
    if ns.is_empty() || ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "N list must be nonempty and increasing",
        ));
    }
    ns.iter().try_for_each(|&n| a.check_n(n))
}

/// `sup_{n <= N} |a_n|^2 / (S_N^2)^{(1 - eta)/2}`
pub fn growth_ratio(a: &CoefficientSequence, eta: f64, n: usize) -> f64 {
    let sup = a.values[..n]
        .iter()
        .map(|v| v.norm_sqr())
        .fold(0.0, f64::max);
    sup / a.s2(n).powf((1.0 - eta) / 2.0)
}

pub fn growth_condition(a: &CoefficientSequence, eta: f64, ns: &[usize]) -> Result<Trajectory> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::InvalidArgument("eta must lie in (0, 1)"));
    }
    check_list(a, ns)?;
    Ok(Trajectory::new(
        ns.iter().map(|&n| (n, growth_ratio(a, eta, n))).collect(),
    ))
}

/// `sup_{1 <= k < N} |∑_{n <= N-k} conj(a_n) a_{n+k}| / S_N^2`
pub fn quasi_ratio(a: &CoefficientSequence, n: usize) -> f64 {
    let v = &a.values[..n];
    let sup = (1..n)
        .map(|k| {
            let lag: Vec<C64> = (0..n - k).map(|i| v[i].conj() * v[i + k]).collect();
            pairwise_sum(&lag).norm()
        })
        .fold(0.0, f64::max);
    sup / a.s2(n)
}

pub fn quasiorthogonality(a: &CoefficientSequence, ns: &[usize]) -> Result<Trajectory> {
    check_list(a, ns)?;
    Ok(Trajectory::new(
        ns.iter().map(|&n| (n, quasi_ratio(a, n))).collect(),
    ))
}

/// Blocks `(M_k, N_k]` and gaps `(N_k, M_{k+1}]` of the splitting.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitPlan {
    pub n: usize,
    pub epsilon: f64,
    pub eta: f64,
    /// `S_N^{1 + eps}`
    pub p: f64,
    /// `S_N^{1 - eps}`
    pub q: f64,
    /// `(eta - eps) / (1 - eps)`
    pub beta: f64,
    /// `(eta + eps) / (1 + eps)`
    pub gamma: f64,
    /// `(M_k, N_k)`, as half-open index ranges.
    pub xi_blocks: Vec<(usize, usize)>,
    /// `(N_k, M_{k+1})`
    pub eta_gaps: Vec<(usize, usize)>,
    /// `Q_N`, the number of complete block and gap pairs.
    pub q_count: usize,
    /// Mass after the last complete pair.
    pub residual_mass: f64,
    /// `p <= block <= 2p` and `q <= gap <= 2q` for every pair.
    pub mass_bounds_hold: bool,
    /// Gap lengths `>= q^beta`, block lengths `>= p^gamma`, `k < Q_N`.
    pub length_bounds_hold: bool,
    /// `∑_k sigma^2(xi block k) / sigma_N^2`
    pub xi_ratio: f64,
    /// The same ratio with the gaps counted as well.
    pub coverage_ratio: f64,
}

/// Greedy split of `1..=N`: each block is the shortest run with mass at
/// least `p`, each gap the shortest following run with mass at least `q`.
pub fn split_plan(
    a: &CoefficientSequence,
    n: usize,
    epsilon: f64,
    eta: f64,
    lambda: C64,
) -> Result<SplitPlan> {
    a.check_n(n)?;
    check_lambda(lambda)?;
    if !(0.0 < epsilon && epsilon < eta && eta < 1.0) {
        return Err(Error::InvalidArgument("need 0 < epsilon < eta < 1"));
    }
    let s = a.s2(n).sqrt();
    let p = s.powf(1.0 + epsilon);
    let q = s.powf(1.0 - epsilon);
    // shortest (start, end] with mass >= target, None past N
    let run = |start: usize, target: f64| -> Option<usize> {
        (start + 1..=n).find(|&e| a.mass(start, e) >= target)
    };
    let mut xi_blocks = Vec::new();
    let mut eta_gaps = Vec::new();
    let mut m = 0;
    while let Some(nk) = run(m, p) {
        let Some(mk1) = run(nk, q) else { break };
        xi_blocks.push((m, nk));
        eta_gaps.push((nk, mk1));
        m = mk1;
    }
    let q_count = xi_blocks.len();
    if q_count == 0 {
        return Err(Error::RegimeTooSmall(n));
    }
    let residual_mass = a.mass(m, n);
    let mass_bounds_hold = xi_blocks.iter().all(|&(lo, hi)| {
        let w = a.mass(lo, hi);
        p <= w && w <= 2.0 * p
    }) && eta_gaps.iter().all(|&(lo, hi)| {
        let w = a.mass(lo, hi);
        q <= w && w <= 2.0 * q
    });
    let beta = (eta - epsilon) / (1.0 - epsilon);
    let gamma = (eta + epsilon) / (1.0 + epsilon);
    let length_bounds_hold = (0..q_count - 1).all(|k| {
        let (lo, hi) = xi_blocks[k];
        let (glo, ghi) = eta_gaps[k];
        (ghi - glo) as f64 >= q.powf(beta) && (hi - lo) as f64 >= p.powf(gamma)
    });
    let sigma2 = sigma_n_squared(a, lambda, n)?;
    let xi: Vec<f64> = xi_blocks
        .iter()
        .map(|&(lo, hi)| range_variance(a, lambda, lo, hi))
        .collect();
    let gaps: Vec<f64> = eta_gaps
        .iter()
        .map(|&(lo, hi)| range_variance(a, lambda, lo, hi))
        .collect();
    let xi_sum = pairwise_sum_real(&xi);
    Ok(SplitPlan {
        n,
        epsilon,
        eta,
        p,
        q,
        beta,
        gamma,
        xi_blocks,
        eta_gaps,
        q_count,
        residual_mass,
        mass_bounds_hold,
        length_bounds_hold,
        xi_ratio: xi_sum / sigma2,
        coverage_ratio: (xi_sum + pairwise_sum_real(&gaps)) / sigma2,
    })
}

/// One row of a variance sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceRow {
    pub n: usize,
    pub s2: f64,
    pub sigma2: f64,
    /// Partial-variance ratio of the split, `NaN` below the regime.
    pub ratio: f64,
    pub growth_ratio: f64,
    pub quasi_ratio: f64,
    pub q_count: usize,
}

pub fn variance_row(
    a: &CoefficientSequence,
    lambda: C64,
    n: usize,
    epsilon: f64,
    eta: f64,
) -> Result<VarianceRow> {
    let report = toeplitz_sandwich(a, lambda, n)?;
    let (ratio, q_count) = match split_plan(a, n, epsilon, eta, lambda) {
        Ok(plan) => (plan.xi_ratio, plan.q_count),
        Err(Error::RegimeTooSmall(_)) => (f64::NAN, 0),
        Err(e) => return Err(e),
    };
    Ok(VarianceRow {
        n,
        s2: report.s2,
        sigma2: report.sigma2,
        ratio,
        growth_ratio: growth_ratio(a, eta, n),
        quasi_ratio: quasi_ratio(a, n),
        q_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use core::f64::consts::TAU;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn ones(n: usize) -> CoefficientSequence {
        CoefficientSequence::constant(c(1.0, 0.0), n).unwrap()
    }

    #[test]
    fn sigma_small_case() {
        assert_eq!(sigma_n_squared(&ones(3), c(0.5, 0.0), 3).unwrap(), 5.5);
    }

    #[test]
    fn sigma_large_n_matches_asymptotic() {
        let n = 10_000;
        let s = sigma_n_squared(&ones(n), c(0.5, 0.0), n).unwrap();
        let target = n as f64 * asymptotic_sigma_squared(c(0.5, 0.0)).unwrap();
        assert!((s / target - 1.0).abs() < 1e-3);
    }

    #[test]
    fn asymptotic_values() {
        assert_eq!(asymptotic_sigma_squared(c(0.0, 0.0)).unwrap(), 1.0);
        assert!((asymptotic_sigma_squared(c(0.5, 0.0)).unwrap() - 3.0).abs() < 1e-15);
        assert!((asymptotic_sigma_squared(c(-0.9, 0.0)).unwrap() - 0.1 / 1.9).abs() < 1e-15);
        assert!(asymptotic_sigma_squared(c(1.0, 0.0)).is_err());
    }

    #[test]
    fn tail_geometric() {
        let len = 20;
        let a = CoefficientSequence::geometric(c(0.5, 0.0), len).unwrap();
        for n in [1, 3, 7] {
            let got = tail_sigma_squared(&a, c(0.0, 0.0), n).unwrap();
            let want =
                4f64.powi(-(n as i32)) * 4.0 / 3.0 - 4f64.powi(-(len as i32) - 1) * 4.0 / 3.0;
            assert!((got - want).abs() < 1e-15, "{n}: {got} {want}");
        }
        let zeros =
            CoefficientSequence::explicit(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(tail_sigma_squared(&zeros, c(0.3, 0.1), 2).unwrap(), 0.0);
    }

    #[test]
    fn beyond_mass_by_generator() {
        assert_eq!(ones(5).beyond_mass(), f64::INFINITY);
        let g = CoefficientSequence::geometric(c(0.5, 0.0), 10).unwrap();
        assert!((g.beyond_mass() - 0.25f64.powi(11) / 0.75).abs() < 1e-20);
        assert_eq!(
            CoefficientSequence::explicit(vec![c(1.0, 0.0)])
                .unwrap()
                .beyond_mass(),
            0.0
        );
    }

    #[test]
    fn symbol_extremes() {
        let (lo, hi) = symbol_range(c(0.5, 0.0));
        assert!((lo - 1.0 / 3.0).abs() < 1e-9 && (hi - 3.0).abs() < 1e-9);
        let (lo, hi) = symbol_range(C64::from_polar(0.7, 1.234));
        assert!((lo - 0.3 / 1.7).abs() < 1e-9 && (hi - 1.7 / 0.3).abs() < 1e-9);
    }

    #[test]
    fn sandwich_zero_lambda() {
        let a = CoefficientSequence::random_signs(3, 50).unwrap();
        let r = toeplitz_sandwich(&a, c(0.0, 0.0), 50).unwrap();
        assert_eq!(r.sigma2, r.s2);
        assert_eq!(r.sandwich_c, 1.0);
    }

    #[test]
    fn sandwich_random_sequences() {
        for seed in 0..100u64 {
            let v = (0..200u64)
                .map(|i| {
                    c(
                        2.0 * rng::uniform(seed, 2 * i) - 1.0,
                        2.0 * rng::uniform(seed, 2 * i + 1) - 1.0,
                    )
                })
                .collect();
            let a = CoefficientSequence::explicit(v).unwrap();
            toeplitz_sandwich(&a, c(0.0, 0.7), 200).unwrap();
        }
    }

    #[test]
    fn auxiliary_bound_cases() {
        let a = ones(30);
        let set: Vec<usize> = (1..=30).collect();
        let r = auxiliary_bound_check(&a, c(0.0, 0.0), &set).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert!(r.pass);
        let r = auxiliary_bound_check(&a, c(0.5, 0.0), &set).unwrap();
        let closed: f64 = (1..30).map(|j| 0.5f64.powi(j) * (30 - j) as f64).sum();
        assert!((r.lhs - closed).abs() < 1e-12);
        assert!(r.pass && r.rhs == 30.0);
        let s = CoefficientSequence::random_signs(11, 500).unwrap();
        let sparse: Vec<usize> = (1..=500).filter(|n| n % 3 != 0).collect();
        assert!(
            auxiliary_bound_check(&s, c(0.9, 0.0), &sparse)
                .unwrap()
                .pass
        );
    }

    #[test]
    fn l2_identity_cases() {
        let z2 = BlaschkeProduct::monomial(2).unwrap();
        let r = l2_identity_check(&z2, &ones(4), 4).unwrap();
        assert!((r.quadrature - 4.0).abs() < 1e-10 && r.residual < 1e-10);
        let f = BlaschkeProduct::with_zero(c(0.5, 0.0)).unwrap();
        let r = l2_identity_check(&f, &ones(3), 3).unwrap();
        assert!((r.sigma2 - 5.5).abs() < 1e-15 && r.residual < 1e-9);
        let single =
            CoefficientSequence::explicit(vec![c(0.0, 0.0), c(0.6, -0.8), c(0.0, 0.0)]).unwrap();
        let r = l2_identity_check(&f, &single, 3).unwrap();
        assert!((r.sigma2 - 1.0).abs() < 1e-15 && r.residual < 1e-10);
    }

    #[test]
    fn l2_identity_family() {
        let maps = [
            BlaschkeProduct::monomial(2).unwrap(),
            BlaschkeProduct::with_zero(c(0.5, 0.0)).unwrap(),
            BlaschkeProduct::with_zero(C64::from_polar(0.4, 2.0)).unwrap(),
            BlaschkeProduct::new(&[c(0.0, 0.0), c(0.3, 0.0)], c(0.0, 1.0)).unwrap(),
        ];
        for f in &maps {
            for n in [1, 5, 10] {
                let a = CoefficientSequence::random_signs(n as u64, n).unwrap();
                assert!(l2_identity_check(f, &a, n).unwrap().residual < 1e-8);
            }
        }
    }

    #[test]
    fn l4_ratio_cases() {
        let z2 = BlaschkeProduct::monomial(2).unwrap();
        let r = l4_ratio(&z2, &ones(8), 8).unwrap();
        assert!(r > 1.0 && r <= 1.5, "{r}");
        let single = CoefficientSequence::explicit(vec![c(0.0, 0.0), c(2.0, 0.0)]).unwrap();
        let f = BlaschkeProduct::with_zero(c(0.5, 0.0)).unwrap();
        assert!((l4_ratio(&f, &single, 2).unwrap() - 1.0).abs() < 1e-10);
        let a = CoefficientSequence::random_signs(5, 6).unwrap();
        assert!(l4_ratio(&f, &a, 6).unwrap().is_finite());
    }

    #[test]
    fn growth_trajectories() {
        let ns = [10, 100, 1000, 10_000];
        let t = growth_condition(&ones(10_000), 0.5, &ns).unwrap();
        assert!(t.holds);
        for &(n, r) in &t.points {
            assert!((r - (n as f64).powf(-0.25)).abs() < 1e-12);
        }
        let pow = CoefficientSequence::geometric(c(2.0, 0.0), 40).unwrap();
        assert!(!growth_condition(&pow, 0.5, &[5, 10, 20, 40]).unwrap().holds);
        let quarter = CoefficientSequence::explicit(
            (1..=10_000)
                .map(|n| c((n as f64).powf(0.25), 0.0))
                .collect(),
        )
        .unwrap();
        // sup grows like N^{1/2} against (S_N^2)^{1/4} ~ N^{3/8}
        let t = growth_condition(&quarter, 0.5, &ns).unwrap();
        assert!(!t.holds);
        for &(n, r) in &t.points {
            let s2: f64 = (1..=n).map(|m| (m as f64).sqrt()).sum();
            assert!((r - (n as f64).sqrt() / s2.powf(0.25)).abs() < 1e-9);
        }
    }

    #[test]
    fn quasiorthogonality_trajectories() {
        let ns = [10, 100, 1000];
        let t = quasiorthogonality(&ones(1000), &ns).unwrap();
        assert!(!t.holds || t.last().unwrap() > 0.99);
        for &(n, r) in &t.points {
            assert!((r - (n - 1) as f64 / n as f64).abs() < 1e-12);
        }
        let alt = CoefficientSequence::explicit(
            (0..1000)
                .map(|i| c(if i % 2 == 0 { 1.0 } else { -1.0 }, 0.0))
                .collect(),
        )
        .unwrap();
        let t = quasiorthogonality(&alt, &ns).unwrap();
        assert!(t.last().unwrap() >= 998.0 / 1000.0);
        let signs = CoefficientSequence::random_signs(7, 4000).unwrap();
        let t = quasiorthogonality(&signs, &[40, 400, 4000]).unwrap();
        assert!(t.holds && t.last().unwrap() < 0.1, "{:?}", t.points);
    }

    #[test]
    fn split_first_block_and_gap() {
        let plan = split_plan(&ones(100), 100, 0.2, 0.5, c(0.0, 0.0)).unwrap();
        assert!((plan.p - 10f64.powf(1.2)).abs() < 1e-12);
        assert!((plan.q - 10f64.powf(0.8)).abs() < 1e-12);
        assert_eq!(plan.xi_blocks[0], (0, 16));
        assert_eq!(plan.eta_gaps[0], (16, 23));
        assert_eq!(plan.q_count, 4);
        assert!(plan.q_count as f64 * (plan.p + plan.q) <= 100.0);
        // with lambda = 0 the ratio is the covered block mass
        assert!((plan.xi_ratio - 64.0 / 100.0).abs() < 1e-15);
    }

    #[test]
    fn split_sweep_bounds() {
        let a = ones(1600);
        let mut last = 0.0;
        for n in [100, 400, 1600] {
            let plan = split_plan(&a, n, 0.2, 0.5, c(0.5, 0.0)).unwrap();
            assert!(plan.mass_bounds_hold && plan.length_bounds_hold, "{n}");
            assert!(plan.xi_ratio > last);
            assert!(plan.coverage_ratio > plan.xi_ratio);
            last = plan.xi_ratio;
        }
    }

    #[test]
    fn split_too_small() {
        assert!(matches!(
            split_plan(&ones(3), 3, 0.2, 0.5, c(0.0, 0.0)),
            Err(Error::RegimeTooSmall(3))
        ));
    }

    #[test]
    fn variance_row_fields() {
        let row = variance_row(&ones(400), c(0.5, 0.0), 400, 0.2, 0.5).unwrap();
        assert_eq!(row.s2, 400.0);
        assert!(row.q_count > 0 && row.ratio > 0.0 && row.ratio < 1.0);
        let row = variance_row(&ones(3), c(0.5, 0.0), 3, 0.2, 0.5).unwrap();
        assert!(row.ratio.is_nan() && row.q_count == 0);
    }

    fn seq() -> impl Strategy<Value = Vec<(f64, f64)>> {
        proptest::collection::vec((-3.0..3.0f64, -3.0..3.0f64), 1..60)
    }

    proptest! {
        #[test]
        fn zero_lambda_is_mass(v in seq()) {
            let a = CoefficientSequence::explicit(v.iter().map(|&(x, y)| c(x, y)).collect()).unwrap();
            let n = a.len();
            prop_assert_eq!(sigma_n_squared(&a, c(0.0, 0.0), n).unwrap(), a.s2(n));
        }

        #[test]
        fn sandwich_always_holds(v in seq(), r in 0.0..0.95f64, t in 0.0..TAU) {
            let a = CoefficientSequence::explicit(v.iter().map(|&(x, y)| c(x, y)).collect()).unwrap();
            prop_assert!(toeplitz_sandwich(&a, C64::from_polar(r, t), a.len()).is_ok());
        }

        #[test]
        fn full_tail_is_full_sum(v in seq(), r in 0.0..0.95f64, t in 0.0..TAU) {
            let a = CoefficientSequence::explicit(v.iter().map(|&(x, y)| c(x, y)).collect()).unwrap();
            let l = C64::from_polar(r, t);
            prop_assert_eq!(tail_sigma_squared(&a, l, 1).unwrap(), sigma_n_squared(&a, l, a.len()).unwrap());
        }

        #[test]
        fn s2_nondecreasing(v in seq()) {
            let a = CoefficientSequence::explicit(v.iter().map(|&(x, y)| c(x, y)).collect()).unwrap();
            for n in 1..a.len() {
                prop_assert!(a.s2(n) <= a.s2(n + 1));
            }
        }
    }
}
