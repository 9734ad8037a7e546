//! Aleksandrov-Clark measures of finite Blaschke products and their moments.
//!
//! For `f(0) = 0` and `|alpha| = 1`, `mu_alpha` is the probability measure
//! with an atom of mass `1/|f'(zeta)|` at every solution of `f(zeta) = alpha`.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

#[allow(unused_imports)]
use num_traits::Float;

use crate::blaschke::{CirclePoint, InnerMap, Iterate};
use crate::quadrature::{self, MAX_GRID};
use crate::{BlaschkeProduct, Error, Result, C64};

/// Largest measure handled by [`clark_measure`].
pub const MAX_ATOMS: usize = 4096;
const COARSE_GRID: usize = 1 << 12;
const FINE_GRID: usize = 1 << 16;
const ANGLE_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct ClarkMeasure {
    pub alpha: CirclePoint,
    /// `(theta_j, weight_j)` in increasing angle.
    pub atoms: Vec<(CirclePoint, f64)>,
    pub source_degree: usize,
}

impl ClarkMeasure {
    pub fn weight_sum(&self) -> f64 {
        let w: Vec<f64> = self.atoms.iter().map(|a| a.1).collect();
        quadrature::pairwise_sum_real(&w)
    }

    /// `∫ z^p dmu`, any integer `p`.
    pub fn moment(&self, p: i32) -> C64 {
        self.integrate(|z| z.powi(p))
    }

    /// `∑ w_j g(zeta_j)`
    pub fn integrate<G: Fn(C64) -> C64>(&self, g: G) -> C64 {
        let terms: Vec<C64> = self
            .atoms
            .iter()
            .map(|&(t, w)| g(t.to_complex()) * w)
            .collect();
        quadrature::pairwise_sum(&terms)
    }
}

/// Angle of `w / v` for unimodular `w`, `v`.
fn rel_angle(w: C64, v: C64) -> f64 {
    (w * v.conj()).arg()
}

/// Atoms of `mu_alpha` for `f` by phase unwrapping and bisection. For an
/// iterate `f^n` the atoms are pulled back one step at a time through `f`,
/// since the phase of `f^n` moves too fast for any fixed grid.
pub fn clark_measure<F: InnerMap + ?Sized>(f: &F, alpha: CirclePoint) -> Result<ClarkMeasure> {
    let d = f.degree();
    if d == 0 || d > MAX_ATOMS {
        return Err(Error::InvalidArgument(
            "clark_measure needs 1 <= degree <= 4096",
        ));
    }
    let start = [alpha.to_complex()];
    let points = match f.as_iterate() {
        Some((base, n)) => {
            let table = PhaseTable::build(base)?;
            let mut points = start.to_vec();
            for _ in 0..n {
                points = table.pull_back(base, &points)?;
            }
            points
        }
        None => PhaseTable::build(f)?.pull_back(f, &start)?,
    };
    if points.len() != d {
        return Err(Error::RootBracketFailure {
            found: points.len(),
            expected: d,
        });
    }
    let mut atoms = points
        .into_iter()
        .map(|z| {
            let t = CirclePoint::from_complex(z)?;
            Ok((t, 1.0 / f.boundary_derivative(t.to_complex()).norm()))
        })
        .collect::<Result<Vec<_>>>()?;
    atoms.sort_by(|x, y| x.0.theta().total_cmp(&y.0.theta()));
    Ok(ClarkMeasure {
        alpha,
        atoms,
        source_degree: d,
    })
}

/// Boundary values of a map on a uniform grid with their lifted phase.
struct PhaseTable {
    grid: usize,
    values: Vec<C64>,
    lifted: Vec<f64>,
}

impl PhaseTable {
    /// Unwraps on 2^12 nodes, retrying on 2^16.
    fn build<F: InnerMap + ?Sized>(f: &F) -> Result<Self> {
        match Self::unwrap(f, COARSE_GRID) {
            Err(Error::RootBracketFailure { .. }) => Self::unwrap(f, FINE_GRID),
            other => other,
        }
    }

    fn unwrap<F: InnerMap + ?Sized>(f: &F, grid: usize) -> Result<Self> {
        let d = f.degree();
        let fail = Err(Error::RootBracketFailure {
            found: 0,
            expected: d,
        });
        let values: Vec<C64> = (0..=grid)
            .map(|j| f.boundary_value(quadrature::node(j % grid, grid)))
            .collect();
        let mut lifted = Vec::with_capacity(grid + 1);
        lifted.push(values[0].arg());
        for j in 0..grid {
            let step = rel_angle(values[j + 1], values[j]);
            if !(step > 0.0) {
                return fail;
            }
            lifted.push(lifted[j] + step);
        }
        if (lifted[grid] - lifted[0] - TAU * d as f64).abs() > PI {
            return fail;
        }
        Ok(Self {
            grid,
            values,
            lifted,
        })
    }

    /// All solutions of `f(zeta) = beta` for each `beta` in `targets`.
    fn pull_back<F: InnerMap + ?Sized>(&self, f: &F, targets: &[C64]) -> Result<Vec<C64>> {
        let d = f.degree();
        let mut out = Vec::with_capacity(d * targets.len());
        for &beta in targets {
            // lifted phase of f / beta is lifted - offset
            let rel0 = rel_angle(self.values[0], beta);
            let offset = self.lifted[0] - rel0;
            let first = (rel0 / TAU).ceil() as i64;
            for k in first..first + d as i64 {
                let target = TAU * k as f64 + offset;
                let j = self
                    .lifted
                    .partition_point(|&x| x <= target)
                    .saturating_sub(1)
                    .min(self.grid - 1);
                let theta = bisect(f, self.values[j], self.lifted[j], target, self.grid, j);
                out.push(C64::cis(theta));
            }
        }
        Ok(out)
    }
}

/// Root of `lifted phase = target` inside grid cell `j`. Within one cell the
/// phase moves by less than pi, so it is unwrapped relative to the left end.
fn bisect<F: InnerMap + ?Sized>(
    f: &F,
    left_value: C64,
    left_phase: f64,
    target: f64,
    grid: usize,
    j: usize,
) -> f64 {
    let h = TAU / grid as f64;
    let mut lo = h * j as f64;
    let mut hi = h * (j + 1) as f64;
    while hi - lo > ANGLE_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let phase = left_phase + rel_angle(f.boundary_value(C64::cis(mid)), left_value);
        if phase < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `|∫ z dmu_alpha - conj(f'(0)) alpha|`
pub fn check_first_moment<F: InnerMap + ?Sized>(f: &F, alpha: CirclePoint) -> Result<f64> {
    let mu = clark_measure(f, alpha)?;
    let target = f.jet().c1.conj() * alpha.to_complex();
    Ok((mu.moment(1) - target).norm())
}

/// `|∫ z^2 dmu_alpha - conj(c2) alpha - conj(c1)^2 alpha^2|`
pub fn check_second_moment<F: InnerMap + ?Sized>(f: &F, alpha: CirclePoint) -> Result<f64> {
    let mu = clark_measure(f, alpha)?;
    let jet = f.jet();
    let a = alpha.to_complex();
    let target = jet.c2.conj() * a + jet.c1.conj() * jet.c1.conj() * a * a;
    Ok((mu.moment(2) - target).norm())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Desintegration {
    /// `∫ (∫ G dmu_alpha) dm(alpha)`
    pub value: C64,
    /// `∫ G dm`
    pub reference: C64,
    pub residual: f64,
}

/// Averages the Clark integrals of `g` over `k_alpha` uniform values of alpha
/// and compares with the Lebesgue integral.
pub fn desintegrate<F, G>(f: &F, g: G, k_alpha: usize) -> Result<Desintegration>
where
    F: InnerMap + ?Sized,
    G: Fn(C64) -> C64,
{
    if k_alpha < 64 {
        return Err(Error::InvalidArgument("desintegrate needs k_alpha >= 64"));
    }
    let inner = (0..k_alpha)
        .map(|j| {
            let alpha = CirclePoint::new(TAU * j as f64 / k_alpha as f64)?;
            Ok(clark_measure(f, alpha)?.integrate(&g))
        })
        .collect::<Result<Vec<C64>>>()?;
    let value = quadrature::pairwise_sum(&inner) / k_alpha as f64;
    let reference = quadrature::integrate(&g, 1e-14, MAX_GRID)?.value;
    Ok(Desintegration {
        value,
        reference,
        residual: (value - reference).norm(),
    })
}

/// `∫ conj(z)^l dmu_alpha = ∑_{k=1}^{|l|} conj(alpha)^k c_k` for the Clark
/// measures of `f^n`; for negative `l` the conjugate identity is used.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentPolynomial {
    pub l: i32,
    /// `c_k = [z^|l|] (f^n)^k`, `k = 1..=|l|`.
    pub coeffs: Vec<C64>,
}

impl MomentPolynomial {
    pub fn eval(&self, alpha: CirclePoint) -> C64 {
        let a = alpha.to_complex();
        let terms: Vec<C64> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let k = i as i32 + 1;
                if self.l > 0 {
                    a.conj().powi(k) * c
                } else {
                    a.powi(k) * c.conj()
                }
            })
            .collect();
        quadrature::pairwise_sum(&terms)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Tolerance of the coefficient quadratures.
pub const MOMENT_TOL: f64 = 1e-12;

/// Coefficients `c_k = ∫ (f^n)^k conj(z)^|l| dm`, `k = 1..=|l|`.
///
/// The integrand is analytic in the disc apart from the `conj(z)^|l|`
/// factor, so the circle is shrunk to radius `r = exp(-1/|l|)`, where
/// `(f^n)^k` is bounded by 1 and the trapezoid rule converges like `r^N`
/// whatever the degree of `f^n`. On the unit circle the bandwidth grows
/// like `max |f'|^n` and quadrature stalls for `n` around 10.
pub fn moment_polynomial(f: &BlaschkeProduct, n: usize, l: i32) -> Result<MomentPolynomial> {
    let big_l = l.unsigned_abs() as usize;
    if l == 0 || n == 0 {
        return Err(Error::InvalidArgument(
            "moment_polynomial needs l != 0 and n >= 1",
        ));
    }
    let it = Iterate::new(f, n)?;
    let r = (-1.0 / big_l as f64).exp();
    let start = (64 * big_l).next_power_of_two().max(quadrature::MIN_GRID);
    let scale = r.powi(-(big_l as i32));
    let (coeffs, _) = quadrature::integrate_vec_from(
        |z, out: &mut [C64]| {
            let w = it.eval(z * r).unwrap_or(C64::new(f64::NAN, f64::NAN));
            let mut p = z.conj().powu(big_l as u32) * scale;
            for slot in out.iter_mut() {
                p *= w;
                *slot = p;
            }
        },
        big_l,
        MOMENT_TOL,
        start,
        MAX_GRID.max(2 * start),
    )?;
    Ok(MomentPolynomial { l, coeffs })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentBound {
    pub n: usize,
    pub l: i32,
    pub max_coeff: f64,
    /// `|f'(0)|^{n/2}`
    pub bound: f64,
    pub pass: bool,
}

/// `max_k |c_k| <= |f'(0)|^{n/2}`, allowing the quadrature tolerance.
/// Vacuous when `f'(0) = 0`.
pub fn check_moment_bound(f: &BlaschkeProduct, n: usize, l: i32) -> Result<MomentBound> {
    if l == 0 || l.unsigned_abs() as usize > n {
        return Err(Error::InvalidArgument(
            "check_moment_bound needs 1 <= |l| <= n",
        ));
    }
    let a = f.contraction();
    let bound = a.powf(n as f64 / 2.0);
    if a == 0.0 {
        return Ok(MomentBound {
            n,
            l,
            max_coeff: 0.0,
            bound,
            pass: true,
        });
    }
    let max_coeff = moment_polynomial(f, n, l)?.max_abs();
    Ok(MomentBound {
        n,
        l,
        max_coeff,
        bound,
        pass: max_coeff <= bound + MOMENT_TOL,
    })
}

/// Smallest `n0 <= n_max` such that the bound holds for every
/// `n0 <= n <= n_max` and `1 <= l <= n`. `None` if it fails at `n_max`.
pub fn empirical_n0(f: &BlaschkeProduct, n_max: usize) -> Result<Option<usize>> {
    let mut n0 = None;
    for n in (1..=n_max).rev() {
        for l in 1..=n {
            if !check_moment_bound(f, n, l as i32)?.pass {
                return Ok(n0);
            }
        }
        n0 = Some(n);
    }
    Ok(n0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn half() -> BlaschkeProduct {
        BlaschkeProduct::with_zero(c(0.5, 0.0)).unwrap()
    }

    fn cp(t: f64) -> CirclePoint {
        CirclePoint::new(t).unwrap()
    }

    // truncated power series helpers for an independent coefficient oracle
    fn series_mul(a: &[C64], b: &[C64]) -> Vec<C64> {
        let n = a.len();
        let mut out = alloc::vec![c(0.0, 0.0); n];
        for i in 0..n {
            for j in 0..n - i {
                out[i + j] += a[i] * b[j];
            }
        }
        out
    }

    fn series_of(f: &BlaschkeProduct, order: usize) -> Vec<C64> {
        let mut s = alloc::vec![c(0.0, 0.0); order + 1];
        s[0] = f.rotation();
        for a in f.zeros() {
            let mut factor = alloc::vec![c(0.0, 0.0); order + 1];
            if a == c(0.0, 0.0) {
                if order >= 1 {
                    factor[1] = c(1.0, 0.0);
                }
            } else {
                factor[0] = a;
                for (j, slot) in factor.iter_mut().enumerate().skip(1) {
                    *slot = (a.norm_sqr() - 1.0) * a.conj().powi(j as i32 - 1);
                }
            }
            s = series_mul(&s, &factor);
        }
        s
    }

    fn compose(outer: &[C64], inner: &[C64]) -> Vec<C64> {
        let mut out = alloc::vec![c(0.0, 0.0); inner.len()];
        let mut p = out.clone();
        p[0] = c(1.0, 0.0);
        for &coef in outer {
            for (o, q) in out.iter_mut().zip(&p) {
                *o += coef * q;
            }
            p = series_mul(&p, inner);
        }
        out
    }

    fn coeff_oracle(f: &BlaschkeProduct, n: usize, l: usize) -> Vec<C64> {
        let base = series_of(f, l);
        let mut it = base.clone();
        for _ in 1..n {
            it = compose(&base, &it);
        }
        let mut p = it.clone();
        let mut out = alloc::vec![p[l]];
        for _ in 1..l {
            p = series_mul(&p, &it);
            out.push(p[l]);
        }
        out
    }

    #[test]
    fn square_atoms() {
        let mu = clark_measure(&BlaschkeProduct::monomial(2).unwrap(), cp(0.0)).unwrap();
        assert_eq!(mu.atoms.len(), 2);
        assert_abs_diff_eq!(mu.atoms[0].0.theta(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mu.atoms[1].0.theta(), PI, epsilon = 1e-12);
        for (_, w) in &mu.atoms {
            assert_abs_diff_eq!(*w, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn cube_atoms() {
        let phi = 1.1;
        let mu = clark_measure(&BlaschkeProduct::monomial(3).unwrap(), cp(phi)).unwrap();
        for (k, (t, w)) in mu.atoms.iter().enumerate() {
            assert_abs_diff_eq!(t.theta(), (phi + TAU * k as f64) / 3.0, epsilon = 1e-12);
            assert_abs_diff_eq!(*w, 1.0 / 3.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn atoms_solve_the_equation() {
        let f = half();
        for t in [0.0, 1.0, 3.0, 5.5] {
            let mu = clark_measure(&f, cp(t)).unwrap();
            assert_eq!(mu.atoms.len(), 2);
            assert_abs_diff_eq!(mu.weight_sum(), 1.0, epsilon = 1e-10);
            for &(z, w) in &mu.atoms {
                let v = f.eval(z.to_complex()).unwrap();
                assert!((v - cp(t).to_complex()).norm() <= 1e-10);
                let d = f.derivative(z.to_complex()).unwrap().norm();
                assert_abs_diff_eq!(w, 1.0 / d, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn iterate_measures() {
        let f = half();
        for n in [3usize, 8, 12] {
            let it = Iterate::new(&f, n).unwrap();
            let mu = clark_measure(&it, cp(0.3)).unwrap();
            assert_eq!(mu.atoms.len(), 1 << n);
            assert!(mu.atoms.iter().all(|a| a.1 > 0.0));
            assert_abs_diff_eq!(mu.weight_sum(), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn first_moment_examples() {
        let sq = BlaschkeProduct::monomial(2).unwrap();
        assert!(check_first_moment(&sq, cp(0.7)).unwrap() <= 1e-12);
        assert!(check_first_moment(&half(), cp(0.0)).unwrap() <= 1e-9);
        let mu = clark_measure(&half(), cp(0.0)).unwrap();
        assert_abs_diff_eq!(mu.moment(1).re, 0.5, epsilon = 1e-9);
        let g = BlaschkeProduct::with_zero(c(0.0, 0.3)).unwrap();
        let mu = clark_measure(&g, cp(PI / 2.0)).unwrap();
        assert!((mu.moment(1) - c(0.3, 0.0)).norm() <= 1e-9);
    }

    #[test]
    fn second_moment_examples() {
        let sq = BlaschkeProduct::monomial(2).unwrap();
        assert!(check_second_moment(&sq, cp(0.0)).unwrap() <= 1e-12);
        let mu = clark_measure(&sq, cp(2.0)).unwrap();
        assert!((mu.moment(2) - C64::cis(2.0)).norm() <= 1e-12);
        assert!(check_second_moment(&half(), cp(1.3)).unwrap() <= 1e-9);
    }

    #[test]
    fn moment_identities_on_random_alpha() {
        let maps = [
            half(),
            BlaschkeProduct::with_zero(c(0.0, 0.3)).unwrap(),
            BlaschkeProduct::new(&[c(0.0, 0.0), c(0.6, 0.2), c(-0.3, -0.7)], C64::cis(2.0))
                .unwrap(),
            BlaschkeProduct::new(&[c(0.0, 0.0), c(0.0, 0.0), c(0.9, 0.0)], c(1.0, 0.0)).unwrap(),
        ];
        for f in &maps {
            for i in 0..20 {
                let alpha = cp(crate::rng::angle(21, i));
                assert!(check_first_moment(f, alpha).unwrap() <= 1e-8);
                assert!(check_second_moment(f, alpha).unwrap() <= 1e-8);
            }
        }
    }

    #[test]
    fn desintegration_examples() {
        let sq = BlaschkeProduct::monomial(2).unwrap();
        let r = desintegrate(&sq, |z| z * z + z.conj(), 512).unwrap();
        assert!(r.residual <= 1e-10 && r.value.norm() <= 1e-10);
        let r = desintegrate(&sq, |_| c(1.0, 0.0), 64).unwrap();
        assert_abs_diff_eq!(r.value.re, 1.0, epsilon = 1e-14);
        let r = desintegrate(&half(), |z| c((z + z * z).norm_sqr(), 0.0), 512).unwrap();
        assert!(r.residual <= 1e-8, "{r:?}");
        assert_abs_diff_eq!(r.reference.re, 2.0, epsilon = 1e-13);
        assert!(desintegrate(&sq, |z| z, 10).is_err());
    }

    #[test]
    fn desintegration_for_low_degree_polynomials() {
        let f = BlaschkeProduct::new(&[c(0.0, 0.0), c(0.4, -0.5), c(-0.2, 0.1)], C64::cis(0.4))
            .unwrap();
        for p in -8i32..=8 {
            let g = |z: C64| z.powi(p) + c(0.1 * p as f64, 0.0) * z.conj().powi(p.abs() / 2);
            assert!(
                desintegrate(&f, g, 512).unwrap().residual <= 1e-8,
                "p = {p}"
            );
        }
    }

    #[test]
    fn moment_polynomial_examples() {
        let sq = BlaschkeProduct::monomial(2).unwrap();
        let p = moment_polynomial(&sq, 1, 1).unwrap();
        assert!(p.coeffs[0].norm() <= 1e-14);
        let p = moment_polynomial(&sq, 1, 2).unwrap();
        assert!((p.coeffs[0] - c(1.0, 0.0)).norm() <= 1e-14 && p.coeffs[1].norm() <= 1e-14);

        // the bound 0.5^3 holds for l <= 5 but not at l = n = 6, so n0 > 6 here
        let f = half();
        for l in 1..=6 {
            let p = moment_polynomial(&f, 6, l).unwrap();
            let o = coeff_oracle(&f, 6, l as usize);
            assert_eq!(p.coeffs.len(), l as usize);
            for (x, y) in p.coeffs.iter().zip(&o) {
                assert!((x - y).norm() <= 1e-10);
            }
            assert_eq!(p.max_abs() <= 0.125, l <= 5, "l = {l}: {}", p.max_abs());
        }
        assert!(!check_moment_bound(&f, 6, 6).unwrap().pass);
    }

    #[test]
    fn moment_polynomial_matches_series_oracle() {
        let f =
            BlaschkeProduct::new(&[c(0.0, 0.0), c(0.5, 0.2), c(-0.3, 0.4)], C64::cis(0.9)).unwrap();
        for (n, l) in [(1usize, 4usize), (3, 3), (5, 5)] {
            let p = moment_polynomial(&f, n, l as i32).unwrap();
            let o = coeff_oracle(&f, n, l);
            for (x, y) in p.coeffs.iter().zip(&o) {
                assert!((x - y).norm() <= 1e-10, "n = {n} l = {l}");
            }
        }
    }

    #[test]
    fn moment_polynomial_reproduces_atomic_moments() {
        let f = half();
        for (n, l) in [(2usize, 2i32), (4, 3), (4, -3), (6, 5)] {
            let it = Iterate::new(&f, n).unwrap();
            let poly = moment_polynomial(&f, n, l).unwrap();
            for i in 0..5 {
                let alpha = cp(crate::rng::angle(5, i));
                let mu = clark_measure(&it, alpha).unwrap();
                let atomic = mu.integrate(|z| z.conj().powi(l));
                assert!(
                    (atomic - poly.eval(alpha)).norm() <= 1e-8,
                    "n = {n} l = {l}"
                );
            }
        }
    }

    #[test]
    fn moment_bound_examples() {
        let sq = BlaschkeProduct::monomial(2).unwrap();
        assert!(check_moment_bound(&sq, 4, 2).unwrap().pass);
        let r = check_moment_bound(&half(), 12, 3).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(check_moment_bound(&half(), 2, 3).is_err());
        let n0 = empirical_n0(&half(), 12).unwrap();
        assert!(n0.is_some());
    }

    #[test]
    fn near_degenerate_product_fails_to_bracket() {
        let f = BlaschkeProduct::with_zero(C64::from_polar(0.999_999_9, 3e-5)).unwrap();
        assert!(matches!(
            clark_measure(&f, cp(0.0)),
            Err(Error::RootBracketFailure { .. })
        ));
    }
}
