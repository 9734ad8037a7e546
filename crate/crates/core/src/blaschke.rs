//! Finite Blaschke products fixing the origin and their iterates.

use alloc::vec::Vec;
use core::f64::consts::TAU;

#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result, C64};

/// Zeros with modulus at or above this are rejected.
pub const ZERO_MODULUS_LIMIT: f64 = 1.0 - 1e-12;
/// Allowed overshoot of `|w|` past the unit circle in [`InnerMap::eval`].
pub const DOMAIN_SLACK: f64 = 1e-9;
/// Minimal distance to a pole `1/conj(a)`.
pub const POLE_GUARD: f64 = 1e-12;
/// Default cap on the number of boundary iterations.
pub const DEFAULT_MAX_ITERATE: usize = 64;

/// A point `e^{i theta}` of the unit circle, with `theta` kept in `[0, 2pi)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct CirclePoint(f64);

impl CirclePoint {
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(Self::canonical(theta))
    }

    fn canonical(theta: f64) -> Self {
        let t = theta - TAU * (theta / TAU).floor();
        // can round up to exactly TAU for tiny negative input
        Self(if t >= TAU { 0.0 } else { t })
    }

    /// Angle of a nonzero complex number.
    pub fn from_complex(z: C64) -> Result<Self> {
        if !(z.re.is_finite() && z.im.is_finite()) || z == C64::new(0.0, 0.0) {
            return Err(Error::NonFinite);
        }
        Ok(Self::canonical(z.arg()))
    }

    pub fn theta(self) -> f64 {
        self.0
    }

    pub fn to_complex(self) -> C64 {
        C64::cis(self.0)
    }
}

/// Second-order Taylor data of a map at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaylorJet {
    /// `f'(0)`
    pub c1: C64,
    /// `f''(0) / 2`
    pub c2: C64,
}

impl TaylorJet {
    pub const IDENTITY: TaylorJet = TaylorJet {
        c1: C64::new(1.0, 0.0),
        c2: C64::new(0.0, 0.0),
    };

    /// Jet of `self ∘ inner`, valid when both maps fix the origin.
    pub fn compose(self, inner: TaylorJet) -> TaylorJet {
        TaylorJet {
            c1: self.c1 * inner.c1,
            c2: self.c1 * inner.c2 + self.c2 * inner.c1 * inner.c1,
        }
    }
}

/// An inner function of the closed disc that fixes the origin and extends
/// analytically across the unit circle.
pub trait InnerMap {
    /// Number of preimages of a boundary point.
    fn degree(&self) -> usize;

    /// Value at `w` with `|w| <= 1 + 1e-9`.
    fn eval(&self, w: C64) -> Result<C64>;

    /// Complex derivative at `w`.
    fn derivative(&self, w: C64) -> Result<C64>;

    fn jet(&self) -> TaylorJet;

    /// Value at a unimodular `z`, projected back onto the circle.
    fn boundary_value(&self, z: C64) -> C64;

    /// Derivative at a unimodular `z`.
    fn boundary_derivative(&self, z: C64) -> C64;

    /// `|f'(0)|`
    fn contraction(&self) -> f64 {
        self.jet().c1.norm()
    }

    /// `(f, n)` when the map is known to be the iterate `f^n`.
    fn as_iterate(&self) -> Option<(&BlaschkeProduct, usize)> {
        None
    }
}

/// `f(z) = rotation * z^m * prod (a_i - z) / (1 - conj(a_i) z)` over the
/// nonzero zeros `a_i`, with `m >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkeProduct {
    rotation: C64,
    origin_order: usize,
    nonzero: Vec<C64>,
}

impl BlaschkeProduct {
    /// Builds a product from its zero multiset and rotation.
    pub fn new(zeros: &[C64], rotation: C64) -> Result<Self> {
        if !(rotation.re.is_finite() && rotation.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let rmod = rotation.norm();
        if (rmod - 1.0).abs() > 1e-14 {
            return Err(Error::RotationNotUnimodular(rmod));
        }
        let mut origin_order = 0;
        let mut nonzero = Vec::new();
        for (index, &a) in zeros.iter().enumerate() {
            if !(a.re.is_finite() && a.im.is_finite()) {
                return Err(Error::NonFinite);
            }
            let modulus = a.norm();
            if modulus >= ZERO_MODULUS_LIMIT {
                return Err(Error::ZeroOutsideDisc { index, modulus });
            }
            if a.re == 0.0 && a.im == 0.0 {
                origin_order += 1;
            } else {
                nonzero.push(a);
            }
        }
        if origin_order == 0 {
            return Err(Error::MissingOriginZero);
        }
        Ok(Self {
            rotation,
            origin_order,
            nonzero,
        })
    }

    /// `z^d`
    pub fn monomial(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::MissingOriginZero);
        }
        Ok(Self {
            rotation: C64::new(1.0, 0.0),
            origin_order: d,
            nonzero: Vec::new(),
        })
    }

    /// `z (a - z) / (1 - conj(a) z)`, a degree-2 product with `f'(0) = a`.
    pub fn with_zero(a: C64) -> Result<Self> {
        Self::new(&[C64::new(0.0, 0.0), a], C64::new(1.0, 0.0))
    }

    pub fn rotation(&self) -> C64 {
        self.rotation
    }

    pub fn origin_order(&self) -> usize {
        self.origin_order
    }

    /// All zeros, origin first, multiplicity counted.
    pub fn zeros(&self) -> Vec<C64> {
        let mut out = alloc::vec![C64::new(0.0, 0.0); self.origin_order];
        out.extend_from_slice(&self.nonzero);
        out
    }

    pub fn is_rotation(&self) -> bool {
        self.degree() < 2
    }

    fn check_point(&self, w: C64) -> Result<()> {
        if !(w.re.is_finite() && w.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let r = w.norm();
        if r > 1.0 + DOMAIN_SLACK {
            return Err(Error::OutsideDomain(r));
        }
        for &a in &self.nonzero {
            let pole = C64::new(1.0, 0.0) / a.conj();
            if (w - pole).norm() <= POLE_GUARD {
                return Err(Error::NearPole { re: a.re, im: a.im });
            }
        }
        Ok(())
    }

    fn eval_raw(&self, w: C64) -> C64 {
        let mut v = self.rotation * w.powu(self.origin_order as u32);
        for &a in &self.nonzero {
            v *= (a - w) / (C64::new(1.0, 0.0) - a.conj() * w);
        }
        v
    }

    fn derivative_raw(&self, w: C64) -> C64 {
        let one = C64::new(1.0, 0.0);
        let m = self.origin_order as u32;
        // factor 0 is rotation * w^m, the rest are the Moebius factors
        let mut values = Vec::with_capacity(self.nonzero.len() + 1);
        let mut slopes = Vec::with_capacity(self.nonzero.len() + 1);
        values.push(self.rotation * w.powu(m));
        slopes.push(self.rotation * (m as f64) * w.powu(m - 1));
        for &a in &self.nonzero {
            let den = one - a.conj() * w;
            values.push((a - w) / den);
            slopes.push(C64::new(a.norm_sqr() - 1.0, 0.0) / (den * den));
        }
        let n = values.len();
        let mut prefix = alloc::vec![one; n + 1];
        for i in 0..n {
            prefix[i + 1] = prefix[i] * values[i];
        }
        let mut total = C64::new(0.0, 0.0);
        let mut suffix = one;
        for i in (0..n).rev() {
            total += slopes[i] * prefix[i] * suffix;
            suffix *= values[i];
        }
        total
    }

    /// Orbit of a boundary point: `out[j] = f^{j+1}(z)`, each step
    /// renormalized to modulus one.
    pub fn boundary_orbit(&self, z: C64, out: &mut [C64]) {
        let mut w = z;
        for slot in out.iter_mut() {
            w = self.boundary_value(w);
            *slot = w;
        }
    }

    /// Smallest `d` in `1..=32` with `|f^n(w)| < |f'(0)|^n (1 - |w|)^{-d}`
    /// on a radius/angle grid for `n <= n_max`. `None` when `f'(0) = 0` or
    /// no `d` up to 32 works.
    pub fn size_exponent(&self, n_max: usize) -> Option<u32> {
        let a = self.contraction();
        if a == 0.0 {
            return None;
        }
        let ln_a = a.ln();
        // worst margin over the grid for each d is linear in d, so keep per-point data
        let mut points: Vec<(f64, f64)> = Vec::new();
        let radii = (1..=199).map(|i| i as f64 * 0.005);
        for r in radii {
            for k in 0..64 {
                let mut w = C64::from_polar(r, TAU * k as f64 / 64.0);
                for n in 1..=n_max {
                    w = self.eval_raw(w);
                    let lhs = w.norm().ln() - n as f64 * ln_a;
                    points.push((lhs, -(1.0 - r).ln()));
                }
            }
        }
        (1..=32u32).find(|&d| points.iter().all(|&(lhs, unit)| lhs < d as f64 * unit))
    }
}

impl InnerMap for BlaschkeProduct {
    fn degree(&self) -> usize {
        self.origin_order + self.nonzero.len()
    }

    fn eval(&self, w: C64) -> Result<C64> {
        self.check_point(w)?;
        Ok(self.eval_raw(w))
    }

    fn derivative(&self, w: C64) -> Result<C64> {
        self.check_point(w)?;
        Ok(self.derivative_raw(w))
    }

    fn jet(&self) -> TaylorJet {
        // prod b_i = b0 + b1 z + b2 z^2 + ..., where
        // (a - z)/(1 - conj(a) z) = a + (|a|^2 - 1) z + conj(a)(|a|^2 - 1) z^2 + ...
        let mut b = [C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
        for &a in &self.nonzero {
            let s = a.norm_sqr() - 1.0;
            let f = [a, C64::new(s, 0.0), a.conj() * s];
            b = [
                b[0] * f[0],
                b[0] * f[1] + b[1] * f[0],
                b[0] * f[2] + b[1] * f[1] + b[2] * f[0],
            ];
        }
        let zero = C64::new(0.0, 0.0);
        let r = self.rotation;
        match self.origin_order {
            1 => TaylorJet {
                c1: r * b[0],
                c2: r * b[1],
            },
            2 => TaylorJet {
                c1: zero,
                c2: r * b[0],
            },
            _ => TaylorJet { c1: zero, c2: zero },
        }
    }

    fn boundary_value(&self, z: C64) -> C64 {
        let v = self.eval_raw(z);
        v / v.norm()
    }

    fn boundary_derivative(&self, z: C64) -> C64 {
        self.derivative_raw(z)
    }
}

/// The `n`-th iterate `f^n` of a product.
#[derive(Debug, Clone, Copy)]
pub struct Iterate<'a> {
    base: &'a BlaschkeProduct,
    n: usize,
    degree: usize,
}

impl<'a> Iterate<'a> {
    /// Fails when `deg(f)^n` does not fit in a `u32`.
    pub fn new(base: &'a BlaschkeProduct, n: usize) -> Result<Self> {
        let degree = u32::try_from(base.degree())
            .ok()
            .and_then(|d| d.checked_pow(u32::try_from(n).ok()?))
            .ok_or(Error::InvalidArgument("iterate degree overflows"))?;
        Ok(Self {
            base,
            n,
            degree: degree as usize,
        })
    }

    pub fn order(&self) -> usize {
        self.n
    }
}

impl InnerMap for Iterate<'_> {
    fn degree(&self) -> usize {
        self.degree
    }

    fn eval(&self, w: C64) -> Result<C64> {
        let mut v = w;
        for _ in 0..self.n {
            v = self.base.eval(v)?;
        }
        Ok(v)
    }

    fn derivative(&self, w: C64) -> Result<C64> {
        let mut v = w;
        let mut d = C64::new(1.0, 0.0);
        for _ in 0..self.n {
            d *= self.base.derivative(v)?;
            v = self.base.eval(v)?;
        }
        Ok(d)
    }

    fn jet(&self) -> TaylorJet {
        let step = self.base.jet();
        (0..self.n).fold(TaylorJet::IDENTITY, |acc, _| step.compose(acc))
    }

    fn boundary_value(&self, z: C64) -> C64 {
        (0..self.n).fold(z, |w, _| self.base.boundary_value(w))
    }

    fn as_iterate(&self) -> Option<(&BlaschkeProduct, usize)> {
        Some((self.base, self.n))
    }

    fn boundary_derivative(&self, z: C64) -> C64 {
        let mut v = z;
        let mut d = C64::new(1.0, 0.0);
        for _ in 0..self.n {
            d *= self.base.derivative_raw(v);
            v = self.base.boundary_value(v);
        }
        d
    }
}

/// Angle of `f^n(e^{i theta})`, with `n` capped at [`DEFAULT_MAX_ITERATE`].
pub fn iterate_boundary(f: &BlaschkeProduct, p: CirclePoint, n: usize) -> Result<CirclePoint> {
    iterate_boundary_capped(f, p, n, DEFAULT_MAX_ITERATE)
}

pub fn iterate_boundary_capped(
    f: &BlaschkeProduct,
    p: CirclePoint,
    n: usize,
    cap: usize,
) -> Result<CirclePoint> {
    if n > cap {
        return Err(Error::IterateCapExceeded { requested: n, cap });
    }
    if n == 0 {
        return Ok(p);
    }
    let z = (0..n).fold(p.to_complex(), |w, _| f.boundary_value(w));
    CirclePoint::from_complex(z)
}
