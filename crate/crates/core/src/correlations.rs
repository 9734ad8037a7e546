//! Correlation integrals `∫ prod (f^{n_j})^{eps_j} dm` of iterates, where a
//! negative sign stands for the complex conjugate on the circle.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::blaschke::InnerMap;
use crate::quadrature::{self, pairwise_sum};
use crate::{BlaschkeProduct, Error, Result, C64};

/// Tolerance of every correlation quadrature.
pub const CORRELATION_TOL: f64 = 1e-12;
/// Largest fitted constant accepted by [`decay_check`].
pub const DECAY_C_MAX: f64 = 100.0;

/// Signs `eps_j` and strictly increasing positive indices `n_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrelationSpec {
    signs: Vec<i8>,
    indices: Vec<usize>,
}

fn check_signs(signs: &[i8]) -> Result<()> {
    if signs.iter().all(|&s| s == 1 || s == -1) {
        Ok(())
    } else {
        Err(Error::InvalidArgument("signs must be +1 or -1"))
    }
}

impl CorrelationSpec {
    pub fn new(signs: Vec<i8>, indices: Vec<usize>) -> Result<Self> {
        if signs.is_empty() || signs.len() != indices.len() {
            return Err(Error::InvalidArgument(
                "need k >= 1 signs and as many indices",
            ));
        }
        check_signs(&signs)?;
        if indices[0] == 0 || indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "indices must be positive and strictly increasing",
            ));
        }
        Ok(Self { signs, indices })
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn k(&self) -> usize {
        self.signs.len()
    }

    /// `q = min (n_{j+1} - n_j)`, `None` for a single factor.
    pub fn min_gap(&self) -> Option<usize> {
        self.indices.windows(2).map(|w| w[1] - w[0]).min()
    }

    /// All signs flipped.
    pub fn conjugate(&self) -> Self {
        Self {
            signs: self.signs.iter().map(|s| -s).collect(),
            indices: self.indices.clone(),
        }
    }
}

/// `∫ z^p prod (f^{n_j})^{eps_j} dm` for any non-negative indices.
///
/// Since `m` is `f`-invariant the indices are first lowered by their
/// minimum, which divides the integrand bandwidth by `deg(f)^{min n}`.
pub fn signed_integral(
    f: &BlaschkeProduct,
    p: i32,
    signs: &[i8],
    indices: &[usize],
) -> Result<C64> {
    if signs.len() != indices.len() {
        return Err(Error::ShapeMismatch);
    }
    check_signs(signs)?;
    let shift = if p == 0 {
        indices.iter().copied().min().unwrap_or(0)
    } else {
        0
    };
    let d = f.degree() as u64;
    let degree = indices.iter().try_fold(p.unsigned_abs() as u64, |acc, &n| {
        let e = u32::try_from(n - shift).ok()?;
        acc.checked_add(d.checked_pow(e)?)
    });
    let degree = degree.ok_or(Error::DegreeBudgetExceeded(u64::MAX))?;
    let mut order: Vec<usize> = (0..indices.len()).collect();
    order.sort_by_key(|&i| indices[i]);
    let integrand = |z: C64| {
        // walk the orbit once, picking up factors in index order
        let mut w = z;
        let mut level = 0;
        let mut acc = z.powi(p);
        for &i in &order {
            while level < indices[i] - shift {
                w = f.boundary_value(w);
                level += 1;
            }
            acc *= if signs[i] > 0 { w } else { w.conj() };
        }
        acc
    };
    Ok(quadrature::integrate_for_degree(integrand, degree, CORRELATION_TOL)?.value)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairCorrelation {
    pub value: C64,
    /// `f'(0)^{j-k}`
    pub expected: C64,
    pub residual: f64,
}

/// `∫ conj(f^k) f^j dm` against `f'(0)^{j-k}`.
pub fn pair_correlation(f: &BlaschkeProduct, k: usize, j: usize) -> Result<PairCorrelation> {
    if !(1 <= k && k < j) {
        return Err(Error::InvalidArgument("pair_correlation needs 1 <= k < j"));
    }
    let value = signed_integral(f, 0, &[-1, 1], &[k, j])?;
    let expected = f.jet().c1.powu((j - k) as u32);
    Ok(PairCorrelation {
        value,
        expected,
        residual: (value - expected).norm(),
    })
}

/// `xi(A) = ∑_{n in A} a_n f^n` with `a_n = coefficients[n - 1]`.
#[derive(Debug, Clone, Copy)]
pub struct BlockSum<'a> {
    pub block: &'a [usize],
    pub coefficients: &'a [C64],
}

impl BlockSum<'_> {
    fn coefficient(&self, n: usize) -> Result<C64> {
        n.checked_sub(1)
            .and_then(|i| self.coefficients.get(i))
            .copied()
            .ok_or(Error::InvalidArgument(
                "block index outside the coefficient range",
            ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Factorization {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

/// Compares `∫ prod |xi_k|^2 dm` with `prod ∫ |xi_k|^2 dm` for separated blocks.
pub fn block_product_factorization(
    f: &BlaschkeProduct,
    blocks: &[BlockSum<'_>],
) -> Result<Factorization> {
    if blocks.is_empty() || blocks.iter().any(|b| b.block.is_empty()) {
        return Err(Error::InvalidArgument("blocks must be nonempty"));
    }
    for (i, w) in blocks.windows(2).enumerate() {
        let max = w[0].block.iter().max();
        let min = w[1].block.iter().min();
        if max >= min {
            return Err(Error::SeparationViolation(i, i + 1));
        }
    }
    let mut terms: Vec<Vec<(usize, C64)>> = Vec::new();
    for b in blocks {
        let mut t = b
            .block
            .iter()
            .map(|&n| Ok((n, b.coefficient(n)?)))
            .collect::<Result<Vec<_>>>()?;
        t.sort_by_key(|x| x.0);
        terms.push(t);
    }
    let all: Vec<&[(usize, C64)]> = terms.iter().map(|t| t.as_slice()).collect();
    let lhs = squared_moduli_integral(f, &all)?;
    let mut rhs = 1.0;
    for t in &all {
        rhs *= squared_moduli_integral(f, core::slice::from_ref(t))?;
    }
    Ok(Factorization {
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
    })
}

/// `∫ prod_k |∑_{(n, a) in blocks[k]} a f^n|^2 dm`
pub(crate) fn squared_moduli_integral(
    f: &BlaschkeProduct,
    blocks: &[&[(usize, C64)]],
) -> Result<f64> {
    let shift = blocks
        .iter()
        .flat_map(|b| b.iter().map(|t| t.0))
        .min()
        .unwrap_or(0);
    let top = blocks
        .iter()
        .flat_map(|b| b.iter().map(|t| t.0))
        .max()
        .unwrap_or(0)
        - shift;
    let d = f.degree() as u64;
    let degree = blocks.iter().try_fold(0u64, |acc, b| {
        let m = b.iter().map(|t| t.0).max()? - shift;
        acc.checked_add(2 * d.checked_pow(u32::try_from(m).ok()?)?)
    });
    let degree = degree.ok_or(Error::DegreeBudgetExceeded(u64::MAX))?;
    let integrand = |z: C64| {
        let mut orbit = Vec::with_capacity(top + 1);
        let mut w = z;
        orbit.push(w);
        for _ in 0..top {
            w = f.boundary_value(w);
            orbit.push(w);
        }
        let mut prod = 1.0;
        for b in blocks {
            let xi: Vec<C64> = b.iter().map(|&(n, a)| a * orbit[n - shift]).collect();
            prod *= pairwise_sum(&xi).norm_sqr();
        }
        C64::new(prod, 0.0)
    };
    Ok(
        quadrature::integrate_for_degree(integrand, degree, CORRELATION_TOL)?
            .value
            .re,
    )
}

/// `∫ prod_k f^{n_k} conj(f^{j_k}) dm` against the product of the pair
/// integrals, for pairs with `max(n_k, j_k) < min(n_{k+1}, j_{k+1})`.
pub fn pair_product_factorization(
    f: &BlaschkeProduct,
    pairs: &[(usize, usize)],
) -> Result<(C64, C64, f64)> {
    for (i, w) in pairs.windows(2).enumerate() {
        if w[0].0.max(w[0].1) >= w[1].0.min(w[1].1) {
            return Err(Error::SeparationViolation(i, i + 1));
        }
    }
    let signs: Vec<i8> = pairs.iter().flat_map(|_| [1, -1]).collect();
    let indices: Vec<usize> = pairs.iter().flat_map(|p| [p.0, p.1]).collect();
    let lhs = signed_integral(f, 0, &signs, &indices)?;
    let mut rhs = C64::new(1.0, 0.0);
    for p in pairs {
        rhs *= signed_integral(f, 0, &[1, -1], &[p.0, p.1])?;
    }
    Ok((lhs, rhs, (lhs - rhs).norm()))
}

/// The four shapes of four-factor integrals. Equal indices stand for a
/// squared factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FourFactor {
    /// `∫ f^{e n1} f^{-e n2} f^{s n3} f^{s n4} dm` with `max(n1, n2) < min(n3, n4)`.
    Cancellation { signs: [i8; 4], indices: [usize; 4] },
    /// `∫ f^{e1 n1} (f^{e2 n2})^2 f^{e3 n3} dm`, `n1 < n2 < n3`.
    SecondSquared { signs: [i8; 3], indices: [usize; 3] },
    /// `∫ (f^{e1 n1})^2 f^{e2 n2} f^{e3 n3} dm`, `n1 < n2 < n3`.
    FirstSquared { signs: [i8; 3], indices: [usize; 3] },
    /// `n1 < n2 < n3 < n4`.
    Distinct { signs: [i8; 4], indices: [usize; 4] },
}

impl FourFactor {
    /// Reads the shape off four signed indices; cancellation takes
    /// precedence.
    pub fn classify(signs: [i8; 4], n: [usize; 4]) -> Result<Self> {
        check_signs(&signs)?;
        if n.contains(&0) {
            return Err(Error::ShapeMismatch);
        }
        let [e1, e2, e3, e4] = signs;
        if e2 == -e1 && e3 == e4 && n[0].max(n[1]) < n[2].min(n[3]) {
            return Ok(Self::Cancellation { signs, indices: n });
        }
        if n[0] < n[1] && n[1] == n[2] && n[2] < n[3] && e2 == e3 {
            return Ok(Self::SecondSquared {
                signs: [e1, e2, e4],
                indices: [n[0], n[1], n[3]],
            });
        }
        if n[0] == n[1] && n[1] < n[2] && n[2] < n[3] && e1 == e2 {
            return Ok(Self::FirstSquared {
                signs: [e1, e3, e4],
                indices: [n[0], n[2], n[3]],
            });
        }
        if n[0] < n[1] && n[1] < n[2] && n[2] < n[3] {
            return Ok(Self::Distinct { signs, indices: n });
        }
        Err(Error::ShapeMismatch)
    }

    /// Signs and indices with squared factors written twice.
    pub fn expanded(&self) -> ([i8; 4], [usize; 4]) {
        match *self {
            Self::Cancellation { signs, indices } | Self::Distinct { signs, indices } => {
                (signs, indices)
            }
            Self::SecondSquared {
                signs: [a, b, c],
                indices: [x, y, z],
            } => ([a, b, b, c], [x, y, y, z]),
            Self::FirstSquared {
                signs: [a, b, c],
                indices: [x, y, z],
            } => ([a, a, b, c], [x, x, y, z]),
        }
    }

    /// Exponent `e` of the bound `C |f'(0)|^e`; `None` where the bound is
    /// the constant 1 or the value is exactly 0.
    pub fn exponent(&self) -> Option<usize> {
        match *self {
            Self::Cancellation { .. } => None,
            Self::SecondSquared {
                indices: [n1, _, n3],
                ..
            } => Some(n3 - n1),
            Self::FirstSquared {
                indices: [n1, n2, n3],
                ..
            } => {
                if n2 == n1 + 1 && n3 <= n2 + 2 {
                    None
                } else {
                    Some(n3 - n1)
                }
            }
            Self::Distinct {
                indices: [n1, n2, n3, n4],
                ..
            } => {
                if n4 - n3 > 2 {
                    Some(n2 - n1 + n4 - n3)
                } else {
                    Some(n3 - n1)
                }
            }
        }
    }

    /// Exact modulus where one is known: 0 for cancellation,
    /// `|f'(0)|^{n2 - n1 + n4 - n3}` for alternating distinct signs.
    pub fn exact_modulus(&self, a: f64) -> Option<f64> {
        match *self {
            Self::Cancellation { .. } => Some(0.0),
            Self::Distinct {
                signs: [e1, e2, e3, e4],
                indices: [n1, n2, n3, n4],
            } if e1 * e2 == -1 && e3 * e4 == -1 => Some(a.powi((n2 - n1 + n4 - n3) as i32)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourFactorReport {
    pub shape: FourFactor,
    pub value: C64,
    /// `|value| - exact` where an exact modulus is known.
    pub exact_residual: Option<f64>,
    /// `|value| / a^e`, the smallest constant for this instance.
    pub ratio: Option<f64>,
    /// `|value| <= 1` where the lemma gives the constant bound.
    pub within_unit: Option<bool>,
}

impl FourFactorReport {
    /// Whether the instance satisfies the lemma with constant `c`.
    pub fn within(&self, c: f64, tol: f64) -> bool {
        match (self.exact_residual, self.ratio, self.within_unit) {
            (Some(r), _, _) => r <= tol,
            (_, Some(ratio), _) => ratio <= c,
            (_, _, Some(ok)) => ok,
            _ => true,
        }
    }
}

pub fn four_factor(f: &BlaschkeProduct, shape: FourFactor) -> Result<FourFactorReport> {
    let (signs, indices) = shape.expanded();
    let value = signed_integral(f, 0, &signs, &indices)?;
    let a = f.contraction();
    let exact_residual = shape.exact_modulus(a).map(|e| (value.norm() - e).abs());
    let (ratio, within_unit) = match shape.exponent() {
        Some(e) if a > 0.0 => (Some(value.norm() / a.powi(e as i32)), None),
        Some(_) => (None, None),
        None => (None, Some(value.norm() <= 1.0 + CORRELATION_TOL)),
    };
    Ok(FourFactorReport {
        shape,
        value,
        exact_residual,
        ratio,
        within_unit,
    })
}

/// Largest `|value| / a^e` over a family.
pub fn fit_constant(reports: &[FourFactorReport]) -> f64 {
    reports.iter().filter_map(|r| r.ratio).fold(0.0, f64::max)
}

pub fn higher_correlation(f: &BlaschkeProduct, spec: &CorrelationSpec) -> Result<C64> {
    signed_integral(f, 0, &spec.signs, &spec.indices)
}

/// Weight of one gap in the exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Delta {
    Zero,
    Half,
    One,
}

impl Delta {
    pub fn value(self) -> f64 {
        match self {
            Delta::Zero => 0.0,
            Delta::Half => 0.5,
            Delta::One => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhiReport {
    /// `delta_j` for the gaps `n_{j+1} - n_j`.
    pub deltas: Vec<Delta>,
    /// `∑ delta_j (n_{j+1} - n_j)`
    pub phi: f64,
    /// `k q / 4`
    pub lower_bound: f64,
}

/// A state of the recursion.
#[derive(Debug, Clone, Copy)]
enum Node {
    /// `∫ prod_{i >= s} f^{eps_i (n_i - n_{s-1})} dm`
    Pure { s: usize },
    /// `∫ z^l prod_{i >= j} f^{eps_i (n_i - n_{j-1})} dm`
    Poly { l: i32, j: usize },
}

/// Replays the two reduction steps of the decay estimate and records which
/// weight each gap receives.
pub struct PhiRecursion<'a> {
    spec: &'a CorrelationSpec,
}

impl<'a> PhiRecursion<'a> {
    pub fn new(spec: &'a CorrelationSpec) -> Result<Self> {
        if spec.k() < 2 {
            return Err(Error::InvalidArgument("the exponent needs k >= 2"));
        }
        Ok(Self { spec })
    }

    /// Every path through the branch points.
    pub fn all_paths(&self) -> Vec<PhiReport> {
        let mut out = Vec::new();
        let gaps = alloc::vec![None; self.spec.k() - 1];
        self.walk(Node::Pure { s: 0 }, gaps, &mut |_, c| c.to_vec(), &mut out);
        out
    }

    /// The path with the smallest exponent.
    pub fn conservative(&self) -> PhiReport {
        self.all_paths()
            .into_iter()
            .min_by(|a, b| a.phi.total_cmp(&b.phi))
            .expect("at least one path")
    }

    /// The path whose branch integrals are largest for `f`; near ties go
    /// to the first candidate.
    pub fn realized(&self, f: &BlaschkeProduct) -> Result<PhiReport> {
        let mut err = None;
        let mut pick = |j: usize, cands: &[i32]| -> Vec<i32> {
            let mut best = (cands[0], -1.0);
            for &n in cands {
                let v = match self.branch_integral(f, n, j) {
                    Ok(v) => v,
                    Err(e) => {
                        err.get_or_insert(e);
                        0.0
                    }
                };
                if v > best.1 * (1.0 + 1e-9) + 1e-14 {
                    best = (n, v);
                }
            }
            alloc::vec![best.0]
        };
        let mut out = Vec::new();
        let gaps = alloc::vec![None; self.spec.k() - 1];
        self.walk(Node::Pure { s: 0 }, gaps, &mut pick, &mut out);
        match err {
            Some(e) => Err(e),
            None => Ok(out.pop().expect("one path")),
        }
    }

    /// `|∫ z^n prod_{i > j} f^{eps_i (n_i - n_j)} dm|`
    fn branch_integral(&self, f: &BlaschkeProduct, n: i32, j: usize) -> Result<f64> {
        let nj = self.spec.indices[j];
        let signs = &self.spec.signs[j + 1..];
        let idx: Vec<usize> = self.spec.indices[j + 1..].iter().map(|&x| x - nj).collect();
        Ok(signed_integral(f, n, signs, &idx)?.norm())
    }

    fn walk<P>(
        &self,
        node: Node,
        mut gaps: Vec<Option<Delta>>,
        pick: &mut P,
        out: &mut Vec<PhiReport>,
    ) where
        P: FnMut(usize, &[i32]) -> Vec<i32>,
    {
        let k = self.spec.k();
        let eps = &self.spec.signs;
        match node {
            Node::Pure { s } => {
                let r = k - s;
                if r == 0 {
                    out.push(self.finish(gaps));
                } else if r == 1 {
                    // a lone factor integrates to zero
                    gaps[k - 2].get_or_insert(Delta::Half);
                    out.push(self.finish(gaps));
                } else {
                    gaps[s] = Some(Delta::One);
                    if s >= 1 {
                        gaps[s - 1] = Some(Delta::Zero);
                    }
                    let next = if eps[s] * eps[s + 1] == -1 {
                        Node::Pure { s: s + 2 }
                    } else {
                        Node::Poly {
                            l: 2 * eps[s] as i32,
                            j: s + 2,
                        }
                    };
                    self.walk(next, gaps, pick, out);
                }
            }
            Node::Poly { l, j } => {
                if j == k {
                    // ∫ z^l dm = 0
                    out.push(self.finish(gaps));
                    return;
                }
                gaps[j - 1] = Some(Delta::Half);
                let mut cands: Vec<i32> = (1..=l.abs())
                    .map(|m| l.signum() * m + eps[j] as i32)
                    .collect();
                cands.dedup();
                for n in pick(j, &cands) {
                    let next = if n == 0 {
                        Node::Pure { s: j + 1 }
                    } else {
                        Node::Poly { l: n, j: j + 1 }
                    };
                    self.walk(next, gaps.clone(), pick, out);
                }
            }
        }
    }

    fn finish(&self, gaps: Vec<Option<Delta>>) -> PhiReport {
        let deltas: Vec<Delta> = gaps
            .into_iter()
            .map(|g| g.expect("every gap receives a weight"))
            .collect();
        let n = &self.spec.indices;
        let phi = deltas
            .iter()
            .enumerate()
            .map(|(j, d)| d.value() * (n[j + 1] - n[j]) as f64)
            .sum();
        let q = self.spec.min_gap().unwrap_or(0);
        let report = PhiReport {
            deltas,
            phi,
            lower_bound: (self.spec.k() * q) as f64 / 4.0,
        };
        assert_phi_structure(&report);
        report
    }
}

fn assert_phi_structure(r: &PhiReport) {
    let d = &r.deltas;
    assert_eq!(d[0], Delta::One, "delta_1 = 1");
    assert!(d[d.len() - 1] >= Delta::Half, "delta_(k-1) >= 1/2");
    for w in d.windows(2) {
        assert_eq!(
            w[1] == Delta::One,
            w[0] == Delta::Zero,
            "delta_j = 1 iff delta_(j-1) = 0"
        );
    }
    assert!(r.phi >= r.lower_bound, "phi >= k q / 4");
}

/// Exponent along the most conservative path.
pub fn phi_exponent(spec: &CorrelationSpec) -> Result<PhiReport> {
    Ok(PhiRecursion::new(spec)?.conservative())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayRow {
    pub k: usize,
    pub q: usize,
    pub phi: f64,
    pub abs_i: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub rows: Vec<DecayRow>,
    /// Smallest `C` with `|I| <= C^k k! a^Phi` across the family.
    pub fitted_c: f64,
    /// `f'(0) = 0`, nothing to check.
    pub vacuous: bool,
    pub pass: bool,
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Fits `C` in `|I| <= C^k k! a^Phi` over a family of specs with gaps at
/// least `q`, taking Phi along the realized path.
pub fn decay_check(
    f: &BlaschkeProduct,
    family: &[CorrelationSpec],
    q: usize,
) -> Result<DecayReport> {
    let a = f.contraction();
    let mut rows = Vec::with_capacity(family.len());
    let mut fitted_c: f64 = 0.0;
    for spec in family {
        if spec.k() < 2 || spec.min_gap().unwrap_or(0) < q {
            return Err(Error::InvalidArgument(
                "decay_check needs k >= 2 and gaps >= q",
            ));
        }
        let abs_i = higher_correlation(f, spec)?.norm();
        let phi = if a > 0.0 {
            PhiRecursion::new(spec)?.realized(f)?.phi
        } else {
            phi_exponent(spec)?.phi
        };
        let k = spec.k();
        if a > 0.0 {
            let c = (abs_i / (factorial(k) * a.powf(phi))).powf(1.0 / k as f64);
            fitted_c = fitted_c.max(c);
        }
        rows.push(DecayRow {
            k,
            q: spec.min_gap().unwrap_or(0),
            phi,
            abs_i,
            bound: 0.0,
            pass: true,
        });
    }
    let vacuous = a == 0.0;
    let pass = vacuous || fitted_c <= DECAY_C_MAX;
    for row in &mut rows {
        if vacuous {
            row.bound = f64::NAN;
        } else {
            row.bound = fitted_c.powi(row.k as i32) * factorial(row.k) * a.powf(row.phi);
            row.pass = pass && row.abs_i <= row.bound * (1.0 + 1e-12);
        }
    }
    Ok(DecayReport {
        rows,
        fitted_c,
        vacuous,
        pass,
    })
}
