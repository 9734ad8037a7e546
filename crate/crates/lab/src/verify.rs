//! Property suites behind `verify`. Each returns named checks plus a table
//! for optional CSV output.

use std::path::Path;

use innerlab_core::clark::{check_first_moment, check_second_moment, clark_measure, desintegrate};
use innerlab_core::correlations::{
    decay_check, higher_correlation, pair_correlation, CorrelationSpec, PhiRecursion,
};
use innerlab_core::quadrature::{check_invariance, grid_for_degree};
use innerlab_core::variance::{
    asymptotic_sigma_squared, l2_identity_check, sigma_n_squared, symbol_range, toeplitz_sandwich,
    variance_row, CoefficientSequence,
};
use innerlab_core::{rng, BlaschkeProduct, CirclePoint, InnerMap, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `value <= tolerance`.
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            pass: value <= tolerance,
        }
    }

    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self {
            name: name.into(),
            value: if ok { 1.0 } else { 0.0 },
            tolerance: 1.0,
            pass: ok,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn from_checks(checks: &[Check]) -> Self {
        Self {
            header: vec!["check", "value", "tolerance", "pass"],
            rows: checks
                .iter()
                .map(|c| {
                    vec![
                        c.name.clone(),
                        c.value.to_string(),
                        c.tolerance.to_string(),
                        c.pass.to_string(),
                    ]
                })
                .collect(),
        }
    }

    pub fn write_csv(&self, path: &Path) -> anyhow::Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Suite {
    pub checks: Vec<Check>,
    pub table: Table,
}

impl Suite {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// `z^2`, `z^3` and `z (0.5 - z) / (1 - 0.5 z)`.
pub fn default_maps() -> Vec<BlaschkeProduct> {
    vec![
        BlaschkeProduct::monomial(2).unwrap(),
        BlaschkeProduct::monomial(3).unwrap(),
        BlaschkeProduct::with_zero(C64::new(0.5, 0.0)).unwrap(),
    ]
}

fn label(f: &BlaschkeProduct) -> String {
    let zeros: Vec<String> = f
        .zeros()
        .iter()
        .map(|z| format!("{:.3}{:+.3}i", z.re, z.im))
        .collect();
    format!("[{}]", zeros.join(" "))
}

/// Seeded trigonometric polynomial `∑_{|k| <= order} c_k z^k`.
pub fn trig_polynomial(seed: u64, order: usize) -> impl Fn(C64) -> C64 {
    let coeffs: Vec<(i32, C64)> = (-(order as i32)..=order as i32)
        .enumerate()
        .map(|(i, k)| {
            let i = i as u64;
            (
                k,
                C64::new(
                    rng::uniform(seed, 2 * i) - 0.5,
                    rng::uniform(seed, 2 * i + 1) - 0.5,
                ),
            )
        })
        .collect();
    move |z: C64| coeffs.iter().map(|&(k, c)| c * z.powi(k)).sum()
}

fn finish(checks: Vec<Check>) -> Suite {
    let table = Table::from_checks(&checks);
    Suite { checks, table }
}

pub fn invariance(maps: &[BlaschkeProduct]) -> anyhow::Result<Suite> {
    let mut checks = Vec::new();
    for f in maps {
        for j in 1..=10 {
            let r = check_invariance(f, trig_polynomial(100 + j as u64, j), 1e-10)?;
            checks.push(Check::at_most(
                format!("{} G{j}", label(f)),
                r.residual,
                1e-10,
            ));
        }
    }
    Ok(finish(checks))
}

pub fn clark(maps: &[BlaschkeProduct]) -> anyhow::Result<Suite> {
    let mut checks = Vec::new();
    for f in maps {
        let name = label(f);
        for i in 0..20 {
            let alpha = CirclePoint::new(rng::angle(7, i))?;
            let mu = clark_measure(f, alpha)?;
            checks.push(Check::flag(
                format!("{name} alpha{i} atoms"),
                mu.atoms.len() == f.degree(),
            ));
            checks.push(Check::at_most(
                format!("{name} alpha{i} mass"),
                (mu.weight_sum() - 1.0).abs(),
                1e-10,
            ));
            checks.push(Check::at_most(
                format!("{name} alpha{i} first"),
                check_first_moment(f, alpha)?,
                1e-8,
            ));
            checks.push(Check::at_most(
                format!("{name} alpha{i} second"),
                check_second_moment(f, alpha)?,
                1e-8,
            ));
        }
        let d = desintegrate(f, trig_polynomial(3, 5), 512)?;
        checks.push(Check::at_most(
            format!("{name} desintegration"),
            d.residual,
            1e-8,
        ));
    }
    Ok(finish(checks))
}

/// Deterministic mixed-sign specs with `k` factors, gaps in `{q, q + 1}`
/// and `n_k - n_1 <= max_span`.
pub fn mixed_family(k_max: usize, q: usize, per_k: usize, max_span: usize) -> Vec<CorrelationSpec> {
    let mut out = Vec::new();
    for k in 2..=k_max {
        if (k - 1) * q > max_span {
            break;
        }
        for s in 0..per_k as u64 {
            let seed = 1000 * k as u64 + s;
            let signs: Vec<i8> = (0..k as u64).map(|i| rng::sign(seed, i) as i8).collect();
            let mut idx = vec![1];
            for i in 1..k as u64 {
                let room = max_span + 1 - idx.last().unwrap() - (k - 1 - i as usize) * q;
                let wide = rng::uniform(seed, 100 + i) < 0.5 && room > q;
                idx.push(idx.last().unwrap() + q + wide as usize);
            }
            out.push(CorrelationSpec::new(signs, idx).unwrap());
        }
    }
    out
}

/// Alternating signs `+ - + - ...` at `1, 1 + g, 1 + 2g, ...`.
pub fn alternating(k: usize, g: usize) -> CorrelationSpec {
    let signs = (0..k).map(|i| if i % 2 == 0 { 1 } else { -1 }).collect();
    CorrelationSpec::new(signs, (0..k).map(|i| 1 + g * i).collect()).unwrap()
}

/// `a^{(n_2 - n_1) + (n_4 - n_3) + ...}` for an even number of factors.
pub fn alternating_modulus(spec: &CorrelationSpec, a: f64) -> f64 {
    let e: usize = spec.indices().chunks(2).map(|p| p[1] - p[0]).sum();
    a.powi(e as i32)
}

/// Whether the correlation quadrature of `spec` fits the grid budget for `f`.
pub fn within_budget(f: &BlaschkeProduct, spec: &CorrelationSpec) -> bool {
    let idx = spec.indices();
    let span = (idx[idx.len() - 1] - idx[0]) as u32;
    (f.degree() as u64)
        .checked_pow(span)
        .and_then(|d| d.checked_mul(idx.len() as u64))
        .is_some_and(|d| grid_for_degree(d).is_ok())
}

pub fn correlations(maps: &[BlaschkeProduct]) -> anyhow::Result<Suite> {
    let mut checks = Vec::new();
    let mut table = Table {
        header: vec!["k", "q", "phi", "abs_I", "bound", "pass"],
        rows: Vec::new(),
    };
    for f in maps {
        let name = label(f);
        for j in 2..=6 {
            for k in 1..j {
                let r = pair_correlation(f, k, j)?;
                checks.push(Check::at_most(
                    format!("{name} pair({k},{j})"),
                    r.residual,
                    1e-9,
                ));
            }
        }
        for k in [2, 4, 6] {
            for g in [1, 2] {
                let spec = alternating(k, g);
                if !within_budget(f, &spec) {
                    continue;
                }
                let v = higher_correlation(f, &spec)?.norm();
                let want = alternating_modulus(&spec, f.contraction());
                checks.push(Check::at_most(
                    format!("{name} alternating k={k} gap={g}"),
                    (v - want).abs(),
                    1e-8,
                ));
            }
        }
        let family: Vec<CorrelationSpec> = mixed_family(5, 2, 4, 9)
            .into_iter()
            .filter(|s| within_budget(f, s))
            .collect();
        for spec in &family {
            for p in PhiRecursion::new(spec)?.all_paths() {
                checks.push(Check::flag(
                    format!("{name} phi bound {:?}", spec.indices()),
                    p.phi >= p.lower_bound - 1e-12,
                ));
            }
        }
        let r = decay_check(f, &family, 2)?;
        checks.push(Check::at_most(
            format!("{name} decay C"),
            if r.vacuous { 0.0 } else { r.fitted_c },
            100.0,
        ));
        for row in &r.rows {
            table.rows.push(vec![
                row.k.to_string(),
                row.q.to_string(),
                row.phi.to_string(),
                row.abs_i.to_string(),
                row.bound.to_string(),
                row.pass.to_string(),
            ]);
            checks.push(Check::flag(
                format!("{name} decay row k={}", row.k),
                row.pass,
            ));
        }
    }
    Ok(Suite { checks, table })
}

/// `N` values of the variance sweep.
pub const VARIANCE_NS: [usize; 4] = [100, 400, 1600, 6400];

pub fn variance(maps: &[BlaschkeProduct]) -> anyhow::Result<Suite> {
    let mut checks = Vec::new();
    let half = C64::new(0.5, 0.0);
    let ones = CoefficientSequence::constant(C64::new(1.0, 0.0), *VARIANCE_NS.last().unwrap())?;
    checks.push(Check::at_most(
        "sigma2(1, 0.5, 3)",
        (sigma_n_squared(&ones, half, 3)? - 5.5).abs(),
        0.0,
    ));
    checks.push(Check::at_most(
        "asymptotic(0.5)",
        (asymptotic_sigma_squared(half)? - 3.0).abs(),
        1e-15,
    ));
    let (lo, hi) = symbol_range(half);
    checks.push(Check::at_most(
        "symbol extremes",
        (lo - 1.0 / 3.0).abs().max((hi - 3.0).abs()),
        1e-9,
    ));
    for seed in 0..100 {
        let v = (0..200u64)
            .map(|i| {
                C64::new(
                    rng::uniform(seed, 2 * i) - 0.5,
                    rng::uniform(seed, 2 * i + 1) - 0.5,
                )
            })
            .collect();
        let a = CoefficientSequence::explicit(v)?;
        let ok = toeplitz_sandwich(&a, C64::new(0.0, 0.7), 200).is_ok();
        checks.push(Check::flag(format!("sandwich seed {seed}"), ok));
    }
    for f in maps.iter().filter(|f| f.degree() <= 2) {
        for n in [1, 5, 10] {
            let a = CoefficientSequence::random_signs(n as u64, n)?;
            let r = l2_identity_check(f, &a, n)?;
            checks.push(Check::at_most(
                format!("{} l2 N={n}", label(f)),
                r.residual,
                1e-8,
            ));
        }
    }
    let mut table = Table {
        header: vec![
            "N",
            "S2",
            "sigma2",
            "ratio",
            "growth_ratio",
            "quasi_ratio",
            "Q_N",
        ],
        rows: Vec::new(),
    };
    for n in VARIANCE_NS {
        let row = variance_row(&ones, half, n, 0.2, 0.5)?;
        table.rows.push(vec![
            n.to_string(),
            row.s2.to_string(),
            row.sigma2.to_string(),
            row.ratio.to_string(),
            row.growth_ratio.to_string(),
            row.quasi_ratio.to_string(),
            row.q_count.to_string(),
        ]);
    }
    Ok(Suite { checks, table })
}
