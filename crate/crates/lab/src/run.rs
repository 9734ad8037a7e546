//! `clt simulate`: sample, score and write `samples.csv` and `report.json`.

use std::fs;
use std::path::Path;

use innerlab_core::blaschke::DEFAULT_MAX_ITERATE;
use innerlab_core::clt::{gauss_report, GaussFitReport, NormalizedSum};
use innerlab_core::C64;
use serde::{Deserialize, Serialize};

use crate::formats::{Pair, RunConfig};
use crate::parallel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub samples: usize,
    pub mean: Pair,
    pub e_abs2: f64,
    pub e_sq: Pair,
    pub e_abs4: f64,
    pub ks_re: f64,
    pub ks_im: f64,
    pub pass: bool,
    pub config: RunConfig,
}

impl RunReport {
    fn new(r: &GaussFitReport, config: RunConfig) -> Self {
        Self {
            samples: r.samples,
            mean: [r.mean.re, r.mean.im],
            e_abs2: r.e_abs2,
            e_sq: [r.e_sq.re, r.e_sq.im],
            e_abs4: r.e_abs4,
            ks_re: r.ks_re,
            ks_im: r.ks_im,
            pass: r.pass,
            config,
        }
    }
}

/// Runs the configured simulation and returns the samples with the report.
pub fn simulate(config: &RunConfig) -> anyhow::Result<(Vec<C64>, RunReport)> {
    let f = config.map.build()?;
    let a = config.coefficients.build(config.n)?;
    let cap = config.orbit_cap.unwrap_or(DEFAULT_MAX_ITERATE);
    let sum = NormalizedSum::with_cap(&f, &a, config.n, config.mode.into(), cap)?;
    let dist = parallel::simulate(&sum, config.samples, config.seed, config.workers)?;
    let report = gauss_report(&dist, &config.tolerances.into())?;
    Ok((dist.samples, RunReport::new(&report, config.clone())))
}

pub fn write_samples(path: &Path, samples: &[C64]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["re", "im"])?;
    for t in samples {
        w.serialize((t.re, t.im))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `samples.csv` and `report.json` into `out`, creating it if needed.
pub fn simulate_to(config: &RunConfig, out: &Path) -> anyhow::Result<RunReport> {
    let (samples, report) = simulate(config)?;
    fs::create_dir_all(out)?;
    write_samples(&out.join("samples.csv"), &samples)?;
    fs::write(
        out.join("report.json"),
        serde_json::to_string_pretty(&report)?,
    )?;
    Ok(report)
}
