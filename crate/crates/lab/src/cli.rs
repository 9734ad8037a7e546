//! The `innerlab` command line.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use crate::formats::{ClarkDump, MapSpec, RunConfig};
use crate::{run, verify};
use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use innerlab_core::clark::clark_measure;
use innerlab_core::{BlaschkeProduct, CirclePoint};

#[derive(Parser)]
#[command(
    name = "innerlab",
    version,
    about = "Numerics for iterates of inner functions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Run a property suite; exits 1 if any check fails.
    Verify {
        suite: SuiteName,
        /// Map JSON; the built-in test maps when absent.
        #[arg(long)]
        map: Option<PathBuf>,
        /// Write the suite table here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    Clt {
        #[command(subcommand)]
        command: CltCommand,
    },
    Clark {
        #[command(subcommand)]
        command: ClarkCommand,
    },
}

#[derive(Clone, Copy, ValueEnum)]
pub enum SuiteName {
    Invariance,
    Clark,
    Correlations,
    Variance,
}

#[derive(Subcommand)]
pub enum CltCommand {
    /// Sample T_N and write samples.csv and report.json; exits 1 on a failed fit.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the worker count of the config.
        #[arg(long)]
        workers: Option<usize>,
    },
}

#[derive(Subcommand)]
pub enum ClarkCommand {
    /// Print the atoms of mu_alpha as JSON.
    Dump {
        #[arg(long)]
        map: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
    },
}

fn load_map(path: &PathBuf) -> anyhow::Result<BlaschkeProduct> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let spec: MapSpec =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(spec.build()?)
}

/// Runs one command, writing its report to `w`. `Ok(false)` means a failed
/// check or fit.
pub fn run(cli: Cli, w: &mut dyn Write) -> anyhow::Result<bool> {
    match cli.command {
        Command::Verify { suite, map, csv } => {
            let maps = match &map {
                Some(p) => vec![load_map(p)?],
                None => verify::default_maps(),
            };
            let (name, result) = match suite {
                SuiteName::Invariance => ("invariance", verify::invariance(&maps)?),
                SuiteName::Clark => ("clark", verify::clark(&maps)?),
                SuiteName::Correlations => ("correlations", verify::correlations(&maps)?),
                SuiteName::Variance => ("variance", verify::variance(&maps)?),
            };
            if let Some(path) = csv {
                result.table.write_csv(&path)?;
            }
            for c in result.failures() {
                writeln!(w, "FAIL {}: {:.3e} > {:.3e}", c.name, c.value, c.tolerance)?;
            }
            let passed = result.checks.iter().filter(|c| c.pass).count();
            writeln!(
                w,
                "{name}: {passed} of {} checks passed",
                result.checks.len()
            )?;
            Ok(result.pass())
        }
        Command::Clt {
            command:
                CltCommand::Simulate {
                    config,
                    out,
                    workers,
                },
        } => {
            let text = fs::read_to_string(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            let mut cfg = RunConfig::from_json(&text)
                .with_context(|| format!("parsing {}", config.display()))?;
            if workers.is_some() {
                cfg.workers = workers;
            }
            let report = run::simulate_to(&cfg, &out)?;
            writeln!(w, "{}", serde_json::to_string_pretty(&report)?)?;
            Ok(report.pass)
        }
        Command::Clark {
            command: ClarkCommand::Dump { map, alpha },
        } => {
            let f = load_map(&map)?;
            let mu = clark_measure(&f, CirclePoint::new(alpha)?)?;
            writeln!(
                w,
                "{}",
                serde_json::to_string_pretty(&ClarkDump::from(&mu))?
            )?;
            Ok(true)
        }
    }
}

/// 0 on success, 1 on a failed check, 2 on an error.
pub fn exit_code(result: &anyhow::Result<bool>) -> u8 {
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(_) => 2,
    }
}

#[cfg(test)]
mod tests {
    use std::path::Path;

    use clap::Parser;

    use super::*;
    use crate::run::RunReport;

    fn innerlab(args: &[&str]) -> (anyhow::Result<bool>, String) {
        let cli =
            Cli::try_parse_from(std::iter::once("innerlab").chain(args.iter().copied())).unwrap();
        let mut out = Vec::new();
        let r = run(cli, &mut out);
        (r, String::from_utf8(out).unwrap())
    }

    fn write(dir: &Path, name: &str, body: &str) -> String {
        let p = dir.join(name);
        fs::write(&p, body).unwrap();
        p.to_str().unwrap().to_owned()
    }

    #[test]
    fn verify_suites_pass_and_write_csv() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("corr.csv");
        let (r, out) = innerlab(&["verify", "correlations", "--csv", csv.to_str().unwrap()]);
        assert_eq!(exit_code(&r), 0, "{out}");
        let text = fs::read_to_string(&csv).unwrap();
        assert!(text.starts_with("k,q,phi,abs_I,bound,pass\n"));
        assert!(text.lines().count() > 10);

        let csv = dir.path().join("var.csv");
        let (r, _) = innerlab(&["verify", "variance", "--csv", csv.to_str().unwrap()]);
        assert_eq!(exit_code(&r), 0);
        let text = fs::read_to_string(&csv).unwrap();
        assert!(text.starts_with("N,S2,sigma2,ratio,growth_ratio,quasi_ratio,Q_N\n"));
        assert!(text.contains("\n100,100,296,"));

        for suite in ["invariance", "clark"] {
            let (r, out) = innerlab(&["verify", suite]);
            assert_eq!(exit_code(&r), 0, "{suite}");
            assert!(out.contains("checks passed"));
        }
    }

    #[test]
    fn verify_with_map_file() {
        let dir = tempfile::tempdir().unwrap();
        let map = write(
            dir.path(),
            "map.json",
            r#"{"zeros": [[0, 0], [0.2, 0.3]], "rotation": [0, 1]}"#,
        );
        assert_eq!(
            exit_code(&innerlab(&["verify", "invariance", "--map", &map]).0),
            0
        );
        let bad = write(dir.path(), "bad.json", r#"{"zeros": [[0.2, 0.3]]}"#);
        assert_eq!(
            exit_code(&innerlab(&["verify", "invariance", "--map", &bad]).0),
            2
        );
    }

    #[test]
    fn clark_dump_prints_atoms() {
        let dir = tempfile::tempdir().unwrap();
        let map = write(dir.path(), "map.json", r#"{"zeros": [[0, 0], [0.5, 0]]}"#);
        let (r, out) = innerlab(&["clark", "dump", "--map", &map, "--alpha", "-1.0"]);
        assert!(r.unwrap());
        let dump: ClarkDump = serde_json::from_str(&out).unwrap();
        assert!((dump.alpha - (std::f64::consts::TAU - 1.0)).abs() < 1e-15);
        assert_eq!(dump.atoms.len(), 2);
        let mass: f64 = dump.atoms.iter().map(|a| a[1]).sum();
        assert!((mass - 1.0).abs() < 1e-10);
    }

    fn config(n: usize, samples: usize, extra: &str) -> String {
        format!(
            r#"{{"map": {{"zeros": [[0,0],[0,0]]}}, "coefficients": {{"kind": "ones"}},
                "N": {n}, "samples": {samples}, "seed": 11{extra}}}"#
        )
    }

    #[test]
    fn clt_simulate_writes_outputs_and_sets_exit_code() {
        let dir = tempfile::tempdir().unwrap();
        let loose =
            r#", "tolerances": {"mean": 0.05, "abs2": 0.05, "sq": 0.05, "abs4": 0.1, "ks": 0.05}"#;
        let cfg = write(dir.path(), "ok.json", &config(40, 20_000, loose));
        let out_dir = dir.path().join("ok");
        let (r, _) = innerlab(&[
            "clt",
            "simulate",
            "--config",
            &cfg,
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert_eq!(exit_code(&r), 0);
        let report: RunReport =
            serde_json::from_str(&fs::read_to_string(out_dir.join("report.json")).unwrap())
                .unwrap();
        assert!(report.pass);
        assert_eq!(report.config.n, 40);
        let samples = fs::read_to_string(out_dir.join("samples.csv")).unwrap();
        assert!(samples.starts_with("re,im\n"));
        assert_eq!(samples.lines().count(), 20_001);

        // N = 2 is far from Gaussian
        let cfg = write(dir.path(), "bad.json", &config(2, 20_000, ""));
        let out_dir = dir.path().join("bad");
        let (r, _) = innerlab(&[
            "clt",
            "simulate",
            "--config",
            &cfg,
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert_eq!(exit_code(&r), 1);
        assert!(out_dir.join("report.json").exists());
    }

    #[test]
    fn clt_simulate_is_identical_across_worker_counts() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write(dir.path(), "c.json", &config(12, 30_000, ""));
        let mut outputs = Vec::new();
        for w in ["1", "8"] {
            let out_dir = dir.path().join(w);
            let args = [
                "clt",
                "simulate",
                "--config",
                &cfg,
                "--out",
                out_dir.to_str().unwrap(),
                "--workers",
                w,
            ];
            innerlab(&args).0.unwrap();
            let mut report: RunReport =
                serde_json::from_str(&fs::read_to_string(out_dir.join("report.json")).unwrap())
                    .unwrap();
            report.config.workers = None;
            outputs.push((fs::read(out_dir.join("samples.csv")).unwrap(), report));
        }
        assert_eq!(outputs[0], outputs[1]);
    }

    #[test]
    fn clt_simulate_reports_errors() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write(dir.path(), "c.json", &config(100, 20_000, ""));
        let (r, _) = innerlab(&[
            "clt",
            "simulate",
            "--config",
            &cfg,
            "--out",
            dir.path().join("o").to_str().unwrap(),
        ]);
        assert_eq!(exit_code(&r), 2);
        assert!(format!("{:#}", r.unwrap_err()).contains("cap"));
        assert!(Cli::try_parse_from(["innerlab", "verify", "nothing"]).is_err());
    }
}
