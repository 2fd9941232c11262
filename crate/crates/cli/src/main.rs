//! `qdirac`: batch verification of the q-deformed Dirac operators.
//!
//! Exit status: 0 when every check passes, 1 when any check fails or the
//! golden file differs, 2 on usage or configuration errors, 3 when a
//! computation aborts.

mod config;
mod report;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Format, RunConfig};
use report::CheckReport;
use suites::SuiteId;

#[derive(Parser)]
#[command(name = "qdirac", version, about = "Verify spectral data of q-deformed Dirac operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Every suite below.
    VerifyAll,
    /// Representation layer: relations, CG tables, classical limit.
    Infra,
    /// Spectrum and multiplicities of the algebraic Dirac operator on SU_q(2).
    Su2Spectrum,
    /// Algebraic operator against the q-bracket of the geometric one.
    Su2Fundamental,
    /// q-Clifford relations of su₂ and the singlet reconstruction.
    Su2Clifford,
    /// Summability fits and the homotopy family of Fredholm modules.
    Su2Fredholm,
    /// Covariant generators and Dirac operator candidates on SU_q(3).
    Su3Clifford,
    /// The standard Podleś sphere.
    Podles,
    /// The U_q(2) spectral triple.
    Uq2,
}

impl Command {
    fn suites(self) -> Vec<SuiteId> {
        match self {
            Command::VerifyAll => SuiteId::ALL.to_vec(),
            Command::Infra => vec![SuiteId::Infra],
            Command::Su2Spectrum => vec![SuiteId::Su2Spectrum],
            Command::Su2Fundamental => vec![SuiteId::Su2Fundamental],
            Command::Su2Clifford => vec![SuiteId::Su2Clifford],
            Command::Su2Fredholm => vec![SuiteId::Su2Fredholm],
            Command::Su3Clifford => vec![SuiteId::Su3Clifford],
            Command::Podles => vec![SuiteId::Podles],
            Command::Uq2 => vec![SuiteId::Uq2],
        }
    }
}

#[derive(Args)]
struct Opts {
    /// Flat `key = value` file; flags given here override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Deformation parameter as a decimal string in (0, 1).
    #[arg(long, global = true)]
    q: Option<String>,
    /// Significand bits (64 up to the backend maximum).
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// SU_q(2) / U_q(2) truncation (`4`, `3.5` or `7/2`).
    #[arg(long, global = true)]
    jmax: Option<String>,
    /// Podleś truncation, half-odd.
    #[arg(long, global = true)]
    lmax: Option<String>,
    /// U_q(2) charge window.
    #[arg(long, global = true)]
    cmax: Option<String>,
    /// Truncation for the F_q power-law fit.
    #[arg(long, global = true)]
    fredholm_jmax: Option<String>,
    #[arg(long, global = true)]
    probe_order: Option<u32>,
    #[arg(long, global = true)]
    t_grid: Option<usize>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// `json` (check lines) or `csv` (tables) on stdout.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Directory for `reports.jsonl` and the CSV tables.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Compare the emitted JSON lines with this file.
    #[arg(long, global = true)]
    golden: Option<PathBuf>,
    /// Add wall-clock time to each report (breaks byte-identical reruns).
    #[arg(long, global = true)]
    timings: bool,
    /// Tolerance override `check=value`, repeatable.
    #[arg(long = "tol", global = true, value_name = "CHECK=VALUE")]
    tol: Vec<String>,
}

impl Opts {
    fn resolve(&self) -> Result<RunConfig, config::ConfigError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        let flags: [(&str, Option<String>); 11] = [
            ("q", self.q.clone()),
            ("precision", self.precision.map(|x| x.to_string())),
            ("jmax", self.jmax.clone()),
            ("lmax", self.lmax.clone()),
            ("cmax", self.cmax.clone()),
            ("fredholm-jmax", self.fredholm_jmax.clone()),
            ("probe-order", self.probe_order.map(|x| x.to_string())),
            ("t-grid", self.t_grid.map(|x| x.to_string())),
            ("samples", self.samples.map(|x| x.to_string())),
            ("format", self.format.clone()),
            ("golden", self.golden.as_ref().map(|p| p.display().to_string())),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                cfg.set(k, &v)?;
            }
        }
        if let Some(o) = &self.out {
            cfg.out = Some(o.clone());
        }
        if self.timings {
            cfg.timings = true;
        }
        for t in &self.tol {
            let Some((k, v)) = t.split_once('=') else {
                return Err(config::ConfigError(format!("--tol expects CHECK=VALUE, got {t:?}")));
            };
            cfg.set(&format!("tol.{}", k.trim()), v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match cli.opts.resolve() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("qdirac: {e}");
            return ExitCode::from(2);
        }
    };

    // suites are independent; run them side by side
    let ids = cli.command.suites();
    let results: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = ids.iter().map(|id| s.spawn(|| suites::run(*id, &cfg))).collect();
        handles.into_iter().map(|h| h.join().expect("suite thread panicked")).collect()
    });
    let mut reports: Vec<CheckReport> = Vec::new();
    let mut tables = Vec::new();
    for (id, r) in ids.iter().zip(results) {
        match r {
            Ok(s) => {
                reports.extend(s.reports);
                tables.extend(s.tables);
            }
            Err(e) => {
                eprintln!("qdirac: suite {id:?} aborted: {e}");
                return ExitCode::from(3);
            }
        }
    }
    reports.sort_by(|a, b| a.check.cmp(&b.check));
    let lines: Vec<String> = reports.iter().map(CheckReport::to_line).collect();
    let mut jsonl = lines.join("\n");
    jsonl.push('\n');

    match cfg.format {
        Format::Json => print!("{jsonl}"),
        Format::Csv => {
            for (i, t) in tables.iter().enumerate() {
                if tables.len() > 1 {
                    if i > 0 {
                        println!();
                    }
                    println!("# {}", t.name);
                }
                print!("{}", t.to_csv());
            }
        }
    }

    if let Some(dir) = &cfg.out {
        let written = std::fs::create_dir_all(dir).and_then(|_| {
            std::fs::write(dir.join("reports.jsonl"), &jsonl)?;
            for t in &tables {
                std::fs::write(dir.join(format!("{}.csv", t.name)), t.to_csv())?;
            }
            Ok(())
        });
        if let Err(e) = written {
            eprintln!("qdirac: cannot write {}: {e}", dir.display());
            return ExitCode::from(3);
        }
    }

    let failed: Vec<&str> = reports.iter().filter(|r| !r.pass()).map(|r| r.check.as_str()).collect();
    for f in &failed {
        eprintln!("qdirac: FAIL {f}");
    }
    let mut ok = failed.is_empty();
    if let Some(g) = &cfg.golden {
        match std::fs::read_to_string(g) {
            Ok(expected) if expected == jsonl => {}
            Ok(_) => {
                eprintln!("qdirac: output differs from golden file {}", g.display());
                ok = false;
            }
            Err(e) => {
                eprintln!("qdirac: cannot read golden file {}: {e}", g.display());
                return ExitCode::from(2);
            }
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
