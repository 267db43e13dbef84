//! The `riesz` command line.
//!
//! Exit codes: 0 on success, 1 for input errors (including bad flags),
//! 2 for numerical-domain errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::discrepancy::estimate_discrepancy;
use crate::energy::{energy_report, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::experiment::{run_rate_experiment, Generator, RateExperimentConfig};
use crate::io::{read_point_set, write_point_set};
use crate::manifold::{Manifold, ManifoldKind};
use crate::pointsets::{min_geodesic_distance, PointSet};
use crate::verify::{verify_all, LemmaSuiteConfig};
use crate::VERSION;

/// Environment variable capping the worker thread count; 0 means automatic.
pub const THREADS_ENV: &str = "RIESZ_THREADS";

#[derive(Parser, Debug)]
#[command(name = "riesz", version, about = "Riesz energy, discrepancy and separation of point sets on spheres and flat tori")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a point set and write it as a point-set file.
    Generate {
        /// sphere or torus
        #[arg(long)]
        manifold: String,
        #[arg(long)]
        dim: usize,
        /// fibonacci, kronecker, fps or uniform
        #[arg(long = "gen")]
        generator: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Candidate pool size for fps (default 10·n).
        #[arg(long)]
        pool: Option<usize>,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Discrete and continuous Riesz energy of a point-set file.
    Energy {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Lower-bound estimate of the geodesic-ball discrepancy.
    Discrepancy {
        #[arg(long)]
        file: PathBuf,
        /// Extra random centers (default 4·N).
        #[arg(long)]
        extra_centers: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Minimum pairwise geodesic distance.
    Separation {
        #[arg(long)]
        file: PathBuf,
    },
    /// Numerical checks of the geometric lemmas on one manifold.
    VerifyLemmas {
        #[arg(long)]
        manifold: String,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        s: f64,
        /// Upper radius of the small-ball check (default half the injectivity radius).
        #[arg(long)]
        r1: Option<f64>,
        #[arg(long, default_value_t = 40)]
        grid_points: usize,
        /// Number of random (r, q) packing cases.
        #[arg(long, default_value_t = 50)]
        cases: usize,
        #[arg(long, default_value_t = 5)]
        holder_pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Convergence-rate sweep driven by a key=value config file.
    Rate {
        #[arg(long)]
        config: PathBuf,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write the JSON summary here instead of stdout.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

/// Parses `args` (including the program name), runs the command, and
/// returns the process exit code.
pub fn dispatch<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    1
                }
            };
            return code;
        }
    };

    let threads = match thread_count() {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            return e.exit_code();
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "failed to start worker threads: {e}");
            return 1;
        }
    };
    // Buffered because the worker pool needs `Send` sinks.
    let (mut obuf, mut ebuf) = (Vec::new(), Vec::new());
    let result = pool.install(|| run(cli.command, &mut obuf, &mut ebuf));
    let _ = out.write_all(&obuf);
    let _ = err.write_all(&ebuf);
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            e.exit_code()
        }
    }
}

fn thread_count() -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse()
            .map_err(|_| Error::input(format!("{THREADS_ENV} must be a non-negative integer, got '{v}'"))),
        _ => Ok(0),
    }
}

fn parse_manifold(kind: &str, dim: usize) -> Result<Manifold> {
    Manifold::new(ManifoldKind::parse(kind)?, dim)
}

fn load(path: &Path, err: &mut Vec<u8>) -> Result<PointSet> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))?;
    let loaded = read_point_set(&text)?;
    for w in &loaded.warnings {
        let _ = writeln!(err, "warning: {}: {w}", path.display());
    }
    Ok(loaded.points)
}

fn write_target(path: Option<&Path>, text: &str, out: &mut Vec<u8>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Error::input(format!("cannot write {}: {e}", p.display()))),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Error::input(format!("cannot write output: {e}"))),
    }
}

/// Serializes `report` and stamps the tool version and invocation onto it.
fn envelope<T: Serialize>(command: &str, args: Value, report: &T) -> String {
    let mut v = serde_json::to_value(report).expect("report serializes");
    let stamp = json!({ "name": command, "version": VERSION, "args": args });
    match &mut v {
        Value::Object(map) => {
            map.insert("command".into(), stamp);
        }
        _ => v = json!({ "command": stamp, "reports": v }),
    }
    let mut s = serde_json::to_string_pretty(&v).expect("json");
    s.push('\n');
    s
}

fn run(cmd: Command, out: &mut Vec<u8>, err: &mut Vec<u8>) -> Result<()> {
    match cmd {
        Command::Generate {
            manifold,
            dim,
            generator,
            n,
            seed,
            pool,
            out: path,
        } => {
            let m = parse_manifold(&manifold, dim)?;
            if n == 0 {
                return Err(Error::input("--n must be positive"));
            }
            let x = match Generator::parse(&generator, 10)? {
                Generator::Fps { .. } => {
                    let pool = pool.unwrap_or(10 * n);
                    crate::pointsets::farthest_point_sample(&m, n, seed, pool)?
                }
                _ if pool.is_some() => return Err(Error::input("--pool only applies to --gen fps")),
                g => g.generate(&m, n, seed)?,
            };
            write_target(path.as_deref(), &write_point_set(&x), out)
        }
        Command::Energy { file, s, tol } => {
            let x = load(&file, err)?;
            let r = energy_report(&x, s, tol)?;
            let args = json!({ "file": file, "s": s, "tol": tol });
            write_target(None, &envelope("energy", args, &r), out)
        }
        Command::Discrepancy {
            file,
            extra_centers,
            seed,
        } => {
            let x = load(&file, err)?;
            let extra = extra_centers.unwrap_or(4 * x.len());
            let r = estimate_discrepancy(&x, extra, seed)?;
            let args = json!({ "file": file, "extra_centers": extra, "seed": seed });
            write_target(None, &envelope("discrepancy", args, &r), out)
        }
        Command::Separation { file } => {
            let x = load(&file, err)?;
            let r = min_geodesic_distance(&x)?;
            #[derive(Serialize)]
            struct WithProvenance<'a> {
                #[serde(flatten)]
                report: &'a crate::pointsets::SeparationReport,
                provenance: &'a crate::pointsets::Provenance,
            }
            let wrapped = WithProvenance {
                report: &r,
                provenance: x.provenance(),
            };
            write_target(None, &envelope("separation", json!({ "file": file }), &wrapped), out)
        }
        Command::VerifyLemmas {
            manifold,
            dim,
            s,
            r1,
            grid_points,
            cases,
            holder_pairs,
            seed,
        } => {
            let m = parse_manifold(&manifold, dim)?;
            let mut cfg = LemmaSuiteConfig::defaults_for(&m, s);
            if let Some(r1) = r1 {
                cfg.r1 = r1;
            }
            cfg.grid_points = grid_points;
            cfg.packing_cases = cases;
            cfg.holder_pairs = holder_pairs;
            cfg.seed = seed;
            let reports = verify_all(&m, &cfg)?;
            let args = json!({
                "manifold": m, "s": s, "r1": cfg.r1, "grid_points": grid_points,
                "cases": cases, "holder_pairs": holder_pairs, "seed": seed, "tol": cfg.tol,
            });
            write_target(None, &envelope("verify-lemmas", args, &reports), out)
        }
        Command::Rate { config, csv, json } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| Error::input(format!("cannot read {}: {e}", config.display())))?;
            let cfg = RateExperimentConfig::parse(&text)?;
            let report = run_rate_experiment(&cfg)?;
            for (row, t) in report.rows.iter().zip(&report.runtimes) {
                let _ = writeln!(err, "N = {:>6}: {t:.3} s", row.n);
            }
            write_target(csv.as_deref(), &report.to_csv(), out)?;
            let args = json!({ "config": config });
            write_target(json.as_deref(), &envelope("rate", args, &report), out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_cli(args: &[&str]) -> (i32, String, String) {
        let mut out = vec![];
        let mut err = vec![];
        let mut full = vec!["riesz"];
        full.extend_from_slice(args);
        let code = dispatch(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run_cli(&["frobnicate"]).0, 1);
        assert_eq!(run_cli(&["energy", "--bogus"]).0, 1);
        assert_eq!(run_cli(&[]).0, 1);
        let (code, out, _) = run_cli(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("generate"));
    }

    #[test]
    fn generate_to_stdout() {
        let (code, out, _) = run_cli(&["generate", "--manifold", "torus", "--dim", "2", "--gen", "kronecker", "--n", "5"]);
        assert_eq!(code, 0);
        let x = read_point_set(&out).unwrap().points;
        assert_eq!(x.len(), 5);
        assert_eq!(x.provenance().generator, "kronecker");
    }

    #[test]
    fn generator_mismatch_is_input_error() {
        let (code, _, err) = run_cli(&["generate", "--manifold", "torus", "--dim", "2", "--gen", "fibonacci", "--n", "5"]);
        assert_eq!(code, 1);
        assert!(err.contains("input error"));
    }

    #[test]
    fn verify_lemmas_bad_exponent_is_domain_error() {
        let (code, _, _) = run_cli(&["verify-lemmas", "--manifold", "sphere", "--dim", "2", "--s", "2.5"]);
        assert_eq!(code, 2);
    }
}
