//! Sweeps over point-set sizes measuring the energy gap, discrepancy and
//! separation, with log-log rate fits.

use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;

use crate::discrepancy::estimate_discrepancy;
use crate::energy::{continuous_energy, discrete_energy, RieszParams, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::manifold::{Manifold, ManifoldKind};
use crate::pointsets::{
    farthest_point_sample, fibonacci_sphere, kronecker_torus, min_geodesic_distance, PointSet,
};
use crate::rng;
use crate::verify::theorem_exponent;

/// Recorded with every rate report.
pub const DISCREPANCY_CAVEAT: &str = "disc_estimate is a lower bound of the ball discrepancy \
over a finite center set; the convergence exponent is stated for an upper bound, so the \
fitted constant is indicative only";

pub const CSV_HEADER: &str = "N,energy_discrete,energy_continuous,gap,disc_estimate,separation,gamma_hat";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Generator {
    Fibonacci,
    Kronecker,
    /// Greedy maximin with a pool of `pool_factor · n` uniform candidates.
    Fps { pool_factor: usize },
    Uniform,
}

impl Generator {
    pub fn parse(name: &str, pool_factor: usize) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "fibonacci" => Ok(Generator::Fibonacci),
            "kronecker" => Ok(Generator::Kronecker),
            "fps" | "farthest" | "farthest_point" => Ok(Generator::Fps { pool_factor }),
            "uniform" | "random" => Ok(Generator::Uniform),
            other => Err(Error::input(format!("unknown generator '{other}'"))),
        }
    }

    pub fn generate(&self, m: &Manifold, n: usize, seed: u64) -> Result<PointSet> {
        match (self, m.kind()) {
            (Generator::Fibonacci, ManifoldKind::Sphere) if m.dim() == 2 => fibonacci_sphere(n),
            (Generator::Fibonacci, _) => {
                Err(Error::input("the fibonacci generator only exists on the 2-sphere"))
            }
            (Generator::Kronecker, ManifoldKind::FlatTorus) => kronecker_torus(m.dim(), n),
            (Generator::Kronecker, _) => {
                Err(Error::input("the kronecker generator only exists on flat tori"))
            }
            (Generator::Fps { pool_factor }, _) => {
                farthest_point_sample(m, n, seed, pool_factor.saturating_mul(n))
            }
            (Generator::Uniform, _) => m.sample_uniform(seed, n),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateExperimentConfig {
    pub manifold: Manifold,
    pub s: f64,
    pub generator: Generator,
    pub n_schedule: Vec<usize>,
    pub extra_centers: usize,
    pub seed: u64,
    pub tol: f64,
}

impl RateExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        RieszParams::new(self.s, self.manifold.dim())?;
        if self.n_schedule.is_empty() {
            return Err(Error::input("N schedule is empty"));
        }
        if self.n_schedule[0] < 2 {
            return Err(Error::input("N schedule must start at 2 or more"));
        }
        if self.n_schedule.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::input("N schedule must be strictly increasing"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::input("tol must be positive"));
        }
        Ok(())
    }

    /// Parses `key = value` lines. `#` starts a comment.
    ///
    /// Keys: `manifold`, `dim`, `s`, `generator`, `pool_factor`,
    /// `n_schedule` (comma separated) or `n_min`/`n_max` (doubling),
    /// `extra_centers`, `seed`, `tol`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut kind = None;
        let mut dim = None;
        let mut s = None;
        let mut generator = None;
        let mut pool_factor = 10usize;
        let mut schedule: Option<Vec<usize>> = None;
        let mut n_min = None;
        let mut n_max = None;
        let mut extra_centers = 64usize;
        let mut seed = 0u64;
        let mut tol = DEFAULT_TOL;

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::input(format!("line {}: expected key=value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| Error::input(format!("line {}: invalid {what} '{value}'", lineno + 1));
            match key {
                "manifold" => kind = Some(ManifoldKind::parse(value)?),
                "dim" => dim = Some(value.parse::<usize>().map_err(|_| bad("dim"))?),
                "s" => s = Some(value.parse::<f64>().map_err(|_| bad("s"))?),
                "generator" => generator = Some(value.to_string()),
                "pool_factor" => pool_factor = value.parse().map_err(|_| bad("pool_factor"))?,
                "n_schedule" => {
                    schedule = Some(
                        value
                            .split(',')
                            .map(|v| v.trim().parse::<usize>().map_err(|_| bad("n_schedule")))
                            .collect::<Result<_>>()?,
                    )
                }
                "n_min" => n_min = Some(value.parse::<usize>().map_err(|_| bad("n_min"))?),
                "n_max" => n_max = Some(value.parse::<usize>().map_err(|_| bad("n_max"))?),
                "extra_centers" => extra_centers = value.parse().map_err(|_| bad("extra_centers"))?,
                "seed" => seed = value.parse().map_err(|_| bad("seed"))?,
                "tol" => tol = value.parse().map_err(|_| bad("tol"))?,
                other => return Err(Error::input(format!("line {}: unknown key '{other}'", lineno + 1))),
            }
        }
        let kind = kind.ok_or_else(|| Error::input("missing key 'manifold'"))?;
        let dim = dim.ok_or_else(|| Error::input("missing key 'dim'"))?;
        let s = s.ok_or_else(|| Error::input("missing key 's'"))?;
        let generator = Generator::parse(
            &generator.ok_or_else(|| Error::input("missing key 'generator'"))?,
            pool_factor,
        )?;
        let n_schedule = match (schedule, n_min, n_max) {
            (Some(v), None, None) => v,
            (None, Some(lo), Some(hi)) => doubling_schedule(lo, hi)?,
            (None, None, None) => doubling_schedule(32, 8192)?,
            _ => return Err(Error::input("give either n_schedule or both n_min and n_max")),
        };
        let cfg = RateExperimentConfig {
            manifold: Manifold::new(kind, dim)?,
            s,
            generator,
            n_schedule,
            extra_centers,
            seed,
            tol,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// `lo, 2·lo, 4·lo, …` up to and including `hi`.
pub fn doubling_schedule(lo: usize, hi: usize) -> Result<Vec<usize>> {
    if lo < 2 || hi < lo {
        return Err(Error::input(format!("invalid schedule bounds {lo}..{hi}")));
    }
    let mut v = vec![];
    let mut n = lo;
    while n <= hi {
        v.push(n);
        n = n.checked_mul(2).ok_or_else(|| Error::input("schedule overflow"))?;
    }
    Ok(v)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Least-squares line through `(ln x, ln y)`.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Result<LogLogFit> {
    if xs.len() != ys.len() {
        return Err(Error::input("fit_loglog: xs and ys differ in length"));
    }
    if xs.len() < 2 {
        return Err(Error::input("fit_loglog: need at least two points"));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::input("fit_loglog: inputs must be finite and strictly positive"));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::input("fit_loglog: all x values are equal"));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    let ss_res: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(LogLogFit {
        slope,
        intercept,
        r_squared,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub energy_discrete: f64,
    pub energy_continuous: f64,
    pub gap: f64,
    pub disc_estimate: f64,
    pub separation: f64,
    pub gamma_hat: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateReport {
    pub version: String,
    pub config: RateExperimentConfig,
    pub rows: Vec<RateRow>,
    pub energy_continuous: f64,
    pub theorem_exponent: f64,
    pub fit_gap_vs_n: Option<LogLogFit>,
    pub fit_disc_vs_n: Option<LogLogFit>,
    pub fit_gap_vs_disc: Option<LogLogFit>,
    /// `max gap / disc^θ` over all rows.
    pub c_hat: f64,
    /// Same maximum over the first half of the schedule.
    pub c_hat_first_half: Option<f64>,
    /// `max gap / (c_hat_first_half · disc^θ)` over the second half.
    pub second_half_ratio: Option<f64>,
    /// `max gamma_hat / min gamma_hat` over the schedule.
    pub gamma_band: f64,
    pub caveat: String,
    /// Wall-clock seconds per row; not serialized so reports stay reproducible.
    #[serde(skip)]
    pub runtimes: Vec<f64>,
}

impl RateReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                r.n, r.energy_discrete, r.energy_continuous, r.gap, r.disc_estimate, r.separation, r.gamma_hat
            );
        }
        out
    }
}

fn fit_filtered(xs: &[f64], ys: &[f64]) -> Option<LogLogFit> {
    let (fx, fy): (Vec<f64>, Vec<f64>) = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (*x, *y))
        .unzip();
    fit_loglog(&fx, &fy).ok()
}

fn c_hat_over(rows: &[RateRow], theta: f64) -> f64 {
    rows.iter()
        .map(|r| r.gap / r.disc_estimate.powf(theta))
        .fold(0.0, f64::max)
}

pub fn run_rate_experiment(cfg: &RateExperimentConfig) -> Result<RateReport> {
    cfg.validate()?;
    let m = cfg.manifold;
    let theta = theorem_exponent(m.dim(), cfg.s)?;
    let ec = continuous_energy(&m, cfg.s, cfg.tol)?;

    let mut rows = Vec::with_capacity(cfg.n_schedule.len());
    let mut runtimes = Vec::with_capacity(cfg.n_schedule.len());
    for (idx, &n) in cfg.n_schedule.iter().enumerate() {
        let start = Instant::now();
        let row_seed = rng::derive_seed(cfg.seed, "rate_row", idx as u64);
        let x = cfg.generator.generate(&m, n, row_seed)?;
        let ed = discrete_energy(&x, cfg.s).map_err(|e| match e {
            Error::Domain(msg) => Error::domain(format!("N = {n}: {msg}")),
            other => other,
        })?;
        let disc = estimate_discrepancy(&x, cfg.extra_centers, row_seed)?;
        let sep = min_geodesic_distance(&x)?;
        rows.push(RateRow {
            n,
            energy_discrete: ed,
            energy_continuous: ec,
            gap: (ed - ec).abs(),
            disc_estimate: disc.value,
            separation: sep.min_distance,
            gamma_hat: sep.gamma_hat,
        });
        runtimes.push(start.elapsed().as_secs_f64());
    }

    let ns: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let gaps: Vec<f64> = rows.iter().map(|r| r.gap).collect();
    let discs: Vec<f64> = rows.iter().map(|r| r.disc_estimate).collect();
    let half = rows.len().div_ceil(2);
    let (c_first, second_ratio) = if rows.len() >= 2 {
        let c1 = c_hat_over(&rows[..half], theta);
        let worst = rows[half..]
            .iter()
            .map(|r| r.gap / (c1 * r.disc_estimate.powf(theta)))
            .fold(0.0, f64::max);
        (Some(c1), Some(worst))
    } else {
        (None, None)
    };
    let gmax = rows.iter().map(|r| r.gamma_hat).fold(f64::NEG_INFINITY, f64::max);
    let gmin = rows.iter().map(|r| r.gamma_hat).fold(f64::INFINITY, f64::min);

    Ok(RateReport {
        version: crate::VERSION.to_string(),
        config: cfg.clone(),
        energy_continuous: ec,
        theorem_exponent: theta,
        fit_gap_vs_n: fit_filtered(&ns, &gaps),
        fit_disc_vs_n: fit_filtered(&ns, &discs),
        fit_gap_vs_disc: fit_filtered(&discs, &gaps),
        c_hat: c_hat_over(&rows, theta),
        c_hat_first_half: c_first,
        second_half_ratio: second_ratio,
        gamma_band: gmax / gmin,
        caveat: DISCREPANCY_CAVEAT.to_string(),
        rows,
        runtimes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_exact_power_law() {
        let xs: Vec<f64> = (1..10).map(|i| i as f64 * 1.7).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let f = fit_loglog(&xs, &ys).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);

        let c = fit_loglog(&xs, &vec![4.2; xs.len()]).unwrap();
        assert!(c.slope.abs() < 1e-15);

        let ys: Vec<f64> = xs.iter().map(|x| 3.7 * x.powf(-0.5)).collect();
        let f = fit_loglog(&xs, &ys).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-12);
        assert!((f.intercept - 3.7f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn fit_rejects_bad_input() {
        assert!(fit_loglog(&[1.0, 2.0], &[1.0, 0.0]).is_err());
        assert!(fit_loglog(&[1.0, -2.0], &[1.0, 1.0]).is_err());
        assert!(fit_loglog(&[1.0], &[1.0]).is_err());
        assert!(fit_loglog(&[2.0, 2.0], &[1.0, 3.0]).is_err());
    }

    #[test]
    fn config_parsing() {
        let cfg = RateExperimentConfig::parse(
            "# sweep\nmanifold = torus\ndim = 1\ns = 0.5\ngenerator = kronecker\nn_min = 32\nn_max = 256\nseed = 3\n",
        )
        .unwrap();
        assert_eq!(cfg.n_schedule, vec![32, 64, 128, 256]);
        assert_eq!(cfg.generator, Generator::Kronecker);
        assert!(RateExperimentConfig::parse("manifold = torus\ndim = 1\ns = 1.5\ngenerator = kronecker\n").is_err());
        assert!(RateExperimentConfig::parse("manifold = torus\nbogus = 1\n").is_err());
        assert!(RateExperimentConfig::parse(
            "manifold = torus\ndim = 1\ns = 0.5\ngenerator = kronecker\nn_schedule = 64, 32\n"
        )
        .is_err());
    }

    #[test]
    fn generator_manifold_mismatch() {
        let cfg = RateExperimentConfig {
            manifold: Manifold::torus(2).unwrap(),
            s: 1.0,
            generator: Generator::Fibonacci,
            n_schedule: vec![32, 64],
            extra_centers: 0,
            seed: 1,
            tol: 1e-10,
        };
        assert!(matches!(run_rate_experiment(&cfg), Err(Error::Input(_))));
    }

    #[test]
    fn single_row_has_no_fits() {
        let cfg = RateExperimentConfig {
            manifold: Manifold::sphere(2).unwrap(),
            s: 1.0,
            generator: Generator::Fibonacci,
            n_schedule: vec![64],
            extra_centers: 0,
            seed: 1,
            tol: 1e-10,
        };
        let r = run_rate_experiment(&cfg).unwrap();
        assert!(r.fit_gap_vs_n.is_none() && r.c_hat_first_half.is_none());
        assert!(r.c_hat.is_finite());
    }

    #[test]
    fn small_sweep_is_reproducible() {
        let cfg = RateExperimentConfig {
            manifold: Manifold::torus(1).unwrap(),
            s: 0.5,
            generator: Generator::Kronecker,
            n_schedule: doubling_schedule(32, 512).unwrap(),
            extra_centers: 16,
            seed: 7,
            tol: 1e-10,
        };
        let a = run_rate_experiment(&cfg).unwrap();
        let b = run_rate_experiment(&cfg).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_eq!(a.to_csv(), b.to_csv());
        assert!((a.theorem_exponent - 0.2).abs() < 1e-15);
        assert!(a.rows.windows(2).all(|w| w[0].n < w[1].n));
        assert!(a.rows.iter().all(|r| r.gap >= 0.0));
        assert!(a.to_csv().starts_with(CSV_HEADER));
    }
}
