//! Numerical checks of the ball-volume, packing, and potential estimates
//! that underlie the energy convergence rate.
//!
//! The estimates assert the existence of constants without giving values, so
//! each checker fits the constants on a radius grid and reports them together
//! with a pass flag. Where an explicit formula for a constant is known
//! (`C₂ = 3^d C_top/C_bot`, `C₃ = C_H d/(d−s)`) it is used as the threshold.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::energy::{ball_energy, mean_potential, RieszParams};
use crate::error::{Error, Result};
use crate::manifold::{euclidean_ball_volume, unit_ball_volume, Manifold, Point};
use crate::rng;

/// Factor by which the smallest-decade maximum may exceed the maximum over
/// the remaining grid before a quantity counts as blowing up at `r → 0`.
pub const GROWTH_FACTOR: f64 = 2.0;

/// Relative slack on the small-ball energy threshold `C₃`.
pub const SMALL_BALL_ENERGY_SLACK: f64 = 1e-6;

/// Relative slack on the packing separation test.
const PACKING_SLACK: f64 = 1e-12;

/// Random pool size used by [`packing_number`].
pub const PACKING_POOL: usize = 4000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridSample {
    pub r: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridDescription {
    pub count: usize,
    pub min: f64,
    pub max: f64,
}

impl GridDescription {
    fn of(radii: &[f64]) -> Self {
        GridDescription {
            count: radii.len(),
            min: radii.iter().cloned().fold(f64::INFINITY, f64::min),
            max: radii.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaCheckReport {
    pub lemma: String,
    pub manifold: Manifold,
    pub grid: GridDescription,
    pub constants: BTreeMap<String, f64>,
    pub worst_ratio: f64,
    pub pass: bool,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub samples: Vec<GridSample>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// `count` geometrically spaced radii from `lo` to `hi` inclusive.
pub fn geometric_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![hi],
        _ => {
            let step = (hi / lo).ln() / (count - 1) as f64;
            (0..count)
                .map(|i| if i + 1 == count { hi } else { lo * (step * i as f64).exp() })
                .collect()
        }
    }
}

fn check_grid(radii: &[f64], lo: f64, hi: f64, hi_inclusive: bool, what: &str) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::input(format!("{what}: empty radius grid")));
    }
    for &r in radii {
        let ok = r > lo && if hi_inclusive { r <= hi } else { r < hi };
        if !ok {
            let close = if hi_inclusive { "]" } else { ")" };
            return Err(Error::input(format!(
                "{what}: radius {r} outside ({lo}, {hi}{close}"
            )));
        }
    }
    Ok(())
}

/// Splits samples into the smallest decade of radii and the rest and returns
/// (max over smallest decade, max over the rest).
fn decade_maxima(samples: &[GridSample]) -> (f64, Option<f64>) {
    let rmin = samples.iter().map(|s| s.r).fold(f64::INFINITY, f64::min);
    let mut small = f64::NEG_INFINITY;
    let mut rest: Option<f64> = None;
    for s in samples {
        if s.r <= 10.0 * rmin {
            small = small.max(s.value);
        } else {
            rest = Some(rest.map_or(s.value, |v: f64| v.max(s.value)));
        }
    }
    (small, rest)
}

/// Growth of the smallest-decade maximum over the rest, and whether it
/// stays within [`GROWTH_FACTOR`].
fn bounded_near_zero(samples: &[GridSample]) -> (f64, bool) {
    let (small, rest) = decade_maxima(samples);
    match rest {
        None => (1.0, small.is_finite()),
        Some(rest) if rest == 0.0 => {
            if small == 0.0 {
                (0.0, true)
            } else {
                (f64::INFINITY, false)
            }
        }
        Some(rest) => {
            let g = small / rest;
            (g, g.is_finite() && g <= GROWTH_FACTOR)
        }
    }
}

/// `|μ_M(B(x,r))/V_d(r) − 1| / r²` on a grid inside the injectivity radius;
/// the fitted `C₀` is the grid maximum.
pub fn check_blumlinger_ratio(m: &Manifold, radii: &[f64]) -> Result<LemmaCheckReport> {
    check_grid(radii, 0.0, m.injectivity_radius(), false, "blumlinger")?;
    let samples: Vec<GridSample> = radii
        .par_iter()
        .map(|&r| {
            let ratio = m.ball_measure(r)? / euclidean_ball_volume(m.dim(), r)?;
            Ok(GridSample {
                r,
                value: (ratio - 1.0).abs() / (r * r),
            })
        })
        .collect::<Result<_>>()?;
    let c0 = samples.iter().map(|s| s.value).fold(0.0, f64::max);
    let (growth, pass) = bounded_near_zero(&samples);
    let mut constants = BTreeMap::new();
    constants.insert("C0".into(), c0);
    Ok(LemmaCheckReport {
        lemma: "blumlinger".into(),
        manifold: *m,
        grid: GridDescription::of(radii),
        constants,
        worst_ratio: growth,
        pass: pass && samples.iter().all(|s| s.value.is_finite()),
        tolerance: GROWTH_FACTOR,
        samples,
        note: None,
    })
}

fn min_max_scaled_volume(m: &Manifold, radii: &[f64]) -> Result<(f64, f64)> {
    let d = m.dim() as i32;
    let vals: Vec<f64> = radii
        .par_iter()
        .map(|&r| Ok(m.ball_volume(r)? / r.powi(d)))
        .collect::<Result<_>>()?;
    Ok((
        vals.iter().cloned().fold(f64::INFINITY, f64::min),
        vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    ))
}

/// Fits `C_L ≤ σ(B(·,r))/r^d ≤ C_H` on a grid in `(0, R₁)` and repeats the
/// fit on the same grid scaled by 1/4. Passes when the ratio `C_H/C_L` does
/// not grow as the radius range shrinks.
pub fn check_small_ball_bounds(m: &Manifold, r1: f64, radii: &[f64]) -> Result<LemmaCheckReport> {
    if !(r1 > 0.0 && r1 < m.injectivity_radius()) {
        return Err(Error::input(format!(
            "R1 = {r1} must lie in (0, {})",
            m.injectivity_radius()
        )));
    }
    check_grid(radii, 0.0, r1, false, "small-ball")?;
    let (cl, ch) = min_max_scaled_volume(m, radii)?;
    let quarter: Vec<f64> = radii.iter().map(|r| r / 4.0).collect();
    let (cl4, ch4) = min_max_scaled_volume(m, &quarter)?;
    let ratio = ch / cl;
    let ratio4 = ch4 / cl4;
    let mut constants = BTreeMap::new();
    constants.insert("C_L".into(), cl);
    constants.insert("C_H".into(), ch);
    constants.insert("R1".into(), r1);
    constants.insert("ratio".into(), ratio);
    constants.insert("ratio_quarter".into(), ratio4);
    Ok(LemmaCheckReport {
        lemma: "small_ball".into(),
        manifold: *m,
        grid: GridDescription::of(radii),
        constants,
        worst_ratio: ratio,
        pass: cl > 0.0 && ratio.is_finite() && ratio4 <= ratio * (1.0 + 1e-12),
        tolerance: 1e-12,
        samples: vec![],
        note: None,
    })
}

/// Fits `C_bot ≤ σ(B(·,r))/r^d ≤ C_top` over `(0, diam]`.
pub fn check_large_ball_bounds(m: &Manifold, radii: &[f64]) -> Result<LemmaCheckReport> {
    check_grid(radii, 0.0, m.diameter(), true, "large-ball")?;
    let (cbot, ctop) = min_max_scaled_volume(m, radii)?;
    let mut constants = BTreeMap::new();
    constants.insert("C_bot".into(), cbot);
    constants.insert("C_top".into(), ctop);
    let pass = cbot.is_finite() && ctop.is_finite() && cbot > 0.0 && cbot <= ctop;
    Ok(LemmaCheckReport {
        lemma: "large_ball".into(),
        manifold: *m,
        grid: GridDescription::of(radii),
        constants,
        worst_ratio: ctop / cbot,
        pass,
        tolerance: 0.0,
        samples: vec![],
        note: None,
    })
}

/// Default radius grid for the large-ball fit: 60 geometric radii from
/// `diam·1e-3` up to and including the diameter.
pub fn default_large_grid(m: &Manifold) -> Vec<f64> {
    geometric_grid(m.diameter() * 1e-3, m.diameter(), 60)
}

/// Greedy lower bound on the number of disjoint `q/2`-balls inside
/// `B(x, r + q/2)`.
///
/// Candidates are centers inside `B(x, r)`: `x` itself, then the points at
/// multiples of `q` along each tangent axis, then [`PACKING_POOL`] seeded
/// random points. A candidate is accepted when it is at least `q` from every
/// accepted center.
pub fn packing_number(m: &Manifold, x: &Point, r: f64, q: f64, pool_seed: u64) -> Result<usize> {
    m.check_point(x)?;
    if !(q > 0.0 && q < r) {
        return Err(Error::input(format!("packing needs 0 < q < r, got q = {q}, r = {r}")));
    }
    let reach = r.min(m.diameter());
    let xc = x.coords();
    let mut pool: Vec<Point> = vec![x.clone()];
    let steps = (reach / q).floor() as usize;
    for e in m.tangent_basis(xc) {
        for k in 1..=steps {
            for sign in [1.0, -1.0] {
                let v: Vec<f64> = e.iter().map(|c| sign * k as f64 * q * c).collect();
                pool.push(m.exp_raw(xc, &v));
            }
        }
    }
    let mut rng = rng::stream(pool_seed, "packing_pool");
    let d = m.dim() as f64;
    for _ in 0..PACKING_POOL {
        let len = reach * rng.random::<f64>().powf(1.0 / d);
        let v = m.random_tangent(&mut rng, xc, len);
        pool.push(m.exp_raw(xc, &v));
    }

    let threshold = q * (1.0 - PACKING_SLACK);
    let mut accepted: Vec<&Point> = Vec::new();
    for p in &pool {
        if accepted.iter().all(|a| m.distance(a, p) >= threshold) {
            accepted.push(p);
        }
    }
    Ok(accepted.len())
}

/// Runs [`packing_number`] on `cases` seeded `(x, r, q)` triples and checks
/// every count against `C₂ (r/q)^d` with `C₂ = 3^d C_top/C_bot` fitted by
/// [`check_large_ball_bounds`].
pub fn check_packing(m: &Manifold, cases: usize, seed: u64) -> Result<LemmaCheckReport> {
    let large = check_large_ball_bounds(m, &default_large_grid(m))?;
    let c2 = 3f64.powi(m.dim() as i32) * large.constants["C_top"] / large.constants["C_bot"];
    let mut rng = rng::stream(seed, "packing_cases");
    let params: Vec<(Point, f64, f64, u64)> = (0..cases)
        .map(|i| {
            let x = m.random_point(&mut rng);
            let r = m.diameter() * rng.random_range(0.05..0.95);
            let q = r * rng.random_range(0.1..0.95);
            (x, r, q, rng::derive_seed(seed, "packing_case", i as u64))
        })
        .collect();
    let samples: Vec<GridSample> = params
        .par_iter()
        .map(|(x, r, q, s)| {
            let count = packing_number(m, x, *r, *q, *s)?;
            let bound = c2 * (r / q).powi(m.dim() as i32);
            Ok(GridSample {
                r: *r,
                value: count as f64 / bound,
            })
        })
        .collect::<Result<_>>()?;
    let worst = samples.iter().map(|s| s.value).fold(0.0, f64::max);
    let mut constants = BTreeMap::new();
    constants.insert("C2".into(), c2);
    constants.insert("C_bot".into(), large.constants["C_bot"]);
    constants.insert("C_top".into(), large.constants["C_top"]);
    Ok(LemmaCheckReport {
        lemma: "packing".into(),
        manifold: *m,
        grid: GridDescription::of(&samples.iter().map(|s| s.r).collect::<Vec<_>>()),
        constants,
        worst_ratio: worst,
        pass: worst <= 1.0,
        tolerance: 1.0,
        samples,
        note: Some("greedy counts are lower bounds of the packing number".into()),
    })
}

/// Checks `∫_{B(x,r)} dist(x,·)^{-s} dσ ≤ C₃ r^{d−s}` with `C₃ = C_H d/(d−s)`.
///
/// `C_H` is the supremum of `σ(B(·,r))/r^d` over the grid together with its
/// `r → 0` limit `c_d/μ_M(M)`, since the bound is needed on all of `(0, r)`.
pub fn check_small_ball_energy(m: &Manifold, s: f64, radii: &[f64]) -> Result<LemmaCheckReport> {
    RieszParams::new(s, m.dim())?;
    check_grid(radii, 0.0, m.injectivity_radius(), false, "small-ball energy")?;
    let d = m.dim();
    let (_, grid_ch) = min_max_scaled_volume(m, radii)?;
    let limit = unit_ball_volume(d) / m.total_volume();
    let ch = grid_ch.max(limit);
    let c3 = ch * d as f64 / (d as f64 - s);
    let samples: Vec<GridSample> = radii
        .par_iter()
        .map(|&r| {
            let i = ball_energy(m, s, r, 1e-13)?;
            Ok(GridSample {
                r,
                value: i / r.powf(d as f64 - s),
            })
        })
        .collect::<Result<_>>()?;
    let worst = samples.iter().map(|s| s.value).fold(0.0, f64::max);
    let (_, bounded) = bounded_near_zero(&samples);
    let mut constants = BTreeMap::new();
    constants.insert("C_H".into(), ch);
    constants.insert("C3".into(), c3);
    constants.insert("s".into(), s);
    Ok(LemmaCheckReport {
        lemma: "small_ball_energy".into(),
        manifold: *m,
        grid: GridDescription::of(radii),
        constants,
        worst_ratio: worst / c3,
        pass: bounded && worst <= c3 * (1.0 + SMALL_BALL_ENERGY_SLACK),
        tolerance: SMALL_BALL_ENERGY_SLACK,
        samples,
        note: None,
    })
}

/// Hölder exponent `(d − s)/(d + 1)` of the mean potential.
pub fn holder_exponent(d: usize, s: f64) -> Result<f64> {
    RieszParams::new(s, d)?;
    let d = d as f64;
    Ok((d - s) / (d + 1.0))
}

/// Convergence exponent `(1 − s/d)/(d + 2 − s/d)` of the energy gap in
/// terms of the discrepancy bound.
pub fn theorem_exponent(d: usize, s: f64) -> Result<f64> {
    RieszParams::new(s, d)?;
    let d = d as f64;
    let q = s / d;
    Ok((1.0 - q) / (d + 2.0 - q))
}

/// Samples pairs `(x, x′)` with `dist(x, x′) ≤ t` over four decades of `t`
/// below `min(1, (R₀/3)^{d+1})` and reports `max |U(x) − U(x′)| / t^α` with
/// `α` the Hölder exponent. On homogeneous manifolds `U` is constant and the
/// check passes trivially.
pub fn check_mean_potential_holder(
    m: &Manifold,
    s: f64,
    pairs: usize,
    seed: u64,
    tol: f64,
) -> Result<LemmaCheckReport> {
    let alpha = holder_exponent(m.dim(), s)?;
    let t_max = 0.9 * 1f64.min((m.injectivity_radius() / 3.0).powi(m.dim() as i32 + 1));
    let decades: Vec<f64> = (0..4).map(|k| t_max * 10f64.powi(-k)).collect();
    let mut rng = rng::stream(seed, "holder_pairs");
    let mut cases: Vec<(f64, Point, Point)> = Vec::new();
    for &t in &decades {
        for _ in 0..pairs {
            let x = m.random_point(&mut rng);
            let len = t * rng.random::<f64>();
            let v = m.random_tangent(&mut rng, x.coords(), len);
            let y = m.exp_raw(x.coords(), &v);
            cases.push((t, x, y));
        }
    }
    let diffs: Vec<(f64, f64)> = cases
        .par_iter()
        .map(|(t, x, y)| {
            let ux = mean_potential(m, x, s, tol)?;
            let uy = mean_potential(m, y, s, tol)?;
            Ok((*t, (ux - uy).abs()))
        })
        .collect::<Result<_>>()?;
    let samples: Vec<GridSample> = diffs
        .iter()
        .map(|(t, du)| GridSample {
            r: *t,
            value: du / t.powf(alpha),
        })
        .collect();
    let max_diff = diffs.iter().map(|d| d.1).fold(0.0, f64::max);
    let worst = samples.iter().map(|s| s.value).fold(0.0, f64::max);
    let degenerate = max_diff <= 2.0 * tol;
    let (_, bounded) = bounded_near_zero(&samples);
    let mut constants = BTreeMap::new();
    constants.insert("exponent".into(), alpha);
    constants.insert("max_difference".into(), max_diff);
    Ok(LemmaCheckReport {
        lemma: "mean_potential_holder".into(),
        manifold: *m,
        grid: GridDescription::of(&decades),
        constants,
        worst_ratio: worst,
        pass: worst.is_finite() && (degenerate || bounded),
        tolerance: 2.0 * tol,
        samples: vec![],
        note: degenerate.then(|| {
            "mean potential is constant on this homogeneous manifold; the check is degenerate".into()
        }),
    })
}

/// Parameters for [`verify_all`].
#[derive(Clone, Debug)]
pub struct LemmaSuiteConfig {
    pub s: f64,
    pub r1: f64,
    pub grid_points: usize,
    pub packing_cases: usize,
    pub holder_pairs: usize,
    pub seed: u64,
    pub tol: f64,
}

impl LemmaSuiteConfig {
    pub fn defaults_for(m: &Manifold, s: f64) -> Self {
        LemmaSuiteConfig {
            s,
            r1: m.injectivity_radius() / 2.0,
            grid_points: 40,
            packing_cases: 50,
            holder_pairs: 5,
            seed: 0,
            tol: crate::energy::DEFAULT_TOL,
        }
    }
}

/// Runs every checker with geometric grids derived from `cfg`.
pub fn verify_all(m: &Manifold, cfg: &LemmaSuiteConfig) -> Result<Vec<LemmaCheckReport>> {
    let r0 = m.injectivity_radius();
    let below = |hi: f64| hi * (1.0 - 1e-9);
    let n = cfg.grid_points.max(1);
    Ok(vec![
        check_blumlinger_ratio(m, &geometric_grid(r0 * 1e-4, below(r0), n))?,
        check_small_ball_bounds(m, cfg.r1, &geometric_grid(cfg.r1 * 1e-3, below(cfg.r1), n))?,
        check_large_ball_bounds(m, &geometric_grid(m.diameter() * 1e-3, m.diameter(), n))?,
        check_packing(m, cfg.packing_cases, cfg.seed)?,
        check_small_ball_energy(m, cfg.s, &geometric_grid(r0 * 1e-3, below(r0), n))?,
        check_mean_potential_holder(m, cfg.s, cfg.holder_pairs, cfg.seed, cfg.tol)?,
    ])
}
