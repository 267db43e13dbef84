//! Riesz `s`-energy of point sets and of the normalized volume measure.
//!
//! The discrete energy averages `dist(x, y)^{-s}` over ordered pairs of
//! distinct points with weight `1/N²`. The continuous energy is the double
//! integral of the same kernel against `σ_M × σ_M`; on homogeneous manifolds
//! it reduces to the one-dimensional Stieltjes integral `∫ r^{-s} dV(r)` of
//! the ball-volume profile `V`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::manifold::{unit_ball_volume, Manifold, ManifoldKind, Point};
use crate::pointsets::{PointSet, Provenance};
use crate::quadrature;
use crate::sum::{try_deterministic_sum, NeumaierSum};

/// Default absolute tolerance for the radial quadratures.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Exponent `s` paired with the manifold dimension; valid when `0 < s < d`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RieszParams {
    s: f64,
    d: usize,
}

impl RieszParams {
    pub fn new(s: f64, d: usize) -> Result<Self> {
        if !(s > 0.0 && s < d as f64) {
            return Err(Error::domain(format!(
                "Riesz exponent s = {s} must lie in (0, {d})"
            )));
        }
        Ok(RieszParams { s, d })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn d(&self) -> usize {
        self.d
    }
}

/// `r^{-s}`.
pub fn riesz_kernel(r: f64, s: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::domain(format!("Riesz kernel undefined at r = {r}")));
    }
    if !(s > 0.0) {
        return Err(Error::domain(format!("Riesz exponent must be positive, got {s}")));
    }
    Ok(r.powf(-s))
}

fn coincident(i: usize, j: usize) -> Error {
    Error::domain(format!("points {i} and {j} coincide"))
}

/// Normalized discrete energy `(1/N²) Σ_{x≠y} dist(x,y)^{-s}`.
///
/// Unordered pairs are summed once and doubled. Each row `i` (pairs `i<j`)
/// is accumulated serially with compensation, and rows are combined by the
/// fixed-chunk reduction in [`crate::sum`], so the value does not depend on
/// the thread count.
pub fn discrete_energy(x: &PointSet, s: f64) -> Result<f64> {
    RieszParams::new(s, x.manifold().dim())?;
    let n = x.len();
    if n < 2 {
        return Ok(0.0);
    }
    let total = try_deterministic_sum(n, |i| {
        let mut row = NeumaierSum::new();
        for j in i + 1..n {
            let d = x.dist(i, j);
            if d == 0.0 {
                return Err(coincident(i, j));
            }
            row += d.powf(-s);
        }
        Ok(row.sum())
    })?;
    Ok(2.0 * total / (n as f64 * n as f64))
}

/// Punctured mean potential `(1/N) Σ_{j≠i} dist(x_i, x_j)^{-s}`. The divisor
/// is `N`, not `N − 1`.
pub fn punctured_mean_potential(x: &PointSet, i: usize, s: f64) -> Result<f64> {
    RieszParams::new(s, x.manifold().dim())?;
    let n = x.len();
    if i >= n {
        return Err(Error::input(format!("index {i} out of range for {n} points")));
    }
    let mut acc = NeumaierSum::new();
    for j in (0..n).filter(|&j| j != i) {
        let d = x.dist(i, j);
        if d == 0.0 {
            return Err(coincident(i.min(j), i.max(j)));
        }
        acc += d.powf(-s);
    }
    Ok(acc.sum() / n as f64)
}

/// Discrete energy as the Stieltjes sum `Σ_k r_k^{-s} Δν(r_k)` over the jump
/// radii of the pair-distance distribution `ν(r) = #{(x,y): x≠y, dist ≤ r}/N²`.
pub fn energy_via_distance_cdf(x: &PointSet, s: f64) -> Result<f64> {
    RieszParams::new(s, x.manifold().dim())?;
    let n = x.len();
    if n < 2 {
        return Ok(0.0);
    }
    let mut radii = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let d = x.dist(i, j);
            if d == 0.0 {
                return Err(coincident(i, j));
            }
            radii.push(d);
        }
    }
    radii.sort_by(f64::total_cmp);
    let n2 = n as f64 * n as f64;
    let mut acc = NeumaierSum::new();
    let mut k = 0;
    while k < radii.len() {
        let r = radii[k];
        let mut mult = 0usize;
        while k < radii.len() && radii[k] == r {
            mult += 1;
            k += 1;
        }
        let jump = 2.0 * mult as f64 / n2;
        acc += r.powf(-s) * jump;
    }
    Ok(acc.sum())
}

/// `∫_0^r t^{-s} dV(t)` where `V(t) = σ_M(B(·, t))`: the normalized integral
/// of the kernel over a ball of radius `r`.
///
/// Spheres use the radial density `sin^{d-1} t / ∫_0^π sin^{d-1}` with the
/// substitution `t = u^{1/(d−s)}`, which turns `t^{-s} sin^{d-1} t dt` into
/// `(1/(d−s)) (sin t / t)^{d-1} du`, a bounded integrand. Tori use the exact
/// profile `c_d t^d` up to `t = 1/2` and integrate by parts beyond it,
/// `r^{-s}V(r) + s ∫ t^{-s-1} V(t) dt`, with breakpoints at the kinks `√k/2`.
pub fn ball_energy(m: &Manifold, s: f64, r: f64, tol: f64) -> Result<f64> {
    let d = m.dim();
    RieszParams::new(s, d)?;
    if !(r >= 0.0) {
        return Err(Error::input(format!("radius must be non-negative, got {r}")));
    }
    if !(tol > 0.0) {
        return Err(Error::input(format!("tolerance must be positive, got {tol}")));
    }
    let r = r.min(m.diameter());
    let ds = d as f64 - s;
    match m.kind() {
        ManifoldKind::Sphere => {
            let p = 1.0 / ds;
            let w = m.sphere_radial_normalizer();
            let u_max = r.powf(ds);
            let k = (d - 1) as i32;
            let v = quadrature::integrate(
                |u| {
                    let t = u.powf(p);
                    let sinc = if t == 0.0 { 1.0 } else { t.sin() / t };
                    p * sinc.powi(k)
                },
                0.0,
                u_max,
                tol * w,
            );
            Ok(v / w)
        }
        ManifoldKind::FlatTorus => {
            let c = unit_ball_volume(d);
            let near = d as f64 * c / ds;
            if r <= 0.5 {
                return Ok(near * r.powf(ds));
            }
            // ∫_0^{1/2} s t^{-s-1} c t^d dt = s c (1/2)^{d-s}/(d-s)
            let head = s * c * 0.5f64.powf(ds) / ds;
            let mut pts = vec![0.5];
            for k in 2..d {
                let b = (k as f64).sqrt() / 2.0;
                if b < r {
                    pts.push(b);
                }
            }
            pts.push(r);
            let tail = quadrature::integrate_pieces(
                |t| t.powf(-s - 1.0) * m.ball_volume(t).unwrap_or(1.0),
                &pts,
                tol / s,
            );
            Ok(r.powf(-s) * m.ball_volume(r)? + head + s * tail)
        }
    }
}

/// Continuous energy `∫∫ dist(x,y)^{-s} dσ_M dσ_M` to absolute tolerance `tol`.
pub fn continuous_energy(m: &Manifold, s: f64, tol: f64) -> Result<f64> {
    ball_energy(m, s, m.diameter(), tol)
}

/// Mean potential `∫ dist(x,y)^{-s} dσ_M(y)`. On the implemented manifolds
/// it does not depend on `x`; the point is still validated.
pub fn mean_potential(m: &Manifold, x: &Point, s: f64, tol: f64) -> Result<f64> {
    m.check_point(x)?;
    continuous_energy(m, s, tol)
}

/// Discrete vs continuous energy for one point set.
#[derive(Clone, Debug, Serialize)]
pub struct EnergyReport {
    pub manifold: Manifold,
    pub n: usize,
    pub s: f64,
    pub energy_discrete: f64,
    pub energy_continuous: f64,
    pub gap: f64,
    pub tol: f64,
    pub provenance: Provenance,
}

pub fn energy_report(x: &PointSet, s: f64, tol: f64) -> Result<EnergyReport> {
    let ed = discrete_energy(x, s)?;
    let ec = continuous_energy(x.manifold(), s, tol)?;
    Ok(EnergyReport {
        manifold: *x.manifold(),
        n: x.len(),
        s,
        energy_discrete: ed,
        energy_continuous: ec,
        gap: (ed - ec).abs(),
        tol,
        provenance: x.provenance().clone(),
    })
}
