use rayon::prelude::*;
use serde::Serialize;

use super::PointSet;
use crate::energy::{discrete_energy, RieszParams};
use crate::error::{Error, Result};
use crate::manifold::{ManifoldKind, Point};
use crate::sum::NeumaierSum;

/// Maximum number of step halvings per line search.
const MAX_HALVINGS: usize = 60;

/// Distances to the torus cut locus below which a pair is treated as sitting
/// on it. Tried widest first until a line search succeeds; the last entry
/// frees exact ties only.
const KINK_WINDOWS: [f64; 5] = [1e-3, 1e-6, 1e-9, 1e-12, 0.0];

/// Coordinate sweeps for the minimal-norm subgradient.
const KINK_SWEEPS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DescentStop {
    /// Relative energy decrease fell below the tolerance.
    Converged,
    /// Gradient vanished exactly.
    Stationary,
    MaxIterations,
    /// No decrease after the maximum number of halvings.
    LineSearchFailed,
}

#[derive(Clone, Debug)]
pub struct DescentOutcome {
    pub points: PointSet,
    /// Energy before the first step followed by the energy after every
    /// accepted step.
    pub energies: Vec<f64>,
    pub iterations: usize,
    pub stop: DescentStop,
}

/// Riemannian gradient of the discrete energy with respect to each point.
///
/// For point `i` this is `(2/N²) Σ_{j≠i} s·d_ij^{-s-1}·u_ij`, where `u_ij`
/// is the unit tangent at `x_i` pointing towards `x_j`. Entries are ambient
/// vectors (tangent to the sphere at `x_i`).
pub fn riesz_gradient(x: &PointSet, s: f64) -> Result<Vec<Vec<f64>>> {
    RieszParams::new(s, x.manifold().dim())?;
    let m = *x.manifold();
    let n = x.len();
    let scale = 2.0 / (n as f64 * n as f64);
    (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = x.points()[i].coords();
            let mut acc = vec![NeumaierSum::new(); m.ambient_dim()];
            for j in (0..n).filter(|&j| j != i) {
                let xj = x.points()[j].coords();
                let d = m.dist_raw(xi, xj);
                if d == 0.0 {
                    return Err(Error::domain(format!(
                        "points {} and {} coincide",
                        i.min(j),
                        i.max(j)
                    )));
                }
                let w = s * d.powf(-s - 1.0);
                for (a, u) in acc.iter_mut().zip(m.direction_raw(xi, xj)) {
                    *a += w * u;
                }
            }
            Ok(acc.into_iter().map(|a| scale * a.sum()).collect())
        })
        .collect()
}

/// A pair whose wrapped difference on `axis` is within the window of half a
/// period. There `dist^{-s}` has a convex kink, and its contribution to the
/// two gradients is any `±τ` with `|τ| ≤ bound`.
struct Kink {
    i: usize,
    j: usize,
    axis: usize,
    bound: f64,
}

/// Descent direction (as a gradient) that treats near-antipodal torus axes
/// as kinks and picks the minimal-norm element of the resulting
/// subdifferential. With a zero window only exact ties are freed.
fn kink_aware_gradient(x: &PointSet, s: f64, window: f64) -> Result<Vec<Vec<f64>>> {
    let mut g = riesz_gradient(x, s)?;
    if x.manifold().kind() != ManifoldKind::FlatTorus {
        return Ok(g);
    }
    let n = x.len();
    let scale = 2.0 / (n as f64 * n as f64);
    let mut kinks = vec![];
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (x.points()[i].coords(), x.points()[j].coords());
            let delta: Vec<f64> = a.iter().zip(b).map(|(p, q)| (q - p) - (q - p).round()).collect();
            let d = norm(&delta);
            let w = scale * s * d.powf(-s - 1.0);
            for (axis, &dk) in delta.iter().enumerate() {
                if dk.abs() >= 0.5 - window {
                    // undo what the plain gradient added on this axis
                    if dk.abs() != 0.5 {
                        g[i][axis] -= w * dk / d;
                        g[j][axis] += w * dk / d;
                    }
                    kinks.push(Kink {
                        i,
                        j,
                        axis,
                        bound: w * dk.abs() / d,
                    });
                }
            }
        }
    }
    let mut tau = vec![0.0; kinks.len()];
    for _ in 0..KINK_SWEEPS {
        let mut change = 0.0f64;
        for (k, t) in kinks.iter().zip(tau.iter_mut()) {
            let gi = g[k.i][k.axis] - *t;
            let gj = g[k.j][k.axis] + *t;
            let nt = (0.5 * (gj - gi)).clamp(-k.bound, k.bound);
            g[k.i][k.axis] = gi + nt;
            g[k.j][k.axis] = gj - nt;
            change = change.max((nt - *t).abs());
            *t = nt;
        }
        if change == 0.0 {
            break;
        }
    }
    Ok(g)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|t| t * t).sum::<f64>().sqrt()
}

/// Halves the maximal displacement from `t0` until the energy strictly
/// decreases.
fn line_search(
    current: &PointSet,
    s: f64,
    energy: f64,
    grad: &[Vec<f64>],
    gmax: f64,
    t0: f64,
) -> Option<(PointSet, f64)> {
    let m = *current.manifold();
    let mut t = t0;
    for _ in 0..=MAX_HALVINGS {
        let step = t / gmax;
        let moved: Vec<Point> = current
            .points()
            .iter()
            .zip(grad)
            .map(|(p, g)| {
                let v: Vec<f64> = g.iter().map(|c| -step * c).collect();
                m.exp_raw(p.coords(), &v)
            })
            .collect();
        let cand = PointSet::from_points_unchecked(m, moved, current.provenance().clone());
        if let Ok(e) = discrete_energy(&cand, s) {
            if e < energy {
                return Some((cand, e));
            }
        }
        t *= 0.5;
    }
    None
}

/// Riemannian gradient descent on the discrete Riesz energy.
///
/// Each iteration moves every point along the negative gradient through the
/// exponential map. The step is scaled so the largest single displacement
/// is `t`, starting from `t = 0.1·N^{-1/d}` and halved until the energy
/// strictly decreases. On tori, pairs converging to half a period apart put
/// the iterate on a kink of the energy, where plain gradient steps zigzag.
/// The direction therefore relaxes the kink terms of pairs within a window
/// of the cut locus to their minimal-norm subgradient, shrinking the window
/// whenever the line search fails.
pub fn minimize_riesz_energy(
    x0: &PointSet,
    s: f64,
    max_iters: usize,
    tol: f64,
) -> Result<DescentOutcome> {
    let m = *x0.manifold();
    RieszParams::new(s, m.dim())?;
    let n = x0.len();
    let mut energy = discrete_energy(x0, s).map_err(|e| match e {
        Error::Domain(msg) if msg.contains("coincide") => Error::input(msg),
        other => other,
    })?;
    let mut current = x0.clone();
    let mut energies = vec![energy];
    let t0 = 0.1 * (n as f64).powf(-1.0 / m.dim() as f64);

    let mut iterations = 0;
    let mut stop = DescentStop::MaxIterations;
    while iterations < max_iters {
        let mut accepted = None;
        let mut stationary = false;
        for window in KINK_WINDOWS {
            let grad = kink_aware_gradient(&current, s, window)?;
            let gmax = grad.iter().map(|g| norm(g)).fold(0.0, f64::max);
            if gmax == 0.0 {
                stationary = window == 0.0;
                continue;
            }
            accepted = line_search(&current, s, energy, &grad, gmax, t0);
            if accepted.is_some() {
                break;
            }
        }
        if stationary {
            stop = DescentStop::Stationary;
            break;
        }
        let Some((next, e)) = accepted else {
            stop = DescentStop::LineSearchFailed;
            break;
        };
        iterations += 1;
        let rel = (energy - e) / energy;
        current = next;
        energy = e;
        energies.push(e);
        if rel < tol {
            stop = DescentStop::Converged;
            break;
        }
    }

    let provenance = x0
        .provenance()
        .clone()
        .with_param("descent_s", s)
        .with_param("descent_iterations", iterations);
    Ok(DescentOutcome {
        points: current.with_provenance(provenance),
        energies,
        iterations,
        stop,
    })
}
