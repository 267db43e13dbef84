use std::f64::consts::PI;

use super::{PointSet, Provenance};
use crate::error::{Error, Result};
use crate::manifold::{Manifold, Point};
use crate::rng;

/// Spiral (Fibonacci) lattice on `S^2`: `z_k = 1 − (2k+1)/n`, longitude
/// `2π·frac(k·g)` with `g` the golden ratio conjugate.
pub fn fibonacci_sphere(n: usize) -> Result<PointSet> {
    if n == 0 {
        return Err(Error::input("fibonacci_sphere needs n >= 1"));
    }
    let m = Manifold::sphere(2)?;
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let rows = (0..n)
        .map(|k| {
            let z = 1.0 - (2 * k + 1) as f64 / n as f64;
            let phi = 2.0 * PI * (k as f64 * g).fract();
            let rho = (1.0 - z * z).max(0.0).sqrt();
            vec![rho * phi.cos(), rho * phi.sin(), z]
        })
        .collect();
    PointSet::from_coords(m, rows, Provenance::new("fibonacci").with_param("n", n))
}

/// Frequencies of the Kronecker sequence: `α_i = frac(2^{1/(i+1)})`,
/// `i = 1..=d`.
pub fn kronecker_alpha(d: usize) -> Vec<f64> {
    (1..=d).map(|i| 2f64.powf(1.0 / (i + 1) as f64).fract()).collect()
}

/// Kronecker lattice `x_k = frac(k·α)`, `k = 0..n−1`, on `T^d`.
pub fn kronecker_torus(d: usize, n: usize) -> Result<PointSet> {
    if n == 0 {
        return Err(Error::input("kronecker_torus needs n >= 1"));
    }
    let m = Manifold::torus(d)?;
    let alpha = kronecker_alpha(d);
    let rows = (0..n)
        .map(|k| alpha.iter().map(|a| (k as f64 * a).fract()).collect())
        .collect();
    PointSet::from_coords(m, rows, Provenance::new("kronecker").with_param("n", n))
}

/// Greedy maximin selection from a seeded uniform candidate pool.
///
/// The first point is drawn uniformly; every further point is the pool
/// candidate farthest from the points chosen so far (lowest index on ties).
pub fn farthest_point_sample(
    m: &Manifold,
    n: usize,
    seed: u64,
    candidate_pool: usize,
) -> Result<PointSet> {
    if n == 0 {
        return Err(Error::input("farthest_point_sample needs n >= 1"));
    }
    if candidate_pool < 10 * n {
        return Err(Error::input(format!(
            "candidate pool {candidate_pool} is smaller than 10·n = {}",
            10 * n
        )));
    }
    let first = m.random_point(&mut rng::stream(seed, "fps_start"));
    let mut pool_rng = rng::stream(seed, "fps_pool");
    let pool: Vec<Point> = (0..candidate_pool).map(|_| m.random_point(&mut pool_rng)).collect();

    let mut chosen = Vec::with_capacity(n);
    let mut nearest: Vec<f64> = pool.iter().map(|p| m.distance(&first, p)).collect();
    chosen.push(first);
    while chosen.len() < n {
        let (best, _) = nearest
            .iter()
            .enumerate()
            .fold((0usize, f64::NEG_INFINITY), |(bi, bd), (i, &d)| {
                if d > bd {
                    (i, d)
                } else {
                    (bi, bd)
                }
            });
        let p = pool[best].clone();
        for (q, slot) in pool.iter().zip(nearest.iter_mut()) {
            let d = m.distance(&p, q);
            if d < *slot {
                *slot = d;
            }
        }
        chosen.push(p);
    }
    Ok(PointSet::from_points_unchecked(
        *m,
        chosen,
        Provenance::new("fps")
            .with_seed(seed)
            .with_param("n", n)
            .with_param("pool", candidate_pool),
    ))
}
