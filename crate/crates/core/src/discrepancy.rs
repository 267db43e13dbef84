//! Geodesic-ball discrepancy `sup_{y, r>0} |ν_X(B(y,r)) − σ_M(B(y,r))|`.
//!
//! For a fixed center the supremum over radii is computed exactly from the
//! sorted distances. The supremum over centers is estimated from a finite
//! center set, so [`estimate_discrepancy`] returns a lower bound on the true
//! discrepancy.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::manifold::Point;
use crate::pointsets::{PointSet, Provenance};
use crate::rng;

/// Which one-sided limit of the radius attains the supremum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `r → radius⁻`: the points at distance `radius` are not yet counted.
    Below,
    /// The closed ball of radius `radius` (or `r → 0⁺` when `radius = 0`).
    Above,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CenterDiscrepancy {
    pub value: f64,
    pub radius: f64,
    pub side: Side,
}

/// Number of points of `x` in the closed ball `B(y, r)`.
pub fn ball_count(x: &PointSet, y: &Point, r: f64) -> Result<usize> {
    if r.is_nan() || r < 0.0 {
        return Err(Error::input(format!("radius must be non-negative, got {r}")));
    }
    let m = x.manifold();
    m.check_point(y)?;
    Ok(x.points().iter().filter(|p| m.distance(y, p) <= r).count())
}

/// Exact `sup_{r>0} |ν_X(B(y,r)) − σ_M(B(y,r))|` for a fixed center `y`.
///
/// With distances sorted, the empirical measure is a right-continuous step
/// function and the volume is continuous and nondecreasing, so the supremum
/// is attained at a jump: either just below it (`V(r) − #{d < r}/N`) or at
/// it (`#{d ≤ r}/N − V(r)`). Ties go to the smallest radius, `Below` first.
pub fn center_discrepancy(x: &PointSet, y: &Point) -> Result<CenterDiscrepancy> {
    let m = x.manifold();
    m.check_point(y)?;
    let mut dists: Vec<f64> = x.points().iter().map(|p| m.distance(y, p)).collect();
    dists.sort_unstable_by(f64::total_cmp);
    center_sup(x, &dists)
}

fn center_sup(x: &PointSet, sorted: &[f64]) -> Result<CenterDiscrepancy> {
    let m = x.manifold();
    let n = sorted.len() as f64;
    let mut best = CenterDiscrepancy {
        value: 0.0,
        radius: 0.0,
        side: Side::Above,
    };
    let mut k = 0;
    while k < sorted.len() {
        let r = sorted[k];
        let mut end = k;
        while end < sorted.len() && sorted[end] == r {
            end += 1;
        }
        let v = m.ball_volume(r)?;
        if r > 0.0 {
            let below = v - k as f64 / n;
            if below > best.value {
                best = CenterDiscrepancy {
                    value: below,
                    radius: r,
                    side: Side::Below,
                };
            }
        }
        let above = end as f64 / n - v;
        if above > best.value {
            best = CenterDiscrepancy {
                value: above,
                radius: r,
                side: Side::Above,
            };
        }
        k = end;
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CenterSet {
    pub code_points: usize,
    pub extra_centers: usize,
    pub seed: u64,
}

/// Lower-bound estimate of the ball discrepancy over a finite center set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscrepancyEstimate {
    pub value: f64,
    pub center: Point,
    /// Index into the center list: code points first, then extra centers.
    pub center_index: usize,
    pub radius: f64,
    pub side: Side,
    pub center_set: CenterSet,
    pub n: usize,
    pub lower_bound: bool,
    pub provenance: Provenance,
}

/// Maximum of [`center_discrepancy`] over all code points plus
/// `extra_centers` seeded uniform points. This never exceeds the true
/// discrepancy.
pub fn estimate_discrepancy(
    x: &PointSet,
    extra_centers: usize,
    seed: u64,
) -> Result<DiscrepancyEstimate> {
    let m = x.manifold();
    let mut centers: Vec<Point> = x.points().to_vec();
    let mut rng = rng::stream(seed, "discrepancy_centers");
    centers.extend((0..extra_centers).map(|_| m.random_point(&mut rng)));

    let per_center: Vec<CenterDiscrepancy> = centers
        .par_iter()
        .map(|c| {
            let mut d: Vec<f64> = x.points().iter().map(|p| m.distance(c, p)).collect();
            d.sort_unstable_by(f64::total_cmp);
            center_sup(x, &d)
        })
        .collect::<Result<_>>()?;

    let (idx, best) = per_center
        .iter()
        .enumerate()
        .fold((0, per_center[0]), |(bi, b), (i, c)| {
            if c.value > b.value {
                (i, *c)
            } else {
                (bi, b)
            }
        });
    Ok(DiscrepancyEstimate {
        value: best.value,
        center: centers[idx].clone(),
        center_index: idx,
        radius: best.radius,
        side: best.side,
        center_set: CenterSet {
            code_points: x.len(),
            extra_centers,
            seed,
        },
        n: x.len(),
        lower_bound: true,
        provenance: x.provenance().clone(),
    })
}
