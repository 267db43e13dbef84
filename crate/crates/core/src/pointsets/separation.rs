use rayon::prelude::*;
use serde::Serialize;

use super::PointSet;
use crate::error::{Error, Result};
use crate::manifold::ManifoldKind;

/// Minimum pairwise geodesic distance of a point set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeparationReport {
    pub n: usize,
    pub min_distance: f64,
    /// Indices `(i, j)`, `i < j`, of the lexicographically first closest pair.
    pub pair: (usize, usize),
    /// `min_distance · N^{1/d}`.
    pub gamma_hat: f64,
    /// Set when the set contains coincident points.
    pub duplicates: bool,
}

#[derive(Clone, Copy, PartialEq, PartialOrd)]
struct Candidate(f64, usize, usize);

fn better(a: Candidate, b: Candidate) -> Candidate {
    // lexicographic on (distance, i, j)
    if (a.0, a.1, a.2) <= (b.0, b.1, b.2) {
        a
    } else {
        b
    }
}

fn report(x: &PointSet, best: Candidate) -> SeparationReport {
    let n = x.len();
    let d = x.manifold().dim() as f64;
    SeparationReport {
        n,
        min_distance: best.0,
        pair: (best.1, best.2),
        gamma_hat: best.0 * (n as f64).powf(1.0 / d),
        duplicates: best.0 == 0.0,
    }
}

/// Exact minimum over all `N(N−1)/2` pairs.
pub fn min_geodesic_distance_brute(x: &PointSet) -> Result<SeparationReport> {
    let n = x.len();
    if n < 2 {
        return Err(Error::input("separation needs at least two points"));
    }
    let rows: Vec<Candidate> = (0..n - 1)
        .into_par_iter()
        .map(|i| {
            let mut best = Candidate(f64::INFINITY, i, i + 1);
            for j in i + 1..n {
                let d = x.dist(i, j);
                if d < best.0 {
                    best = Candidate(d, i, j);
                }
            }
            best
        })
        .collect();
    let best = rows.into_iter().reduce(better).expect("n >= 2");
    Ok(report(x, best))
}

/// Exact minimum pairwise distance. On low-dimensional tori a uniform cell
/// grid restricts the search to neighbouring cells; the answer (distance and
/// pair) is identical to the brute-force scan.
pub fn min_geodesic_distance(x: &PointSet) -> Result<SeparationReport> {
    let m = x.manifold();
    if x.len() < 2 {
        return Err(Error::input("separation needs at least two points"));
    }
    if m.kind() == ManifoldKind::FlatTorus && m.dim() <= 4 {
        if let Some(r) = grid_min_distance(x) {
            return Ok(r);
        }
    }
    min_geodesic_distance_brute(x)
}

fn grid_min_distance(x: &PointSet) -> Option<SeparationReport> {
    let n = x.len();
    let d = x.manifold().dim();
    let k = ((n as f64).powf(1.0 / d as f64).floor() as usize).min(1 << (20 / d));
    if k < 3 {
        return None;
    }
    let h = 1.0 / k as f64;
    let cell_of = |c: &[f64]| -> Vec<usize> {
        c.iter()
            .map(|v| ((v * k as f64).floor() as usize).min(k - 1))
            .collect()
    };
    let flat = |idx: &[usize]| idx.iter().fold(0usize, |acc, &c| acc * k + c);
    let total = k.pow(d as u32);
    let mut cells: Vec<Vec<usize>> = vec![Vec::new(); total];
    let coords: Vec<Vec<usize>> = x.points().iter().map(|p| cell_of(p.coords())).collect();
    for (i, c) in coords.iter().enumerate() {
        cells[flat(c)].push(i);
    }
    let offsets: Vec<Vec<isize>> = (0..3usize.pow(d as u32))
        .map(|mut o| {
            (0..d)
                .map(|_| {
                    let v = (o % 3) as isize - 1;
                    o /= 3;
                    v
                })
                .collect()
        })
        .collect();

    let rows: Vec<Candidate> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut best = Candidate(f64::INFINITY, i, usize::MAX);
            let mut nb = vec![0usize; d];
            for off in &offsets {
                for a in 0..d {
                    nb[a] = (coords[i][a] as isize + off[a]).rem_euclid(k as isize) as usize;
                }
                for &j in &cells[flat(&nb)] {
                    if j <= i {
                        continue;
                    }
                    let dist = x.dist(i, j);
                    let c = Candidate(dist, i, j);
                    if (c.0, c.2) < (best.0, best.2) {
                        best = c;
                    }
                }
            }
            best
        })
        .collect();
    let best = rows.into_iter().reduce(better)?;
    // Any pair closer than one cell side lies in adjacent cells.
    if best.0 <= h {
        Some(report(x, best))
    } else {
        None
    }
}
