//! Reference implementations used as oracles. They deliberately avoid the
//! library's own distance and volume formulas.

#![allow(dead_code)]

use std::f64::consts::PI;

use riesz_core::{ManifoldKind, PointSet};

/// Sphere distance from the chord length, switching to the antipodal chord
/// past a right angle so both branches stay well conditioned.
pub fn sphere_dist(a: &[f64], b: &[f64]) -> f64 {
    let minus: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let plus: f64 = a.iter().zip(b).map(|(x, y)| (x + y).powi(2)).sum::<f64>().sqrt();
    if minus <= plus {
        2.0 * (minus / 2.0).min(1.0).asin()
    } else {
        PI - 2.0 * (plus / 2.0).min(1.0).asin()
    }
}

pub fn torus_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let t = (x - y).abs();
            t.min(1.0 - t).powi(2)
        })
        .sum::<f64>()
        .sqrt()
}

pub fn dist(x: &PointSet, i: usize, j: usize) -> f64 {
    let (a, b) = (x.points()[i].coords(), x.points()[j].coords());
    match x.manifold().kind() {
        ManifoldKind::Sphere => sphere_dist(a, b),
        ManifoldKind::FlatTorus => torus_dist(a, b),
    }
}

/// Plain double loop over ordered pairs with Kahan summation.
pub fn naive_energy(x: &PointSet, s: f64) -> f64 {
    let n = x.len();
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let y = dist(x, i, j).powf(-s) - c;
                let t = sum + y;
                c = (t - sum) - y;
                sum = t;
            }
        }
    }
    sum / (n as f64 * n as f64)
}

/// `Si(x) = ∫₀^x sin t / t dt` from its power series.
pub fn sine_integral(x: f64) -> f64 {
    let mut term = x;
    let mut sum = x;
    let mut k = 0u32;
    while term.abs() > 1e-20 {
        k += 1;
        let kk = k as f64;
        term *= -x * x / ((2.0 * kk) * (2.0 * kk + 1.0));
        sum += term / (2.0 * kk + 1.0);
    }
    sum
}

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    assert!(n % 2 == 0);
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + k as f64 * h);
    }
    s * h / 3.0
}

/// Normalized ball volume from elementary closed forms, for the cases the
/// oracles need: S¹, S², and flat tori of any dimension with `r ≤ 1/2`.
pub fn ball_volume_closed(kind: ManifoldKind, d: usize, r: f64) -> f64 {
    match (kind, d) {
        (ManifoldKind::Sphere, 1) => (r / PI).min(1.0),
        (ManifoldKind::Sphere, 2) => (1.0 - r.min(PI).cos()) / 2.0,
        (ManifoldKind::FlatTorus, 1) => (2.0 * r).min(1.0),
        (ManifoldKind::FlatTorus, 2) if r <= 0.5 => PI * r * r,
        (ManifoldKind::FlatTorus, 2) if r * r >= 0.5 => 1.0,
        (ManifoldKind::FlatTorus, 2) => {
            // disc clipped by the four edges of the unit cell
            let h = (r * r - 0.25).sqrt();
            let seg = r * r * (0.5 / r).acos() - 0.5 * h;
            PI * r * r - 4.0 * seg
        }
        _ => panic!("no closed form for {kind:?} d={d} r={r}"),
    }
}

/// Brute-force discrepancy for one center: evaluates `|count/N − V(r)|` on
/// `grid` uniform radii in `[0, diameter]` plus `d ± 1e−9` around every
/// distance `d`, counting points in closed balls directly.
pub fn brute_center_discrepancy(
    dists: &[f64],
    diameter: f64,
    grid: usize,
    volume: impl Fn(f64) -> f64,
) -> f64 {
    let mut sorted = dists.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let count = |r: f64| sorted.partition_point(|&d| d <= r) as f64;
    let mut radii: Vec<f64> = (1..=grid).map(|k| diameter * k as f64 / grid as f64).collect();
    for &d in &sorted {
        radii.push(d);
        radii.push(d + 1e-9);
        if d > 1e-9 {
            radii.push(d - 1e-9);
        }
    }
    radii.push(1e-12);
    radii
        .into_iter()
        .filter(|&r| r > 0.0)
        .map(|r| (count(r) / n - volume(r)).abs())
        .fold(0.0, f64::max)
}
