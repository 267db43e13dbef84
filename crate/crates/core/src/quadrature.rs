//! Adaptive Gauss–Legendre quadrature on finite intervals.

use std::sync::OnceLock;

use crate::sum::NeumaierSum;

const ORDER: usize = 20;
const MAX_DEPTH: u32 = 50;

struct Rule {
    nodes: [f64; ORDER],
    weights: [f64; ORDER],
}

/// Nodes and weights on [-1, 1] by Newton iteration on P_n.
fn legendre_rule() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = ORDER;
        let mut nodes = [0.0; ORDER];
        let mut weights = [0.0; ORDER];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let k = k as f64;
                    let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Rule { nodes, weights }
    })
}

fn gauss<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let rule = legendre_rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let acc: NeumaierSum = rule
        .nodes
        .iter()
        .zip(rule.weights.iter())
        .map(|(x, w)| w * f(mid + half * x))
        .collect();
    half * acc.sum()
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let left = gauss(f, a, m);
    let right = gauss(f, m, b);
    let refined = left + right;
    let err = (refined - whole).abs();
    if depth >= MAX_DEPTH || err <= tol.max(4.0 * f64::EPSILON * refined.abs()) || m <= a || m >= b
    {
        return refined;
    }
    adapt(f, a, m, left, 0.5 * tol, depth + 1) + adapt(f, m, b, right, 0.5 * tol, depth + 1)
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
///
/// The error estimate compares a 20-point rule on an interval with the same
/// rule on its two halves; the tolerance is split evenly between halves.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    if b < a {
        return -integrate(f, b, a, tol);
    }
    let whole = gauss(&f, a, b);
    adapt(&f, a, b, whole, tol, 0)
}

/// Integrates over consecutive pieces `[p0,p1], [p1,p2], …`, splitting the
/// tolerance in proportion to piece length. Used where the integrand has
/// known kinks.
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: F, points: &[f64], tol: f64) -> f64 {
    if points.len() < 2 {
        return 0.0;
    }
    let span = points[points.len() - 1] - points[0];
    let mut acc = NeumaierSum::new();
    for w in points.windows(2) {
        let share = if span > 0.0 { (w[1] - w[0]) / span } else { 1.0 };
        acc += integrate(&f, w[0], w[1], tol * share);
    }
    acc.sum()
}
