//! Compensated summation with a reduction order that does not depend on the
//! number of worker threads.

use std::ops::{Add, AddAssign};

use rayon::prelude::*;

/// Rows per leaf of the reduction tree.
pub const CHUNK: usize = 64;

/// Kahan–Babuška–Neumaier accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct NeumaierSum {
    s: f64,
    c: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn sum(&self) -> f64 {
        self.s + self.c
    }
}

impl AddAssign<f64> for NeumaierSum {
    #[inline]
    fn add_assign(&mut self, rhs: f64) {
        let t = self.s + rhs;
        if self.s.abs() >= rhs.abs() {
            self.c += (self.s - t) + rhs;
        } else {
            self.c += (rhs - t) + self.s;
        }
        self.s = t;
    }
}

impl Add for NeumaierSum {
    type Output = NeumaierSum;

    fn add(mut self, rhs: Self) -> Self {
        self += rhs.s;
        self.c += rhs.c;
        self
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        for x in iter {
            acc += x;
        }
        acc
    }
}

/// Pairwise tree reduction over a slice of partial sums.
fn tree_reduce(parts: &[NeumaierSum]) -> NeumaierSum {
    match parts.len() {
        0 => NeumaierSum::new(),
        1 => parts[0],
        n => {
            let (l, r) = parts.split_at(n / 2);
            tree_reduce(l) + tree_reduce(r)
        }
    }
}

/// Sums `f(0) + … + f(n-1)` where each term may itself be expensive.
///
/// Terms are grouped into fixed chunks of [`CHUNK`] consecutive indices, each
/// chunk is accumulated serially, and the chunk totals are combined by a
/// fixed binary tree. The grouping depends only on `n`, so the result is
/// bit-identical for any rayon pool size.
pub fn deterministic_sum<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let chunks: Vec<NeumaierSum> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(n);
            (lo..hi).map(&f).collect()
        })
        .collect();
    tree_reduce(&chunks).sum()
}

/// Fallible variant of [`deterministic_sum`]. When several terms fail, the
/// error of the lowest index is returned.
pub fn try_deterministic_sum<F, E>(n: usize, f: F) -> Result<f64, E>
where
    F: Fn(usize) -> Result<f64, E> + Sync,
    E: Send,
{
    let chunks: Vec<Result<NeumaierSum, E>> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(n);
            let mut acc = NeumaierSum::new();
            for i in lo..hi {
                acc += f(i)?;
            }
            Ok(acc)
        })
        .collect();
    let mut parts = Vec::with_capacity(chunks.len());
    for c in chunks {
        parts.push(c?);
    }
    Ok(tree_reduce(&parts).sum())
}
