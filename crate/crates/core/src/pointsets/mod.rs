//! Finite point sets ("codes") on a manifold, their generators, and their
//! separation.

mod descent;
mod generators;
mod separation;

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::manifold::{Manifold, Point};

pub use descent::{minimize_riesz_energy, riesz_gradient, DescentOutcome, DescentStop};
pub use generators::{farthest_point_sample, fibonacci_sphere, kronecker_alpha, kronecker_torus};
pub use separation::{min_geodesic_distance, min_geodesic_distance_brute, SeparationReport};

/// Where a point set came from: generator name, seed, and parameters.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub generator: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub params: BTreeMap<String, Value>,
}

impl Provenance {
    pub fn new(generator: impl Into<String>) -> Self {
        Provenance {
            generator: generator.into(),
            seed: None,
            params: BTreeMap::new(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }
}

/// A non-empty ordered list of valid points on one manifold.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    manifold: Manifold,
    points: Vec<Point>,
    provenance: Provenance,
}

impl PointSet {
    pub fn new(manifold: Manifold, points: Vec<Point>, provenance: Provenance) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::input("a point set needs at least one point"));
        }
        for (i, p) in points.iter().enumerate() {
            manifold
                .check_point(p)
                .map_err(|e| Error::input(format!("point {i}: {e}")))?;
        }
        Ok(Self::from_points_unchecked(manifold, points, provenance))
    }

    pub(crate) fn from_points_unchecked(
        manifold: Manifold,
        points: Vec<Point>,
        provenance: Provenance,
    ) -> Self {
        PointSet {
            manifold,
            points,
            provenance,
        }
    }

    /// Builds a set from raw coordinate rows, normalizing each row.
    pub fn from_coords(
        manifold: Manifold,
        rows: Vec<Vec<f64>>,
        provenance: Provenance,
    ) -> Result<Self> {
        let points = rows
            .into_iter()
            .enumerate()
            .map(|(i, c)| {
                manifold
                    .point(c)
                    .map_err(|e| Error::input(format!("point {i}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(manifold, points, provenance)
    }

    pub fn manifold(&self) -> &Manifold {
        &self.manifold
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    #[inline]
    pub(crate) fn dist(&self, i: usize, j: usize) -> f64 {
        self.manifold
            .dist_raw(self.points[i].coords(), self.points[j].coords())
    }
}
