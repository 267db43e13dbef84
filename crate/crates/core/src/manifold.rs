//! Unit spheres `S^d ⊂ R^{d+1}` and flat tori `T^d = R^d / Z^d`.
//!
//! Both are homogeneous, so the volume of a geodesic ball depends only on its
//! radius. Sphere points are unit vectors in the ambient space; torus points
//! are coordinates in `[0, 1)^d`.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pointsets::{PointSet, Provenance};
use crate::quadrature;
use crate::rng;

/// Tolerance used when checking unit norm and tangency.
pub const COORD_TOL: f64 = 1e-12;

/// Distances within this margin of the injectivity radius are treated as on
/// the cut locus by [`Manifold::log_map`].
const CUT_LOCUS_MARGIN: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ManifoldKind {
    Sphere,
    FlatTorus,
}

impl ManifoldKind {
    pub fn name(&self) -> &'static str {
        match self {
            ManifoldKind::Sphere => "sphere",
            ManifoldKind::FlatTorus => "torus",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sphere" | "s" => Ok(ManifoldKind::Sphere),
            "torus" | "flat_torus" | "flat-torus" | "t" => Ok(ManifoldKind::FlatTorus),
            other => Err(Error::input(format!("unknown manifold kind '{other}'"))),
        }
    }
}

/// A concrete compact connected Riemannian manifold of dimension `dim`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Manifold {
    kind: ManifoldKind,
    dim: usize,
}

/// A point on a manifold. Construct through [`Manifold::point`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Point(Vec<f64>);

impl Point {
    /// Wraps coordinates without any validation.
    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }
}

/// A tangent vector attached to a base point. For spheres the components
/// live in the ambient space and are orthogonal to the base.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TangentVector {
    base: Point,
    components: Vec<f64>,
}

impl TangentVector {
    pub fn base(&self) -> &Point {
        &self.base
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn norm(&self) -> f64 {
        norm(&self.components)
    }
}

/// Volume `c_d = π^{d/2} / Γ(d/2 + 1)` of the unit ball in `R^d`.
pub fn unit_ball_volume(d: usize) -> f64 {
    // c_0 = 1, c_1 = 2, c_d = (2π/d) c_{d-2}
    let mut c = if d % 2 == 0 { 1.0 } else { 2.0 };
    let mut k = if d % 2 == 0 { 2 } else { 3 };
    while k <= d {
        c *= 2.0 * PI / k as f64;
        k += 2;
    }
    c
}

/// Volume of the Euclidean ball of radius `r` in `R^d`.
pub fn euclidean_ball_volume(d: usize, r: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::input("dimension must be at least 1"));
    }
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::input(format!("radius must be finite and non-negative, got {r}")));
    }
    Ok(unit_ball_volume(d) * r.powi(d as i32))
}

/// `∫_0^π sin^k t dt`.
fn sine_power_integral_full(k: usize) -> f64 {
    let mut w = if k % 2 == 0 { PI } else { 2.0 };
    let mut j = if k % 2 == 0 { 2 } else { 3 };
    while j <= k {
        w *= (j as f64 - 1.0) / j as f64;
        j += 2;
    }
    w
}

/// `∫_0^r sin^k t dt` for `r ∈ [0, π]`, accurate relative to the value for small `r`.
fn sine_power_integral(k: usize, r: f64) -> f64 {
    match k {
        0 => r,
        1 => 2.0 * (0.5 * r).sin().powi(2),
        _ => {
            let scale = r.powi(k as i32 + 1) / (k as f64 + 1.0);
            let tol = (1e-14 * scale).max(1e-300);
            let pts: &[f64] = if r > 0.5 * PI { &[0.0, 0.5 * PI, r] } else { &[0.0, r] };
            quadrature::integrate_pieces(|t| t.sin().powi(k as i32), pts, tol)
        }
    }
}

/// Volume of `{y ∈ [-1/2, 1/2]^d : |y| ≤ r}`, i.e. the Euclidean ball clipped
/// to the unit cube centred at the origin.
fn clipped_ball_volume(d: usize, r: f64) -> f64 {
    if r <= 0.5 {
        return unit_ball_volume(d) * r.powi(d as i32);
    }
    if r * r >= d as f64 / 4.0 {
        return 1.0;
    }
    match d {
        1 => 1.0,
        2 => {
            // Disc minus the four circular segments beyond the edges; the
            // segments are disjoint while r < √2/2.
            let segment = r * r * (0.5 / r).acos() - 0.5 * (r * r - 0.25).sqrt();
            (PI * r * r - 4.0 * segment).clamp(0.0, 1.0)
        }
        _ => {
            // Slice along the last axis. The slice radius crosses the kinks of
            // the (d-1)-dimensional profile at √(k)/2.
            let mut pts = vec![0.0];
            for k in (1..d).rev() {
                let z2 = r * r - k as f64 / 4.0;
                if z2 > 0.0 && z2.sqrt() < 0.5 {
                    pts.push(z2.sqrt());
                }
            }
            pts.push(0.5);
            let v = 2.0
                * quadrature::integrate_pieces(
                    |z| clipped_ball_volume(d - 1, (r * r - z * z).max(0.0).sqrt()),
                    &pts,
                    1e-13,
                );
            v.clamp(0.0, 1.0)
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
fn wrap_unit(x: f64) -> f64 {
    let w = x - x.floor();
    if w >= 1.0 {
        0.0
    } else {
        w
    }
}

/// Signed minimum-image difference `y - x` on the unit circle, in `[-1/2, 1/2]`.
#[inline]
fn torus_delta(x: f64, y: f64) -> f64 {
    let d = y - x;
    d - d.round()
}

impl Manifold {
    pub fn new(kind: ManifoldKind, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::input("manifold dimension must be at least 1"));
        }
        Ok(Manifold { kind, dim })
    }

    pub fn sphere(dim: usize) -> Result<Self> {
        Self::new(ManifoldKind::Sphere, dim)
    }

    pub fn torus(dim: usize) -> Result<Self> {
        Self::new(ManifoldKind::FlatTorus, dim)
    }

    pub fn kind(&self) -> ManifoldKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored coordinates per point.
    pub fn ambient_dim(&self) -> usize {
        match self.kind {
            ManifoldKind::Sphere => self.dim + 1,
            ManifoldKind::FlatTorus => self.dim,
        }
    }

    pub fn diameter(&self) -> f64 {
        match self.kind {
            ManifoldKind::Sphere => PI,
            ManifoldKind::FlatTorus => (self.dim as f64).sqrt() / 2.0,
        }
    }

    pub fn injectivity_radius(&self) -> f64 {
        match self.kind {
            ManifoldKind::Sphere => PI,
            ManifoldKind::FlatTorus => 0.5,
        }
    }

    /// Riemannian volume `μ_M(M)`.
    pub fn total_volume(&self) -> f64 {
        match self.kind {
            ManifoldKind::Sphere => (self.dim + 1) as f64 * unit_ball_volume(self.dim + 1),
            ManifoldKind::FlatTorus => 1.0,
        }
    }

    /// Builds a point, renormalizing onto the sphere or wrapping into `[0,1)^d`.
    pub fn point(&self, coords: Vec<f64>) -> Result<Point> {
        if coords.len() != self.ambient_dim() {
            return Err(Error::input(format!(
                "point has {} coordinates, expected {}",
                coords.len(),
                self.ambient_dim()
            )));
        }
        if let Some(bad) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::input(format!("non-finite coordinate {bad}")));
        }
        match self.kind {
            ManifoldKind::Sphere => {
                let n = norm(&coords);
                if n == 0.0 {
                    return Err(Error::input("zero vector is not a sphere point"));
                }
                if (n - 1.0).abs() <= f64::EPSILON {
                    Ok(Point(coords))
                } else {
                    Ok(Point(coords.into_iter().map(|c| c / n).collect()))
                }
            }
            ManifoldKind::FlatTorus => Ok(Point(coords.into_iter().map(wrap_unit).collect())),
        }
    }

    /// Checks that `p` satisfies this manifold's point invariants.
    pub fn check_point(&self, p: &Point) -> Result<()> {
        let c = p.coords();
        if c.len() != self.ambient_dim() {
            return Err(Error::input(format!(
                "point has {} coordinates, expected {}",
                c.len(),
                self.ambient_dim()
            )));
        }
        if c.iter().any(|x| !x.is_finite()) {
            return Err(Error::input("non-finite coordinate"));
        }
        match self.kind {
            ManifoldKind::Sphere if (norm(c) - 1.0).abs() > COORD_TOL => {
                Err(Error::input(format!("sphere point has norm {}", norm(c))))
            }
            ManifoldKind::FlatTorus if c.iter().any(|x| !(0.0..1.0).contains(x)) => {
                Err(Error::input("torus coordinate outside [0, 1)"))
            }
            _ => Ok(()),
        }
    }

    /// Geodesic distance on raw coordinates, without validation.
    ///
    /// On the sphere this is `2·atan2(|x−y|, |x+y|)`, the angle between the
    /// unit vectors; it agrees with `acos(⟨x,y⟩)` but keeps full relative
    /// precision for nearly coincident and nearly antipodal pairs. The
    /// expression is bitwise symmetric in `x` and `y`.
    #[inline]
    pub fn dist_raw(&self, x: &[f64], y: &[f64]) -> f64 {
        match self.kind {
            ManifoldKind::Sphere => {
                let mut minus = 0.0;
                let mut plus = 0.0;
                for (a, b) in x.iter().zip(y) {
                    let m = a - b;
                    let p = a + b;
                    minus += m * m;
                    plus += p * p;
                }
                2.0 * minus.sqrt().atan2(plus.sqrt())
            }
            ManifoldKind::FlatTorus => {
                let mut acc = 0.0;
                for (a, b) in x.iter().zip(y) {
                    let d = (a - b).abs();
                    let d = d.min(1.0 - d);
                    acc += d * d;
                }
                acc.sqrt()
            }
        }
    }

    #[inline]
    pub fn distance(&self, x: &Point, y: &Point) -> f64 {
        self.dist_raw(x.coords(), y.coords())
    }

    /// Validated geodesic distance.
    pub fn geodesic_distance(&self, x: &Point, y: &Point) -> Result<f64> {
        self.check_point(x)?;
        self.check_point(y)?;
        Ok(self.distance(x, y))
    }

    /// Unnormalized volume `μ_M(B(x, r))`, independent of `x`.
    pub fn ball_measure(&self, r: f64) -> Result<f64> {
        check_radius(r)?;
        let d = self.dim;
        Ok(match self.kind {
            ManifoldKind::Sphere => {
                let r = r.min(PI);
                match d {
                    1 => 2.0 * r,
                    2 => 4.0 * PI * (0.5 * r).sin().powi(2),
                    _ => d as f64 * unit_ball_volume(d) * sine_power_integral(d - 1, r),
                }
            }
            ManifoldKind::FlatTorus => clipped_ball_volume(d, r),
        })
    }

    /// Normalized volume `σ_M(B(x, r))` of a closed geodesic ball.
    pub fn ball_volume(&self, r: f64) -> Result<f64> {
        check_radius(r)?;
        if r >= self.diameter() {
            return Ok(1.0);
        }
        let d = self.dim;
        Ok(match self.kind {
            ManifoldKind::Sphere => match d {
                1 => r / PI,
                2 => (0.5 * r).sin().powi(2),
                _ => (sine_power_integral(d - 1, r) / sine_power_integral_full(d - 1)).clamp(0.0, 1.0),
            },
            ManifoldKind::FlatTorus => clipped_ball_volume(d, r),
        })
    }

    /// Density of the radial distribution `dσ_M(B(x, r))/dr` for spheres.
    pub(crate) fn sphere_radial_normalizer(&self) -> f64 {
        sine_power_integral_full(self.dim - 1)
    }

    /// Builds a tangent vector, projecting sphere components onto the
    /// tangent space at `base`.
    pub fn tangent(&self, base: &Point, components: Vec<f64>) -> Result<TangentVector> {
        self.check_point(base)?;
        if components.len() != self.ambient_dim() {
            return Err(Error::input(format!(
                "tangent vector has {} components, expected {}",
                components.len(),
                self.ambient_dim()
            )));
        }
        if components.iter().any(|c| !c.is_finite()) {
            return Err(Error::input("non-finite tangent component"));
        }
        let components = match self.kind {
            ManifoldKind::Sphere => {
                let b = base.coords();
                let p = dot(b, &components);
                components.iter().zip(b).map(|(v, x)| v - p * x).collect()
            }
            ManifoldKind::FlatTorus => components,
        };
        Ok(TangentVector {
            base: base.clone(),
            components,
        })
    }

    /// Exponential map: follow the geodesic from `v.base` with initial
    /// velocity `v` for unit time.
    pub fn exp_map(&self, v: &TangentVector) -> Result<Point> {
        if v.components.len() != self.ambient_dim() {
            return Err(Error::input("tangent vector dimension mismatch"));
        }
        if v.components.iter().any(|c| !c.is_finite()) {
            return Err(Error::input("non-finite tangent component"));
        }
        Ok(self.exp_raw(v.base.coords(), &v.components))
    }

    pub(crate) fn exp_raw(&self, x: &[f64], v: &[f64]) -> Point {
        match self.kind {
            ManifoldKind::Sphere => {
                let theta = norm(v);
                if theta == 0.0 {
                    return Point(x.to_vec());
                }
                let (s, c) = theta.sin_cos();
                let y: Vec<f64> = x.iter().zip(v).map(|(a, b)| c * a + s * b / theta).collect();
                let n = norm(&y);
                Point(y.into_iter().map(|t| t / n).collect())
            }
            ManifoldKind::FlatTorus => Point(x.iter().zip(v).map(|(a, b)| wrap_unit(a + b)).collect()),
        }
    }

    /// Logarithm map: the initial velocity of the minimizing geodesic from
    /// `x` to `y`. Fails on (or within 1e-12 of) the injectivity radius.
    pub fn log_map(&self, x: &Point, y: &Point) -> Result<TangentVector> {
        self.check_point(x)?;
        self.check_point(y)?;
        let dist = self.distance(x, y);
        if dist >= self.injectivity_radius() - CUT_LOCUS_MARGIN {
            return Err(Error::domain(format!(
                "log map undefined: distance {dist} reaches injectivity radius {}",
                self.injectivity_radius()
            )));
        }
        let components = if dist == 0.0 {
            vec![0.0; self.ambient_dim()]
        } else {
            self.direction_raw(x.coords(), y.coords())
                .into_iter()
                .map(|u| u * dist)
                .collect()
        };
        Ok(TangentVector {
            base: x.clone(),
            components,
        })
    }

    /// `−∇ₓ dist(x, y)`: the unit tangent at `x` along a minimizing geodesic
    /// towards `y`. Where the distance is not differentiable the minimal-norm
    /// subgradient is used instead: zero for coincident or antipodal sphere
    /// points, and a zero component for every torus axis on which `y` sits
    /// exactly half a period away.
    pub(crate) fn direction_raw(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        match self.kind {
            ManifoldKind::Sphere => {
                let p = dot(x, y);
                let u: Vec<f64> = y.iter().zip(x).map(|(b, a)| b - p * a).collect();
                let n = norm(&u);
                if n == 0.0 {
                    u
                } else {
                    u.into_iter().map(|t| t / n).collect()
                }
            }
            ManifoldKind::FlatTorus => {
                let u: Vec<f64> = x.iter().zip(y).map(|(a, b)| torus_delta(*a, *b)).collect();
                let n = norm(&u);
                if n == 0.0 {
                    u
                } else {
                    u.into_iter()
                        .map(|t| if t.abs() == 0.5 { 0.0 } else { t / n })
                        .collect()
                }
            }
        }
    }

    /// Draws `n` independent points from the normalized volume measure.
    pub fn sample_uniform(&self, seed: u64, n: usize) -> Result<PointSet> {
        if n == 0 {
            return Err(Error::input("sample size must be at least 1"));
        }
        let mut rng = rng::stream(seed, "sample_uniform");
        let points = (0..n).map(|_| self.random_point(&mut rng)).collect();
        Ok(PointSet::from_points_unchecked(
            *self,
            points,
            Provenance::new("uniform").with_seed(seed),
        ))
    }

    pub(crate) fn random_point<R: Rng>(&self, rng: &mut R) -> Point {
        match self.kind {
            ManifoldKind::Sphere => loop {
                let v: Vec<f64> = (0..=self.dim).map(|_| rng.sample(StandardNormal)).collect();
                let n = norm(&v);
                if n > 1e-300 {
                    break Point(v.into_iter().map(|t| t / n).collect());
                }
            },
            ManifoldKind::FlatTorus => Point((0..self.dim).map(|_| rng.random::<f64>()).collect()),
        }
    }

    /// Random tangent vector at `x` with uniformly distributed direction and
    /// norm exactly `len`.
    pub(crate) fn random_tangent<R: Rng>(&self, rng: &mut R, x: &[f64], len: f64) -> Vec<f64> {
        loop {
            let g: Vec<f64> = (0..self.ambient_dim()).map(|_| rng.sample(StandardNormal)).collect();
            let g: Vec<f64> = match self.kind {
                ManifoldKind::Sphere => {
                    let p = dot(x, &g);
                    g.iter().zip(x).map(|(v, a)| v - p * a).collect()
                }
                ManifoldKind::FlatTorus => g,
            };
            let n = norm(&g);
            if n > 1e-12 {
                break g.into_iter().map(|t| t * len / n).collect();
            }
        }
    }

    /// An orthonormal basis of the tangent space at `x`.
    pub(crate) fn tangent_basis(&self, x: &[f64]) -> Vec<Vec<f64>> {
        match self.kind {
            ManifoldKind::FlatTorus => (0..self.dim)
                .map(|i| {
                    let mut e = vec![0.0; self.dim];
                    e[i] = 1.0;
                    e
                })
                .collect(),
            ManifoldKind::Sphere => {
                // Gram–Schmidt on the standard basis against x.
                let m = self.dim + 1;
                let mut basis: Vec<Vec<f64>> = vec![x.to_vec()];
                for i in 0..m {
                    let mut e = vec![0.0; m];
                    e[i] = 1.0;
                    for b in &basis {
                        let p = dot(b, &e);
                        for (ek, bk) in e.iter_mut().zip(b) {
                            *ek -= p * bk;
                        }
                    }
                    let n = norm(&e);
                    if n > 1e-8 {
                        basis.push(e.into_iter().map(|t| t / n).collect());
                    }
                    if basis.len() == m {
                        break;
                    }
                }
                basis.remove(0);
                basis
            }
        }
    }
}

fn check_radius(r: f64) -> Result<()> {
    if r.is_nan() || r < 0.0 {
        return Err(Error::input(format!("radius must be non-negative, got {r}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn s2() -> Manifold {
        Manifold::sphere(2).unwrap()
    }

    #[test]
    fn basic_constants() {
        assert_eq!(s2().diameter(), PI);
        assert!((Manifold::torus(3).unwrap().diameter() - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((s2().total_volume() - 4.0 * PI).abs() < 1e-12);
        assert!((Manifold::sphere(1).unwrap().total_volume() - 2.0 * PI).abs() < 1e-12);
        assert!(Manifold::sphere(0).is_err());
        for m in [s2(), Manifold::torus(2).unwrap()] {
            assert!(m.injectivity_radius() <= m.diameter());
        }
    }

    #[test]
    fn euclidean_ball_examples() {
        assert_eq!(euclidean_ball_volume(1, 3.0).unwrap(), 6.0);
        assert!((euclidean_ball_volume(2, 1.0).unwrap() - PI).abs() < 1e-15);
        assert!((euclidean_ball_volume(3, 1.0).unwrap() - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!(euclidean_ball_volume(2, -1.0).is_err());
    }

    #[test]
    fn distance_examples() {
        let m = s2();
        let x = m.point(vec![1.0, 0.0, 0.0]).unwrap();
        let y = m.point(vec![0.0, 1.0, 0.0]).unwrap();
        assert!((m.geodesic_distance(&x, &y).unwrap() - PI / 2.0).abs() < 1e-15);
        assert_eq!(m.geodesic_distance(&x, &x).unwrap(), 0.0);

        let t = Manifold::torus(1).unwrap();
        let a = t.point(vec![0.1]).unwrap();
        let b = t.point(vec![0.9]).unwrap();
        assert!((t.geodesic_distance(&a, &b).unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn invalid_points_rejected() {
        let m = s2();
        assert!(m.point(vec![1.0, 0.0]).is_err());
        assert!(m.point(vec![f64::NAN, 0.0, 1.0]).is_err());
        assert!(m.point(vec![0.0, 0.0, 0.0]).is_err());
        let p = m.point(vec![3.0, 4.0, 0.0]).unwrap();
        assert!((norm(p.coords()) - 1.0).abs() < 1e-15);
        let t = Manifold::torus(2).unwrap();
        let q = t.point(vec![-0.25, 3.5]).unwrap();
        assert_eq!(q.coords(), &[0.75, 0.5]);
        assert!(m.check_point(&q).is_err());
    }

    #[test]
    fn ball_volume_examples() {
        let m = s2();
        assert_eq!(m.ball_volume(PI).unwrap(), 1.0);
        assert!((m.ball_volume(PI / 3.0).unwrap() - 0.25).abs() < 1e-15);
        let t = Manifold::torus(2).unwrap();
        assert!((t.ball_volume(0.25).unwrap() - 0.196_349_540_849_362_1).abs() < 1e-15);
        assert!(m.ball_volume(-0.1).is_err());
    }

    #[test]
    fn sphere_ball_volume_matches_cap_formula() {
        let m = s2();
        for i in 0..=1000 {
            let r = PI * i as f64 / 1000.0;
            let v = m.ball_volume(r).unwrap();
            assert!((v - (1.0 - r.cos()) / 2.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn higher_sphere_volume_by_quadrature() {
        // S^3: ∫ sin^2 = (r - sin r cos r)/2, total π/2
        let m = Manifold::sphere(3).unwrap();
        for r in [0.01f64, 0.3, 1.0, 2.0, 3.0] {
            let exact = (r - r.sin() * r.cos()) / PI;
            assert!((m.ball_volume(r).unwrap() - exact).abs() < 1e-12, "r={r}");
        }
        // S^4: ∫ sin^3 = 2/3 - cos r + cos^3 r / 3, total 4/3
        let m = Manifold::sphere(4).unwrap();
        for r in [0.2f64, 1.5, 2.9] {
            let c = r.cos();
            let exact = (2.0 / 3.0 - c + c * c * c / 3.0) / (4.0 / 3.0);
            assert!((m.ball_volume(r).unwrap() - exact).abs() < 1e-12, "r={r}");
        }
        // unnormalized S^3 measure: 4π·(r - sin r cos r)/2
        let r: f64 = 0.7;
        let exact = 2.0 * PI * (r - r.sin() * r.cos());
        assert!((Manifold::sphere(3).unwrap().ball_measure(r).unwrap() - exact).abs() < 1e-12);
    }

    #[test]
    fn torus_ball_volume_exact_below_half() {
        for d in 1..=4 {
            let t = Manifold::torus(d).unwrap();
            for i in 0..=100 {
                let r = 0.5 * i as f64 / 100.0;
                assert_eq!(t.ball_volume(r).unwrap(), euclidean_ball_volume(d, r).unwrap());
            }
            assert_eq!(t.ball_volume(t.diameter()).unwrap(), 1.0);
        }
    }

    /// Midpoint-grid indicator integration, the brute-force oracle for the
    /// wrapped ball volume.
    fn grid_ball_volume(d: usize, r: f64, res: usize) -> f64 {
        let h = 1.0 / res as f64;
        let total = res.pow(d as u32);
        let mut inside = 0usize;
        for idx in 0..total {
            let mut k = idx;
            let mut acc = 0.0;
            for _ in 0..d {
                let c = ((k % res) as f64 + 0.5) * h - 0.5;
                acc += c * c;
                k /= res;
            }
            if acc <= r * r {
                inside += 1;
            }
        }
        inside as f64 / total as f64
    }

    #[test]
    fn torus_ball_volume_beyond_half_matches_grid() {
        let t2 = Manifold::torus(2).unwrap();
        for r in [0.55, 0.6, 0.65, 0.7] {
            let g = grid_ball_volume(2, r, 2048);
            assert!((t2.ball_volume(r).unwrap() - g).abs() < 2e-4, "r={r}");
        }
        let t3 = Manifold::torus(3).unwrap();
        for r in [0.55, 0.65, 0.75, 0.85] {
            let g = grid_ball_volume(3, r, 200);
            assert!((t3.ball_volume(r).unwrap() - g).abs() < 2e-3, "r={r}");
        }
    }

    #[test]
    fn ball_volume_monotone() {
        for m in [
            Manifold::sphere(1).unwrap(),
            s2(),
            Manifold::sphere(3).unwrap(),
            Manifold::torus(1).unwrap(),
            Manifold::torus(2).unwrap(),
            Manifold::torus(3).unwrap(),
        ] {
            let mut prev = 0.0;
            for i in 0..=1000 {
                let r = m.diameter() * i as f64 / 1000.0;
                let v = m.ball_volume(r).unwrap();
                assert!((0.0..=1.0).contains(&v));
                assert!(v >= prev, "{m:?} r={r}");
                prev = v;
            }
            assert_eq!(prev, 1.0);
        }
    }

    #[test]
    fn triangle_inequality() {
        let mut rng = rng::stream(5, "test");
        for m in [
            Manifold::sphere(1).unwrap(),
            s2(),
            Manifold::torus(1).unwrap(),
            Manifold::torus(3).unwrap(),
        ] {
            for _ in 0..1000 {
                let x = m.random_point(&mut rng);
                let y = m.random_point(&mut rng);
                let z = m.random_point(&mut rng);
                let (xy, yz, xz) = (m.distance(&x, &y), m.distance(&y, &z), m.distance(&x, &z));
                assert!(xz <= xy + yz + 1e-12);
                assert!(xy >= 0.0 && xy <= m.diameter() + 1e-15);
                assert_eq!(xy, m.distance(&y, &x));
            }
        }
    }

    #[test]
    fn exp_map_examples() {
        let m = s2();
        let x = m.point(vec![1.0, 0.0, 0.0]).unwrap();
        let v = m.tangent(&x, vec![0.0, PI / 2.0, 0.0]).unwrap();
        let y = m.exp_map(&v).unwrap();
        assert!((y.coords()[0]).abs() < 1e-15 && (y.coords()[1] - 1.0).abs() < 1e-15);

        let t = Manifold::torus(1).unwrap();
        let b = t.point(vec![0.9]).unwrap();
        let w = t.tangent(&b, vec![0.3]).unwrap();
        assert!((t.exp_map(&w).unwrap().coords()[0] - 0.2).abs() < 1e-15);

        let zero = m.tangent(&x, vec![0.0; 3]).unwrap();
        assert_eq!(m.exp_map(&zero).unwrap(), x);
        assert!(m.tangent(&x, vec![f64::INFINITY, 0.0, 0.0]).is_err());
    }

    #[test]
    fn log_map_examples() {
        let t = Manifold::torus(1).unwrap();
        let a = t.point(vec![0.2]).unwrap();
        let b = t.point(vec![0.1]).unwrap();
        assert!((t.log_map(&a, &b).unwrap().components()[0] + 0.1).abs() < 1e-15);

        let m = s2();
        let x = m.point(vec![1.0, 0.0, 0.0]).unwrap();
        let y = m.point(vec![0.0, 1.0, 0.0]).unwrap();
        let v = m.log_map(&x, &y).unwrap();
        assert!((v.components()[1] - PI / 2.0).abs() < 1e-15);
        assert!(v.components()[0].abs() < 1e-15 && v.components()[2].abs() < 1e-15);

        let anti = m.point(vec![-1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(m.log_map(&x, &anti), Err(Error::Domain(_))));
        assert!(m.log_map(&x, &x).unwrap().norm() == 0.0);
        let far = t.point(vec![0.7]).unwrap();
        assert!(matches!(t.log_map(&a, &far), Err(Error::Domain(_))));
    }

    #[test]
    fn log_inverts_exp() {
        let mut rng = rng::stream(11, "test");
        for m in [s2(), Manifold::sphere(3).unwrap(), Manifold::torus(2).unwrap()] {
            for _ in 0..200 {
                let x = m.random_point(&mut rng);
                let len = rng.random::<f64>() * 0.45;
                let v = m.random_tangent(&mut rng, x.coords(), len);
                let tv = m.tangent(&x, v.clone()).unwrap();
                let y = m.exp_map(&tv).unwrap();
                let back = m.log_map(&x, &y).unwrap();
                for (a, b) in back.components().iter().zip(&v) {
                    assert!((a - b).abs() < 1e-10);
                }
                assert!((back.norm() - m.distance(&x, &y)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn sample_uniform_examples() {
        let m = s2();
        let a = m.sample_uniform(7, 3).unwrap();
        let b = m.sample_uniform(7, 3).unwrap();
        assert_eq!(a.points(), b.points());
        assert!(m.sample_uniform(7, 0).is_err());

        let t = Manifold::torus(2).unwrap();
        let xs = t.sample_uniform(1, 10_000).unwrap();
        let o = t.point(vec![0.0, 0.0]).unwrap();
        let v = t.ball_volume(0.25).unwrap();
        let hits = xs.points().iter().filter(|p| t.distance(&o, p) <= 0.25).count() as f64;
        let sd = (v * (1.0 - v) / 1e4).sqrt();
        assert!((hits / 1e4 - v).abs() < 3.0 * sd);

        let ys = m.sample_uniform(1, 10_000).unwrap();
        for k in 0..3 {
            let mean: f64 = ys.points().iter().map(|p| p.coords()[k]).sum::<f64>() / 1e4;
            // coordinate variance on S^2 is 1/3
            assert!(mean.abs() < 3.0 * (1.0 / 3.0f64 / 1e4).sqrt());
        }
    }

    #[test]
    fn monte_carlo_ball_volume() {
        let n = 100_000;
        for m in [s2(), Manifold::torus(2).unwrap(), Manifold::torus(3).unwrap(), Manifold::sphere(3).unwrap()] {
            let xs = m.sample_uniform(3, n).unwrap();
            let o = xs.points()[0].clone();
            for frac in [0.1, 0.3, 0.6, 0.9] {
                let r = m.diameter() * frac;
                let v = m.ball_volume(r).unwrap();
                let hits = xs.points()[1..].iter().filter(|p| m.distance(&o, p) <= r).count() as f64;
                let tol = 4.0 * (v * (1.0 - v) / (n - 1) as f64).sqrt();
                assert!((hits / (n - 1) as f64 - v).abs() <= tol, "{m:?} r={r}");
            }
        }
    }

    #[test]
    fn tangent_basis_is_orthonormal() {
        let m = Manifold::sphere(3).unwrap();
        let x = m.point(vec![0.5, 0.5, 0.5, 0.5]).unwrap();
        let b = m.tangent_basis(x.coords());
        assert_eq!(b.len(), 3);
        for (i, u) in b.iter().enumerate() {
            assert!(dot(u, x.coords()).abs() < 1e-14);
            for (j, w) in b.iter().enumerate() {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((dot(u, w) - e).abs() < 1e-14);
            }
        }
    }
}
