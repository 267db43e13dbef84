//! Riesz `s`-energies, geodesic-ball discrepancy and separation of finite
//! point sets on unit spheres `S^d` and flat tori `T^d`, with numerical
//! checks of the geometric estimates that relate them.
//!
//! ```
//! use riesz_core::{energy, pointsets};
//!
//! let x = pointsets::fibonacci_sphere(200).unwrap();
//! let ed = energy::discrete_energy(&x, 1.0).unwrap();
//! let ec = energy::continuous_energy(x.manifold(), 1.0, 1e-10).unwrap();
//! // the diagonal is excluded, so the discrete energy sits just below
//! assert!(ed < ec && ec - ed < 0.1);
//! ```

pub mod cli;
pub mod discrepancy;
pub mod energy;
pub mod error;
pub mod experiment;
pub mod io;
pub mod manifold;
pub mod pointsets;
pub mod quadrature;
pub mod rng;
pub mod sum;
pub mod verify;

pub use error::{Error, Result};
pub use manifold::{Manifold, ManifoldKind, Point, TangentVector};
pub use pointsets::{PointSet, Provenance};

/// Crate version, embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
