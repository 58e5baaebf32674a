pub mod error;
pub mod filters;
pub mod manifold;
pub mod masc;
pub mod quadrature;
pub mod rng;
pub mod sphere;
pub mod sphere_approx;
pub mod torus;
pub mod zonal;

pub use error::{Error, Result};
pub use filters::{FilterKind, FilterSpec, Mask};
