//! Integrable c-relation dynamics on centroaffine polygons.
//!
//! Two polygons are c-related when they share side brackets and every
//! cross bracket `[P_i, Q_i]` equals `c`. The crate provides the moduli
//! coordinates, Lax matrices and spectral integrals of this relation,
//! recutting, the presymplectic form and the center of a polygon, and
//! the closed-form small-gon theory, all generic over exact rationals
//! and floats.

pub mod continuant;
pub mod error;
pub mod geom;
pub mod integrals;
pub mod io;
pub mod lax;
pub mod linalg;
pub mod poly;
pub mod random;
pub mod polygon;
pub mod recut;
pub mod scalar;
pub mod smallgons;
pub mod symplectic;
pub mod verify;

pub use error::{Error, Result};
pub use geom::{bracket, Mat2, Vec2};
pub use polygon::{PolygonData, SVCoords};
pub use scalar::{Rational, Scalar};
