//! Sub-Riemannian geometry of the first Heisenberg group H¹.
//!
//! Points use Euclidean coordinates `(x, y, t)`; tangent vectors are stored
//! as coefficients in the left-invariant orthonormal frame `{X, Y, T}`, so
//! the metric is the identity on coefficient triples.

pub mod checks;
pub mod connection;
pub mod error;
pub mod geodesics;
pub mod group;
pub mod numerics;
pub mod stability;
pub mod surfaces;

pub use error::{Error, Result};
pub use group::{FrameVector, Point};
