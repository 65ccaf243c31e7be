//! Manifold abstraction, closed-form geometries and the radius calculus.
//!
//! Points, tangent vectors and chart images are plain `Vec<f64>`; a
//! [`ManifoldSpec`] tells the functions in [`zoo`] how to read them.

pub mod error;
pub mod extended;
pub mod linalg;
pub mod sampling;
pub mod spec;
pub mod zoo;

pub use error::{Error, Result};
pub use extended::ExtendedReal;
pub use linalg::{Direction, Matrix, MatrixFn};
pub use spec::{
    delta_bound, k_star, resolve_manifold, universality_radius, DeltaBound, ManifoldKind,
    ManifoldSpec,
};
pub use zoo::{distance, exp_map, inj_lower, log_map, tangent_norm, GaussianParam};

/// Raw coordinate vector used for points, tangents and chart images.
pub type RealVector = Vec<f64>;
