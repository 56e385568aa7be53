//! Spherical Blaschke-Petkantschin reparametrizations.
//!
//! The crate implements the change-of-variables formulas that trade an
//! integral over tuples of points for an integral over the spheres passing
//! through them: forward and inverse maps between tuples and sphere
//! parameters, the closed-form Jacobian densities, the measure constants,
//! and a Monte Carlo harness that certifies each identity numerically. A
//! finite-difference oracle independently checks the densities of the
//! parametrizations that can be charted explicitly.
//!
//! The identities covered: the linear and affine subspace formulas, the
//! circumscribed-sphere formula and its top-dimensional case, the pivoted
//! formulas (spheres through the origin or containing a fixed circle), the
//! anchored formula (centers constrained to a flat), and the formula for
//! small spheres of `S^n` together with its rotationally symmetric form.

pub mod density;
pub mod error;
pub mod estimator;
pub mod fd;
pub mod geometry;
pub mod integrand;
pub mod measures;
pub mod sampling;
pub mod theorem;
pub mod verify;

pub use error::{Error, Result};
pub use theorem::{SphereParam, TheoremConfig, TheoremId};
