//! Finite-dimensional geometric primitives: point tuples, orthonormal
//! frames, affine flats, simplex volumes, and the forward/inverse maps
//! between point tuples and sphere parametrizations.

mod flat;
mod frame;
mod simplex;
mod sphere;
mod tuple;

pub use flat::AffineFlat;
pub use frame::{orthocomplement, project_onto, tangent_basis, Frame};
pub use simplex::{is_degenerate, simplex_volume, tuple_diameter};
pub use sphere::{
    decompose_anchored, decompose_circumscribed, decompose_on_sphere, decompose_pivoted_circle,
    reconstruct_anchored, reconstruct_circumscribed, reconstruct_on_sphere,
    reconstruct_pivoted_circle, AnchoredParam, CircumscribedParam, PivotedCircleParam,
    SphereOnSphereParam, SphereSpec,
};
pub use tuple::PointTuple;

/// Point or direction in `n`-dimensional Euclidean space.
pub type Vector = nalgebra::DVector<f64>;

/// Orthonormality and membership tolerance of the validated types.
pub const ORTHO_TOL: f64 = 1e-12;

/// Scale-invariant degeneracy threshold: a tuple spans a `k`-simplex only
/// when `k! * vol` exceeds this factor times `diameter^k`.
pub const DEGENERACY_FACTOR: f64 = 1e-10;

pub(crate) fn check_finite(v: &Vector, what: &str) -> crate::Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(crate::Error::invalid(format!("{what} has non-finite entries")))
    }
}
