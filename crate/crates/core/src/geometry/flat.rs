use super::{check_finite, Frame, Vector, ORTHO_TOL};
use crate::{Error, Result};

/// Affine subspace `A = offset + span(direction)`, with the offset stored
/// as the unique representative orthogonal to the direction span.
#[derive(Clone, Debug)]
pub struct AffineFlat {
    direction: Frame,
    offset: Vector,
}

impl AffineFlat {
    /// Requires `offset` orthogonal to every direction basis vector.
    pub fn new(direction: Frame, offset: Vector) -> Result<Self> {
        if offset.len() != direction.ambient_dim() {
            return Err(Error::invalid("flat offset dimension mismatch"));
        }
        check_finite(&offset, "flat offset")?;
        let scale = offset.norm().max(1.0);
        for (i, b) in direction.basis().iter().enumerate() {
            if b.dot(&offset).abs() > ORTHO_TOL * scale {
                return Err(Error::invalid(format!(
                    "flat offset is not orthogonal to direction vector {i}"
                )));
            }
        }
        Ok(AffineFlat { direction, offset })
    }

    /// The flat through `point` with the given direction space; the offset
    /// is canonicalized to the orthogonal representative.
    pub fn through_point(direction: Frame, point: &Vector) -> Result<Self> {
        if point.len() != direction.ambient_dim() {
            return Err(Error::invalid("flat point dimension mismatch"));
        }
        let offset = point - direction.project(point)?;
        AffineFlat::new(direction, offset)
    }

    pub fn direction(&self) -> &Frame {
        &self.direction
    }

    pub fn offset(&self) -> &Vector {
        &self.offset
    }

    pub fn dim(&self) -> usize {
        self.direction.dim()
    }

    pub fn ambient_dim(&self) -> usize {
        self.direction.ambient_dim()
    }

    /// Orthogonal projection of `v` onto the flat.
    pub fn project_point(&self, v: &Vector) -> Vector {
        let mut out = self.offset.clone();
        for b in self.direction.basis() {
            out.axpy(b.dot(v), b, 1.0);
        }
        out
    }

    pub fn distance(&self, v: &Vector) -> f64 {
        (v - self.project_point(v)).norm()
    }

    pub fn contains(&self, v: &Vector, tol: f64) -> bool {
        self.distance(v) <= tol * v.norm().max(1.0)
    }
}
