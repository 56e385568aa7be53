use nalgebra::DMatrix;

use super::{check_finite, Vector, ORTHO_TOL};
use crate::{Error, Result};

/// Orthonormal basis of a `k`-dimensional linear subspace of `R^n`.
///
/// The span is the only contract; any two frames with the same span are
/// interchangeable wherever a frame is consumed. Decompositions produce a
/// deterministic gauge (Gram-Schmidt over their inputs in order) so tests
/// can compare outputs.
#[derive(Clone, Debug)]
pub struct Frame {
    basis: Vec<Vector>,
    ambient: usize,
}

impl Frame {
    /// Validates pairwise orthonormality within `ORTHO_TOL`.
    pub fn new(basis: Vec<Vector>, ambient: usize) -> Result<Self> {
        if basis.len() > ambient {
            return Err(Error::invalid(format!(
                "frame dimension {} exceeds ambient dimension {ambient}",
                basis.len()
            )));
        }
        for (i, b) in basis.iter().enumerate() {
            if b.len() != ambient {
                return Err(Error::invalid(format!(
                    "basis vector {i} has length {} in ambient dimension {ambient}",
                    b.len()
                )));
            }
            check_finite(b, "basis vector")?;
            for (j, c) in basis.iter().enumerate().take(i + 1) {
                let expect = if i == j { 1.0 } else { 0.0 };
                if (b.dot(c) - expect).abs() > ORTHO_TOL {
                    return Err(Error::invalid(format!(
                        "basis vectors {j},{i} are not orthonormal: <b{j},b{i}> = {}",
                        b.dot(c)
                    )));
                }
            }
        }
        Ok(Frame { basis, ambient })
    }

    /// The 0-dimensional subspace of `R^n`.
    pub fn empty(ambient: usize) -> Self {
        Frame { basis: Vec::new(), ambient }
    }

    /// The full space `R^n` with the canonical basis.
    pub fn identity(ambient: usize) -> Self {
        let basis = (0..ambient)
            .map(|i| {
                let mut e = Vector::zeros(ambient);
                e[i] = 1.0;
                e
            })
            .collect();
        Frame { basis, ambient }
    }

    /// Gram-Schmidt over `vectors` in input order, with one
    /// reorthogonalization pass. Fails when a vector falls inside the span
    /// of its predecessors, relative to `rel_tol` times its norm.
    pub fn from_spanning(vectors: &[Vector], rel_tol: f64) -> Result<Self> {
        let ambient = vectors
            .first()
            .map(|v| v.len())
            .ok_or_else(|| Error::invalid("cannot span a frame from no vectors"))?;
        let mut basis: Vec<Vector> = Vec::with_capacity(vectors.len());
        for v in vectors {
            if v.len() != ambient {
                return Err(Error::invalid("spanning vectors have mixed dimensions"));
            }
            check_finite(v, "spanning vector")?;
            let mut w = v.clone();
            for _ in 0..2 {
                for b in &basis {
                    let c = b.dot(&w);
                    w.axpy(-c, b, 1.0);
                }
            }
            let norm = w.norm();
            if norm <= rel_tol * v.norm().max(1e-300) {
                return Err(Error::degenerate(
                    "spanning vectors are linearly dependent",
                ));
            }
            basis.push(w / norm);
        }
        Ok(Frame { basis, ambient })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    /// Orthogonal projection of `v` onto the span, in ambient coordinates.
    pub fn project(&self, v: &Vector) -> Result<Vector> {
        if v.len() != self.ambient {
            return Err(Error::invalid(format!(
                "cannot project a vector of dimension {} in ambient dimension {}",
                v.len(),
                self.ambient
            )));
        }
        let mut out = Vector::zeros(self.ambient);
        for b in &self.basis {
            out.axpy(b.dot(v), b, 1.0);
        }
        Ok(out)
    }

    /// Coordinates of `v` in this basis (`B^T v`).
    pub fn coords(&self, v: &Vector) -> Vector {
        debug_assert_eq!(v.len(), self.ambient);
        Vector::from_iterator(self.basis.len(), self.basis.iter().map(|b| b.dot(v)))
    }

    /// Ambient vector with the given local coordinates (`B c`).
    pub fn embed(&self, local: &Vector) -> Vector {
        debug_assert_eq!(local.len(), self.basis.len());
        let mut out = Vector::zeros(self.ambient);
        for (b, &c) in self.basis.iter().zip(local.iter()) {
            out.axpy(c, b, 1.0);
        }
        out
    }

    /// Orthonormal frame of the orthogonal complement, dimension `n - k`.
    ///
    /// Produced by a Householder QR of `[B | I]`, so the result is
    /// deterministic and orthonormal to machine precision.
    pub fn orthocomplement(&self) -> Frame {
        let n = self.ambient;
        let k = self.dim();
        if k == 0 {
            return Frame::identity(n);
        }
        if k == n {
            return Frame::empty(n);
        }
        let mut m = DMatrix::zeros(n, k + n);
        for (j, b) in self.basis.iter().enumerate() {
            m.set_column(j, b);
        }
        for j in 0..n {
            m[(j, k + j)] = 1.0;
        }
        let q = m.qr().q();
        let basis = (k..n).map(|j| q.column(j).into_owned()).collect();
        Frame { basis, ambient: n }
    }

    /// Concatenation with an orthogonal frame, spanning the direct sum.
    pub fn concat(&self, other: &Frame) -> Result<Frame> {
        if self.ambient != other.ambient {
            return Err(Error::invalid("cannot concatenate frames of different ambient dimension"));
        }
        let mut basis = self.basis.clone();
        basis.extend(other.basis.iter().cloned());
        Frame::new(basis, self.ambient)
    }

    /// Distance of `v` from the span.
    pub fn span_distance(&self, v: &Vector) -> f64 {
        let mut w = v.clone();
        for b in &self.basis {
            w.axpy(-b.dot(v), b, 1.0);
        }
        w.norm()
    }

    pub fn span_contains(&self, v: &Vector, tol: f64) -> bool {
        self.span_distance(v) <= tol * v.norm().max(1.0)
    }

    /// Whether two frames span the same subspace: compares the orthogonal
    /// projectors `B B^T`.
    pub fn same_span(&self, other: &Frame, tol: f64) -> bool {
        if self.ambient != other.ambient || self.dim() != other.dim() {
            return false;
        }
        self.basis
            .iter()
            .all(|b| other.span_distance(b) <= tol)
    }

    /// Whether every basis vector of `self` is orthogonal to every basis
    /// vector of `other`.
    pub fn orthogonal_to(&self, other: &Frame, tol: f64) -> bool {
        self.basis
            .iter()
            .all(|a| other.basis.iter().all(|b| a.dot(b).abs() <= tol))
    }
}

/// Orthogonal projection of `v` onto the span of `frame`.
pub fn project_onto(frame: &Frame, v: &Vector) -> crate::Result<Vector> {
    frame.project(v)
}

/// Orthonormal frame of the complement of `frame`'s span in `R^n`.
pub fn orthocomplement(frame: &Frame) -> Frame {
    frame.orthocomplement()
}

/// Orthonormal basis of the tangent space at the unit vector `at` of the
/// unit sphere of `span(sub)`: all vectors of the span orthogonal to `at`.
/// Requires `at` to lie in the span; returns `sub.dim() - 1` vectors.
///
/// The Gram-Schmidt runs in the subspace's local coordinates, so the
/// results stay in the span to machine precision even when `at` nearly
/// coincides with a basis vector.
pub fn tangent_basis(at: &Vector, sub: &Frame) -> Vec<Vector> {
    let d = sub.dim();
    let local_at = sub.coords(at).normalize();
    let mut accepted = vec![local_at];
    let mut out = Vec::with_capacity(d.saturating_sub(1));
    for j in 0..d {
        let mut w = Vector::zeros(d);
        w[j] = 1.0;
        for _ in 0..2 {
            for v in &accepted {
                let c = v.dot(&w);
                w.axpy(-c, v, 1.0);
            }
        }
        let norm = w.norm();
        if norm > 1e-8 {
            let t = w / norm;
            accepted.push(t.clone());
            out.push(sub.embed(&t));
        }
    }
    debug_assert_eq!(out.len(), d - 1);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn e(i: usize, n: usize) -> Vector {
        let mut v = Vector::zeros(n);
        v[i] = 1.0;
        v
    }

    #[test]
    fn validates_orthonormality() {
        assert!(Frame::new(vec![e(0, 3), e(1, 3)], 3).is_ok());
        assert!(Frame::new(vec![e(0, 3), e(0, 3)], 3).is_err());
        assert!(Frame::new(vec![e(0, 3) * 2.0], 3).is_err());
    }

    #[test]
    fn project_onto_axis() {
        // span(e1) in R^3, v = (3,4,5) -> (3,0,0)
        let f = Frame::new(vec![e(0, 3)], 3).unwrap();
        let p = f.project(&Vector::from_row_slice(&[3.0, 4.0, 5.0])).unwrap();
        assert_relative_eq!(p, Vector::from_row_slice(&[3.0, 0.0, 0.0]), epsilon = 1e-15);
    }

    #[test]
    fn project_full_space_is_identity() {
        let f = Frame::identity(4);
        let v = Vector::from_row_slice(&[1.0, -2.0, 3.0, 0.5]);
        assert_relative_eq!(f.project(&v).unwrap(), v, epsilon = 1e-14);
    }

    #[test]
    fn project_onto_diagonal() {
        let d = Vector::from_row_slice(&[1.0, 1.0]) / 2.0_f64.sqrt();
        let f = Frame::new(vec![d], 2).unwrap();
        let p = f.project(&Vector::from_row_slice(&[1.0, 0.0])).unwrap();
        assert_relative_eq!(p, Vector::from_row_slice(&[0.5, 0.5]), epsilon = 1e-15);
    }

    #[test]
    fn project_dimension_mismatch() {
        let f = Frame::identity(3);
        assert!(f.project(&Vector::zeros(2)).is_err());
    }

    #[test]
    fn orthocomplement_of_axis_in_plane() {
        // span(e1) in R^2 -> span(e2) up to sign
        let f = Frame::new(vec![e(0, 2)], 2).unwrap();
        let c = f.orthocomplement();
        assert_eq!(c.dim(), 1);
        assert!(c.basis()[0][0].abs() < 1e-14);
        assert!((c.basis()[0][1].abs() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn orthocomplement_of_full_space_is_empty() {
        let f = Frame::identity(3);
        assert_eq!(f.orthocomplement().dim(), 0);
    }

    #[test]
    fn orthocomplement_is_orthogonal_complement() {
        // random-ish Frame(2,5) -> Frame(3,5), all cross dot products < 1e-12
        let v1 = Vector::from_row_slice(&[1.0, 2.0, -1.0, 0.5, 3.0]);
        let v2 = Vector::from_row_slice(&[0.0, 1.0, 1.0, -2.0, 1.0]);
        let f = Frame::from_spanning(&[v1, v2], 1e-10).unwrap();
        let c = f.orthocomplement();
        assert_eq!(c.dim(), 3);
        assert!(f.orthogonal_to(&c, 1e-12));
        let full = f.concat(&c).unwrap();
        assert_eq!(full.dim(), 5);
    }

    #[test]
    fn from_spanning_rejects_dependent() {
        let v1 = Vector::from_row_slice(&[1.0, 1.0]);
        let v2 = Vector::from_row_slice(&[2.0, 2.0]);
        assert!(matches!(
            Frame::from_spanning(&[v1, v2], 1e-10),
            Err(crate::Error::Degenerate(_))
        ));
    }

    #[test]
    fn same_span_ignores_gauge() {
        let a = Frame::new(vec![e(0, 3), e(1, 3)], 3).unwrap();
        let d1 = Vector::from_row_slice(&[1.0, 1.0, 0.0]) / 2.0_f64.sqrt();
        let d2 = Vector::from_row_slice(&[1.0, -1.0, 0.0]) / 2.0_f64.sqrt();
        let b = Frame::new(vec![d1, d2], 3).unwrap();
        assert!(a.same_span(&b, 1e-12));
        let c = Frame::new(vec![e(0, 3), e(2, 3)], 3).unwrap();
        assert!(!a.same_span(&c, 1e-9));
    }
}
