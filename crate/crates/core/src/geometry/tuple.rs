use super::{check_finite, Vector};
use crate::{Error, Result};

/// Ordered tuple of points sharing one ambient dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct PointTuple {
    points: Vec<Vector>,
    dim: usize,
}

impl PointTuple {
    pub fn new(points: Vec<Vector>) -> Result<Self> {
        let dim = points
            .first()
            .map(|p| p.len())
            .ok_or_else(|| Error::invalid("point tuple must be non-empty"))?;
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::invalid(format!(
                    "point {i} has dimension {} but point 0 has {dim}",
                    p.len()
                )));
            }
            check_finite(p, "point")?;
        }
        Ok(PointTuple { points, dim })
    }

    /// Builds a tuple from row data, e.g. `PointTuple::from_rows(&[&[0.0, 0.0], &[1.0, 0.0]])`.
    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::new(rows.iter().map(|r| Vector::from_row_slice(r)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &Vector {
        &self.points[i]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Vector> {
        self.points.iter()
    }

    /// Concatenates all coordinates into one vector of length `len * dim`,
    /// in point order.
    pub fn flatten(&self) -> Vector {
        let mut out = Vector::zeros(self.len() * self.dim);
        for (i, p) in self.points.iter().enumerate() {
            out.rows_mut(i * self.dim, self.dim).copy_from(p);
        }
        out
    }

    /// Componentwise maximum absolute difference to another tuple.
    pub fn max_abs_diff(&self, other: &PointTuple) -> f64 {
        self.points
            .iter()
            .zip(other.points.iter())
            .map(|(a, b)| (a - b).amax())
            .fold(0.0, f64::max)
    }
}

impl<'a> IntoIterator for &'a PointTuple {
    type Item = &'a Vector;
    type IntoIter = std::slice::Iter<'a, Vector>;
    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}
