use nalgebra::DMatrix;

use super::{PointTuple, Vector, DEGENERACY_FACTOR};
use crate::measures::factorial;
use crate::{Error, Result};

/// `k`-dimensional volume of the simplex spanned by the vertices, where the
/// vertices are `pivot` (when given) followed by the points of the tuple.
///
/// Computed as `|det R| / k!` from a QR factorization of the edge matrix,
/// which equals `sqrt(det(G^T G)) / k!`. Affinely dependent vertices give
/// exactly 0: anything below the scale-invariant threshold
/// `DEGENERACY_FACTOR * diameter^k` is snapped to zero.
pub fn simplex_volume(points: &PointTuple, pivot: Option<&Vector>) -> Result<f64> {
    let n = points.dim();
    if let Some(p) = pivot {
        if p.len() != n {
            return Err(Error::invalid(format!(
                "pivot dimension {} does not match point dimension {n}",
                p.len()
            )));
        }
    }
    let base: &Vector = match pivot {
        Some(p) => p,
        None => points.point(0),
    };
    let rest: Vec<&Vector> = match pivot {
        Some(_) => points.iter().collect(),
        None => points.iter().skip(1).collect(),
    };
    let k = rest.len();
    if k == 0 {
        // 0-simplex: a single vertex has unit 0-volume.
        return Ok(1.0);
    }
    if k > n {
        return Ok(0.0);
    }
    let mut edges = DMatrix::zeros(n, k);
    for (j, p) in rest.iter().enumerate() {
        edges.set_column(j, &(*p - base));
    }
    let r = edges.qr().r();
    let det: f64 = (0..k).map(|i| r[(i, i)]).product();
    let vol = det.abs() / factorial(k);
    let diam = tuple_diameter(points, pivot);
    if factorial(k) * vol < DEGENERACY_FACTOR * diam.powi(k as i32) {
        return Ok(0.0);
    }
    Ok(vol)
}

/// Largest pairwise distance within the tuple (and pivot, when given).
pub fn tuple_diameter(points: &PointTuple, pivot: Option<&Vector>) -> f64 {
    let mut all: Vec<&Vector> = points.iter().collect();
    if let Some(p) = pivot {
        all.push(p);
    }
    let mut diam: f64 = 0.0;
    for i in 0..all.len() {
        for j in (i + 1)..all.len() {
            diam = diam.max((all[i] - all[j]).norm());
        }
    }
    diam
}

/// Scale-invariant degeneracy test: the simplex is treated as degenerate
/// when `k! * vol < DEGENERACY_FACTOR * diameter^k`, i.e. when the snapped
/// volume vanishes.
pub fn is_degenerate(points: &PointTuple, pivot: Option<&Vector>) -> Result<bool> {
    let k = points.len() - 1 + usize::from(pivot.is_some());
    if k == 0 {
        return Ok(false);
    }
    if tuple_diameter(points, pivot) == 0.0 {
        return Ok(true);
    }
    Ok(simplex_volume(points, pivot)? == 0.0)
}
