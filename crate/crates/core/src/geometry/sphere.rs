//! Sphere parametrizations of point tuples and their inverse maps.
//!
//! Each theorem trades a tuple of points for the sphere through them:
//! center (or center direction), radius, a carrier subspace, and unit
//! directions on the carrier sphere. `decompose_*` recovers the parameters
//! from a tuple, `reconstruct_*` is the forward map. The pairs invert each
//! other away from a measure-zero set of degenerate tuples.

use nalgebra::DMatrix;

use super::{
    check_finite, is_degenerate, AffineFlat, Frame, PointTuple, Vector, ORTHO_TOL,
};
use crate::{Error, Result};

/// Relative tolerance for Gram-Schmidt spans inside decompositions.
const SPAN_TOL: f64 = 1e-10;

fn check_unit(v: &Vector, what: &str) -> Result<()> {
    if (v.norm() - 1.0).abs() > ORTHO_TOL {
        return Err(Error::invalid(format!("{what} is not a unit vector")));
    }
    Ok(())
}

/// A `(d-1)`-sphere in `R^n`: center, radius, and the carrier subspace the
/// sphere lives in (the sphere is `center + radius * S(carrier)`).
#[derive(Clone, Debug)]
pub struct SphereSpec {
    pub center: Vector,
    pub radius: f64,
    pub carrier: Frame,
}

impl SphereSpec {
    pub fn new(center: Vector, radius: f64, carrier: Frame) -> Result<Self> {
        if center.len() != carrier.ambient_dim() {
            return Err(Error::invalid("sphere center dimension mismatch"));
        }
        check_finite(&center, "sphere center")?;
        if !(radius >= 0.0 && radius.is_finite()) {
            return Err(Error::invalid("sphere radius must be non-negative and finite"));
        }
        if carrier.dim() == 0 {
            return Err(Error::invalid("sphere carrier must have dimension >= 1"));
        }
        Ok(SphereSpec { center, radius, carrier })
    }
}

/// Parameters of the sphere circumscribed around `k+1` points: center `z`,
/// carrier `L`, radius `r`, and unit directions `u_i` with `x_i = z + r u_i`.
#[derive(Clone, Debug)]
pub struct CircumscribedParam {
    pub center: Vector,
    pub carrier: Frame,
    pub radius: f64,
    pub directions: Vec<Vector>,
}

impl CircumscribedParam {
    pub fn new(
        center: Vector,
        carrier: Frame,
        radius: f64,
        directions: Vec<Vector>,
    ) -> Result<Self> {
        let n = carrier.ambient_dim();
        if center.len() != n {
            return Err(Error::invalid("circumscribed center dimension mismatch"));
        }
        check_finite(&center, "center")?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid("circumscribed radius must be positive"));
        }
        if directions.len() != carrier.dim() + 1 {
            return Err(Error::invalid(
                "circumscribed parameters need k+1 directions on the (k-1)-sphere of the carrier",
            ));
        }
        for u in &directions {
            check_unit(u, "direction")?;
            if !carrier.span_contains(u, ORTHO_TOL) {
                return Err(Error::invalid("direction lies outside the carrier span"));
            }
        }
        Ok(CircumscribedParam { center, carrier, radius, directions })
    }

    pub fn subspace_dim(&self) -> usize {
        self.carrier.dim()
    }

    pub fn ambient_dim(&self) -> usize {
        self.carrier.ambient_dim()
    }

    pub fn sphere(&self) -> Result<SphereSpec> {
        SphereSpec::new(self.center.clone(), self.radius, self.carrier.clone())
    }

    pub fn reconstruct(&self) -> PointTuple {
        let pts = self
            .directions
            .iter()
            .map(|u| &self.center + u * self.radius)
            .collect();
        PointTuple::new(pts).expect("validated parameters reconstruct a valid tuple")
    }
}

/// Parameters of the sphere containing the fixed circle `S(0, r0, Q)` and
/// passing through `m` points: `x_i = sqrt(r^2 - r0^2) z + r u_i` with
/// `z` on the unit sphere of `L` (orthogonal to `Q`) and `u_i` on the unit
/// sphere of `L (+) Q`. `q = 0, r0 = 0` covers the pivoted special cases.
#[derive(Clone, Debug)]
pub struct PivotedCircleParam {
    pub pivot: Frame,
    pub pivot_radius: f64,
    pub carrier: Frame,
    pub radius: f64,
    pub center_dir: Vector,
    pub directions: Vec<Vector>,
}

impl PivotedCircleParam {
    pub fn new(
        pivot: Frame,
        pivot_radius: f64,
        carrier: Frame,
        radius: f64,
        center_dir: Vector,
        directions: Vec<Vector>,
    ) -> Result<Self> {
        if pivot.ambient_dim() != carrier.ambient_dim() {
            return Err(Error::invalid("pivot and carrier ambient dimensions differ"));
        }
        if !(pivot_radius >= 0.0 && radius.is_finite() && radius >= pivot_radius) {
            return Err(Error::invalid("pivoted radii must satisfy r >= r0 >= 0"));
        }
        if !carrier.orthogonal_to(&pivot, ORTHO_TOL) {
            return Err(Error::invalid("carrier must be orthogonal to the pivot plane"));
        }
        check_unit(&center_dir, "center direction")?;
        if !carrier.span_contains(&center_dir, ORTHO_TOL) {
            return Err(Error::invalid("center direction lies outside the carrier"));
        }
        if directions.len() != carrier.dim() {
            return Err(Error::invalid(
                "pivoted parameters need m directions for an m-dimensional carrier",
            ));
        }
        let joint = carrier.concat(&pivot)?;
        for u in &directions {
            check_unit(u, "direction")?;
            if !joint.span_contains(u, ORTHO_TOL) {
                return Err(Error::invalid("direction lies outside carrier (+) pivot"));
            }
        }
        Ok(PivotedCircleParam {
            pivot,
            pivot_radius,
            carrier,
            radius,
            center_dir,
            directions,
        })
    }

    /// Distance of the sphere center from the origin, `sqrt(r^2 - r0^2)`,
    /// clamped at zero to absorb roundoff when `r` is close to `r0`.
    /// Exactly `r` when the fixed circle degenerates to the origin, so the
    /// pivoted special cases reduce without rounding.
    pub fn center_distance(&self) -> f64 {
        if self.pivot_radius == 0.0 {
            return self.radius;
        }
        (self.radius * self.radius - self.pivot_radius * self.pivot_radius)
            .max(0.0)
            .sqrt()
    }

    pub fn ambient_dim(&self) -> usize {
        self.carrier.ambient_dim()
    }

    pub fn tuple_size(&self) -> usize {
        self.directions.len()
    }

    pub fn sphere(&self) -> Result<SphereSpec> {
        SphereSpec::new(
            &self.center_dir * self.center_distance(),
            self.radius,
            self.carrier.concat(&self.pivot)?,
        )
    }

    pub fn reconstruct(&self) -> PointTuple {
        let center = &self.center_dir * self.center_distance();
        let pts = self
            .directions
            .iter()
            .map(|u| &center + u * self.radius)
            .collect();
        PointTuple::new(pts).expect("validated parameters reconstruct a valid tuple")
    }
}

/// Parameters of the smallest sphere through `k+1` points whose center is
/// constrained to an affine flat `F`: center `z` in `F`, radius `r`, the
/// direction frame `P` of the projection of the affine hull onto `F`, and
/// unit directions `u_i` in `span(P) (+) F_perp`.
#[derive(Clone, Debug)]
pub struct AnchoredParam {
    pub flat: AffineFlat,
    pub center: Vector,
    pub radius: f64,
    pub carrier: Frame,
    pub directions: Vec<Vector>,
}

impl AnchoredParam {
    pub fn new(
        flat: AffineFlat,
        center: Vector,
        radius: f64,
        carrier: Frame,
        directions: Vec<Vector>,
    ) -> Result<Self> {
        if center.len() != flat.ambient_dim() {
            return Err(Error::invalid("anchored center dimension mismatch"));
        }
        check_finite(&center, "center")?;
        if !flat.contains(&center, ORTHO_TOL) {
            return Err(Error::invalid("anchored center must lie in the flat"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid("anchored radius must be positive"));
        }
        if carrier.dim() > flat.dim() {
            return Err(Error::invalid("carrier dimension exceeds the flat dimension"));
        }
        if directions.len() != carrier.dim() + 1 {
            return Err(Error::invalid(
                "anchored parameters need k+1 directions for a k-dimensional carrier",
            ));
        }
        for b in carrier.basis() {
            if !flat.direction().span_contains(b, ORTHO_TOL) {
                return Err(Error::invalid("carrier must lie inside the flat direction"));
            }
        }
        for u in &directions {
            check_unit(u, "direction")?;
        }
        Ok(AnchoredParam { flat, center, radius, carrier, directions })
    }

    pub fn ambient_dim(&self) -> usize {
        self.flat.ambient_dim()
    }

    pub fn subspace_dim(&self) -> usize {
        self.carrier.dim()
    }

    pub fn reconstruct(&self) -> PointTuple {
        let pts = self
            .directions
            .iter()
            .map(|u| &self.center + u * self.radius)
            .collect();
        PointTuple::new(pts).expect("validated parameters reconstruct a valid tuple")
    }
}

/// Parameters of the small sphere of `S^n` through `k+1` points on it:
/// `p` is the point of the affine hull closest to the origin, `sigma` the
/// direction frame of the hull, and `x_i = p + R u_i` with
/// `R = sqrt(1 - |p|^2)`.
#[derive(Clone, Debug)]
pub struct SphereOnSphereParam {
    pub carrier: Frame,
    pub center: Vector,
    pub directions: Vec<Vector>,
}

impl SphereOnSphereParam {
    pub fn new(carrier: Frame, center: Vector, directions: Vec<Vector>) -> Result<Self> {
        if center.len() != carrier.ambient_dim() {
            return Err(Error::invalid("on-sphere center dimension mismatch"));
        }
        check_finite(&center, "center")?;
        if center.norm() > 1.0 + ORTHO_TOL {
            return Err(Error::invalid("on-sphere center must satisfy |p| <= 1"));
        }
        if directions.len() != carrier.dim() + 1 {
            return Err(Error::invalid(
                "on-sphere parameters need k+1 directions for a k-dimensional carrier",
            ));
        }
        for b in carrier.basis() {
            if b.dot(&center).abs() > ORTHO_TOL * center.norm().max(1.0) {
                return Err(Error::invalid("on-sphere center must be orthogonal to the carrier"));
            }
        }
        for u in &directions {
            check_unit(u, "direction")?;
            if !carrier.span_contains(u, ORTHO_TOL) {
                return Err(Error::invalid("direction lies outside the carrier span"));
            }
        }
        Ok(SphereOnSphereParam { carrier, center, directions })
    }

    /// Radius of the small sphere, `sqrt(1 - |p|^2)`, clamped at zero.
    pub fn radius(&self) -> f64 {
        (1.0 - self.center.norm_squared()).max(0.0).sqrt()
    }

    pub fn subspace_dim(&self) -> usize {
        self.carrier.dim()
    }

    /// Ambient dimension is `n + 1` for points on `S^n`.
    pub fn ambient_dim(&self) -> usize {
        self.carrier.ambient_dim()
    }

    pub fn reconstruct(&self) -> PointTuple {
        let r = self.radius();
        let pts = self
            .directions
            .iter()
            .map(|u| &self.center + u * r)
            .collect();
        PointTuple::new(pts).expect("validated parameters reconstruct a valid tuple")
    }
}

/// Splits a tuple through the sphere circumscribed around it: almost every
/// `k+1 <= n+1` points determine a unique `(k-1)`-sphere inside their
/// affine hull.
pub fn decompose_circumscribed(x: &PointTuple) -> Result<CircumscribedParam> {
    let n = x.dim();
    let k = x.len() - 1;
    if k == 0 || k > n {
        return Err(Error::invalid(format!(
            "circumscribed decomposition needs 2..=n+1 points, got {} in R^{n}",
            x.len()
        )));
    }
    if is_degenerate(x, None)? {
        return Err(Error::degenerate("tuple is affinely dependent"));
    }
    let base = x.point(0);
    let edges: Vec<Vector> = x.iter().skip(1).map(|p| p - base).collect();
    let carrier = Frame::from_spanning(&edges, SPAN_TOL)?;

    // Circumcenter in affine-hull coordinates: with y_i the local coordinates
    // of x_i - x_0, it solves 2 y_i . c = |y_i|^2.
    let mut a = DMatrix::zeros(k, k);
    let mut b = Vector::zeros(k);
    for (i, e) in edges.iter().enumerate() {
        let y = carrier.coords(e);
        b[i] = y.norm_squared();
        for j in 0..k {
            a[(i, j)] = 2.0 * y[j];
        }
    }
    let local = a
        .qr()
        .solve(&b)
        .ok_or_else(|| Error::degenerate("equidistance system is singular"))?;
    let center = base + carrier.embed(&local);

    let radius = x.iter().map(|p| (p - &center).norm()).sum::<f64>() / x.len() as f64;
    if radius <= 0.0 {
        return Err(Error::degenerate("circumradius collapsed to zero"));
    }
    let directions = x.iter().map(|p| (p - &center).normalize()).collect();
    CircumscribedParam::new(center, carrier, radius, directions)
}

/// Forward map of the circumscribed parametrization, `x_i = z + r u_i`.
pub fn reconstruct_circumscribed(p: &CircumscribedParam) -> PointTuple {
    p.reconstruct()
}

/// Splits `m` points through the unique sphere that contains the fixed
/// circle `S(0, r0, Q)` and passes through them. The center lies in the
/// orthogonal complement of `Q` at distance `sqrt(r^2 - r0^2)` from the
/// origin, inside the span `L` of the projections of the points.
pub fn decompose_pivoted_circle(
    x: &PointTuple,
    pivot: &Frame,
    pivot_radius: f64,
) -> Result<PivotedCircleParam> {
    let n = x.dim();
    let m = x.len();
    let q = pivot.dim();
    if pivot.ambient_dim() != n {
        return Err(Error::invalid("pivot plane ambient dimension mismatch"));
    }
    if m > n - q {
        return Err(Error::invalid(format!(
            "pivoted decomposition needs m <= n - q, got m={m}, n={n}, q={q}"
        )));
    }
    if pivot_radius < 0.0 {
        return Err(Error::invalid("pivot radius must be non-negative"));
    }

    // Projections of the points onto Q^perp span the carrier L.
    let projections: Vec<Vector> = x
        .iter()
        .map(|p| {
            let mut w = p.clone();
            for b in pivot.basis() {
                w.axpy(-b.dot(p), b, 1.0);
            }
            w
        })
        .collect();
    let carrier = Frame::from_spanning(&projections, SPAN_TOL)
        .map_err(|_| Error::degenerate("projections onto the pivot complement collapse"))?;

    // Center c in L solves 2 c . x_i = |x_i|^2 - r0^2.
    let mut a = DMatrix::zeros(m, m);
    let mut b = Vector::zeros(m);
    for (i, p) in x.iter().enumerate() {
        let y = carrier.coords(p);
        for j in 0..m {
            a[(i, j)] = 2.0 * y[j];
        }
        b[i] = p.norm_squared() - pivot_radius * pivot_radius;
    }
    let local = a
        .qr()
        .solve(&b)
        .ok_or_else(|| Error::degenerate("pivoted center system is singular"))?;
    let center = carrier.embed(&local);

    let dist = center.norm();
    let scale = x.iter().map(|p| p.norm()).fold(pivot_radius, f64::max).max(1.0);
    if dist <= 1e-10 * scale {
        return Err(Error::degenerate("sphere center too close to the origin"));
    }
    let radius = (pivot_radius * pivot_radius + dist * dist).sqrt();
    let center_dir = &center / dist;
    let directions = x.iter().map(|p| (p - &center).normalize()).collect();
    PivotedCircleParam::new(
        pivot.clone(),
        pivot_radius,
        carrier,
        radius,
        center_dir,
        directions,
    )
}

/// Forward map of the pivoted parametrization,
/// `x_i = sqrt(r^2 - r0^2) z + r u_i`.
pub fn reconstruct_pivoted_circle(p: &PivotedCircleParam) -> PointTuple {
    p.reconstruct()
}

/// Splits `k+1` points through the smallest sphere passing through them
/// whose center is constrained to the flat `F`. The center lies in the
/// projection onto `F` of the affine hull of the points.
pub fn decompose_anchored(x: &PointTuple, flat: &AffineFlat) -> Result<AnchoredParam> {
    let n = x.dim();
    let k = x.len() - 1;
    let m = flat.dim();
    if flat.ambient_dim() != n {
        return Err(Error::invalid("anchor flat ambient dimension mismatch"));
    }
    if k > m {
        return Err(Error::invalid(format!(
            "anchored decomposition needs k <= m, got k={k}, m={m}"
        )));
    }
    if k == 0 && m == n {
        return Err(Error::invalid("a single point anchored to the full space is trivial"));
    }

    let base = x.point(0);
    let edges: Vec<Vector> = x.iter().skip(1).map(|p| p - base).collect();

    let carrier = if k == 0 {
        Frame::empty(n)
    } else {
        let projected: Vec<Vector> = edges
            .iter()
            .map(|e| flat.direction().project(e))
            .collect::<Result<_>>()?;
        Frame::from_spanning(&projected, SPAN_TOL)
            .map_err(|_| Error::degenerate("projection of the affine hull collapses"))?
    };

    // Center z = proj_F(x_0) + P s; equidistance from all points gives a
    // k x k system in s.
    let base_proj = flat.project_point(base);
    let center = if k == 0 {
        base_proj
    } else {
        let mut a = DMatrix::zeros(k, k);
        let mut b = Vector::zeros(k);
        for (i, e) in edges.iter().enumerate() {
            let y = carrier.coords(e);
            for j in 0..k {
                a[(i, j)] = 2.0 * y[j];
            }
            b[i] = x.point(i + 1).norm_squared() - base.norm_squared() - 2.0 * base_proj.dot(e);
        }
        let s = a
            .qr()
            .solve(&b)
            .ok_or_else(|| Error::degenerate("anchored equidistance system is singular"))?;
        &base_proj + carrier.embed(&s)
    };

    let radius = x.iter().map(|p| (p - &center).norm()).sum::<f64>() / x.len() as f64;
    if radius <= 0.0 {
        return Err(Error::degenerate("anchored radius collapsed to zero"));
    }
    let directions = x.iter().map(|p| (p - &center).normalize()).collect();
    AnchoredParam::new(flat.clone(), center, radius, carrier, directions)
}

/// Forward map of the anchored parametrization, `x_i = z + r u_i`.
pub fn reconstruct_anchored(p: &AnchoredParam) -> PointTuple {
    p.reconstruct()
}

/// Splits `k+1` unit vectors of `S^n` through the unique small sphere of
/// `S^n` passing through them: `p` is the point of their affine hull
/// closest to the origin and `R^2 = 1 - |p|^2`.
pub fn decompose_on_sphere(x: &PointTuple) -> Result<SphereOnSphereParam> {
    let ambient = x.dim();
    let k = x.len() - 1;
    if k == 0 || k > ambient - 1 {
        return Err(Error::invalid(format!(
            "on-sphere decomposition needs 2..=n+1 points on S^n, got {} in R^{ambient}",
            x.len()
        )));
    }
    for p in x.iter() {
        if (p.norm() - 1.0).abs() > 1e-10 {
            return Err(Error::invalid("points must lie on the unit sphere"));
        }
    }
    if is_degenerate(x, None)? {
        return Err(Error::degenerate("tuple is affinely dependent"));
    }

    let base = x.point(0);
    let edges: Vec<Vector> = x.iter().skip(1).map(|p| p - base).collect();
    let carrier = Frame::from_spanning(&edges, SPAN_TOL)?;

    let mut center = base.clone();
    for b in carrier.basis() {
        center.axpy(-b.dot(base), b, 1.0);
    }
    let norm2 = center.norm_squared();
    debug_assert!(norm2 <= 1.0 + 1e-9, "hull foot point cannot leave the ball");
    let radius = (1.0 - norm2).max(0.0).sqrt();
    if radius <= 1e-12 {
        return Err(Error::degenerate("small sphere collapsed to a point"));
    }
    let directions = x.iter().map(|p| (p - &center).normalize()).collect();
    SphereOnSphereParam::new(carrier, center, directions)
}

/// Forward map of the on-sphere parametrization, `x_i = p + R u_i`.
pub fn reconstruct_on_sphere(p: &SphereOnSphereParam) -> PointTuple {
    p.reconstruct()
}
