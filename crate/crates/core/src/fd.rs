//! Finite-difference oracle for the Jacobian densities.
//!
//! For a parametrization whose degrees of freedom can all be charted
//! explicitly (Euclidean factors, radii, and sphere factors), the absolute
//! determinant of the forward map's matrix of partial derivatives, taken in
//! orthonormal tangent charts, must equal the closed-form density. The
//! supported cases are the top-dimensional formula, the first pivoted
//! formula, the pivoted-circle formula at `m = n - q`, the anchored formula
//! at `k = m`, and the on-sphere formula at `k = n` (whose hyperplane factor
//! is charted through its unit normal; the half-measure of the double cover
//! cancels against the two-fold parametrization).

use nalgebra::DMatrix;
use rand::Rng;

use crate::density;
use crate::geometry::{
    simplex_volume, tangent_basis, AnchoredParam, CircumscribedParam, Frame, PivotedCircleParam,
    PointTuple, SphereOnSphereParam, Vector,
};
use crate::measures::factorial;
use crate::sampling::{gaussian_point, sample_frame, sample_unit_sphere};
use crate::theorem::{SphereParam, TheoremConfig, TheoremId};
use crate::{Error, Result};

/// Central-difference determinant of `map` at the chart origin.
fn fd_determinant<F>(dim: usize, step: f64, map: F) -> f64
where
    F: Fn(&[f64]) -> Vector,
{
    let mut mat = DMatrix::zeros(dim, dim);
    let mut theta = vec![0.0; dim];
    for j in 0..dim {
        theta[j] = step;
        let plus = map(&theta);
        theta[j] = -step;
        let minus = map(&theta);
        theta[j] = 0.0;
        assert_eq!(plus.len(), dim, "chart and tuple dimensions must agree");
        mat.set_column(j, &((plus - minus) / (2.0 * step)));
    }
    mat.determinant().abs()
}

/// Retraction onto the sphere with isometric differential at the origin.
fn sphere_point(base: &Vector, tangents: &[Vector], theta: &[f64]) -> Vector {
    let mut v = base.clone();
    for (t, &c) in tangents.iter().zip(theta) {
        v.axpy(c, t, 1.0);
    }
    v.normalize()
}

/// Rotation taking unit vector `a` to unit vector `b` and fixing their
/// common orthogonal complement. Valid away from `a . b = -1`.
fn rotation_between(a: &Vector, b: &Vector) -> DMatrix<f64> {
    let n = a.len();
    let s = a + b;
    let denom = 1.0 + a.dot(b);
    DMatrix::identity(n, n) - (&s * s.transpose()) / denom + 2.0 * (b * a.transpose())
}

fn stack(points: Vec<Vector>) -> Vector {
    let dim = points[0].len();
    let mut out = Vector::zeros(points.len() * dim);
    for (i, p) in points.iter().enumerate() {
        out.rows_mut(i * dim, dim).copy_from(p);
    }
    out
}

fn fd_top(p: &CircumscribedParam, step: f64) -> Result<f64> {
    let n = p.ambient_dim();
    if p.subspace_dim() != n {
        return Err(Error::UnsupportedTheorem(
            "top-dimensional check needs k = n (no subspace freedom)".into(),
        ));
    }
    let full = Frame::identity(n);
    let tangents: Vec<Vec<Vector>> =
        p.directions.iter().map(|u| tangent_basis(u, &full)).collect();
    let dim = n + 1 + (n + 1) * (n - 1);
    let p = p.clone();
    Ok(fd_determinant(dim, step, move |theta| {
        let mut center = p.center.clone();
        for i in 0..n {
            center[i] += theta[i];
        }
        let radius = p.radius + theta[n];
        let mut offset = n + 1;
        let mut pts = Vec::with_capacity(p.directions.len());
        for (u, tan) in p.directions.iter().zip(&tangents) {
            let dir = sphere_point(u, tan, &theta[offset..offset + (n - 1)]);
            offset += n - 1;
            pts.push(&center + dir * radius);
        }
        stack(pts)
    }))
}

fn fd_pivoted(p: &PivotedCircleParam, step: f64) -> Result<f64> {
    let n = p.ambient_dim();
    let m = p.tuple_size();
    let q = p.pivot.dim();
    if m + q != n {
        return Err(Error::UnsupportedTheorem(
            "pivoted check needs m = n - q (no subspace freedom)".into(),
        ));
    }
    let full = Frame::identity(n);
    let z_tangents = tangent_basis(&p.center_dir, &p.carrier);
    let u_tangents: Vec<Vec<Vector>> =
        p.directions.iter().map(|u| tangent_basis(u, &full)).collect();
    let dim = 1 + (m - 1) + m * (n - 1);
    let r0 = p.pivot_radius;
    let p = p.clone();
    Ok(fd_determinant(dim, step, move |theta| {
        let radius = p.radius + theta[0];
        let z = sphere_point(&p.center_dir, &z_tangents, &theta[1..m]);
        let rstar = (radius * radius - r0 * r0).max(0.0).sqrt();
        let center = &z * rstar;
        let mut offset = m;
        let mut pts = Vec::with_capacity(m);
        for (u, tan) in p.directions.iter().zip(&u_tangents) {
            let dir = sphere_point(u, tan, &theta[offset..offset + (n - 1)]);
            offset += n - 1;
            pts.push(&center + dir * radius);
        }
        stack(pts)
    }))
}

fn fd_anchored(p: &AnchoredParam, step: f64) -> Result<f64> {
    let n = p.ambient_dim();
    let k = p.directions.len() - 1;
    let m = p.flat.dim();
    if k != m {
        return Err(Error::UnsupportedTheorem(
            "anchored check needs k = m (no subspace freedom)".into(),
        ));
    }
    let full = Frame::identity(n);
    let u_tangents: Vec<Vec<Vector>> =
        p.directions.iter().map(|u| tangent_basis(u, &full)).collect();
    let dim = m + 1 + (k + 1) * (n - 1);
    let p = p.clone();
    Ok(fd_determinant(dim, step, move |theta| {
        let mut center = p.center.clone();
        for (d, &c) in p.flat.direction().basis().iter().zip(&theta[..m]) {
            center.axpy(c, d, 1.0);
        }
        let radius = p.radius + theta[m];
        let mut offset = m + 1;
        let mut pts = Vec::with_capacity(k + 1);
        for (u, tan) in p.directions.iter().zip(&u_tangents) {
            let dir = sphere_point(u, tan, &theta[offset..offset + (n - 1)]);
            offset += n - 1;
            pts.push(&center + dir * radius);
        }
        stack(pts)
    }))
}

fn fd_on_sphere(p: &SphereOnSphereParam, step: f64) -> Result<f64> {
    let ambient = p.ambient_dim();
    let n = ambient - 1;
    let k = p.subspace_dim();
    if k != n {
        return Err(Error::UnsupportedTheorem(
            "on-sphere check needs k = n (hyperplane charted by its unit normal)".into(),
        ));
    }
    let full = Frame::identity(ambient);
    let normal = p.carrier.orthocomplement().basis()[0].clone();
    let height = p.center.dot(&normal);
    let w_tangents = tangent_basis(&normal, &full);
    let u_tangents: Vec<Vec<Vector>> =
        p.directions.iter().map(|u| tangent_basis(u, &p.carrier)).collect();
    let base_radius = p.radius();
    let out_tangents: Vec<Vec<Vector>> = p
        .directions
        .iter()
        .map(|u| tangent_basis(&(&p.center + u * base_radius).normalize(), &full))
        .collect();
    let dim = n + 1 + (n + 1) * (n - 1);
    let p = p.clone();
    Ok(fd_determinant(dim, step, move |theta| {
        let w = sphere_point(&normal, &w_tangents, &theta[..n]);
        let s = height + theta[n];
        let rot = rotation_between(&normal, &w);
        let radius = (1.0 - s * s).max(0.0).sqrt();
        let center = &w * s;
        let mut offset = n + 1;
        let mut coords = Vec::with_capacity((n + 1) * n);
        for ((u, tan), out) in p.directions.iter().zip(&u_tangents).zip(&out_tangents) {
            let in_plane = sphere_point(u, tan, &theta[offset..offset + (n - 1)]);
            offset += n - 1;
            let x = &center + (&rot * in_plane) * radius;
            for t in out {
                coords.push(t.dot(&x));
            }
        }
        Vector::from_vec(coords)
    }))
}

/// `|det|` of the forward map's partial derivatives at `param`, by central
/// differences with the given step, in orthonormal tangent charts. Matches
/// the closed-form density for the chart-free parametrizations.
pub fn fd_jacobian_density(theorem: TheoremId, param: &SphereParam, step: f64) -> Result<f64> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::invalid("finite-difference step must be positive"));
    }
    match (theorem, param) {
        (TheoremId::TopDimensional, SphereParam::Circumscribed(p)) => fd_top(p, step),
        (TheoremId::Pivoted1, SphereParam::Pivoted(p)) => {
            if p.pivot.dim() != 0 || p.pivot_radius != 0.0 {
                return Err(Error::UnsupportedTheorem(
                    "first pivoted formula has no fixed circle".into(),
                ));
            }
            fd_pivoted(p, step)
        }
        (TheoremId::PivotedCircle, SphereParam::Pivoted(p)) => fd_pivoted(p, step),
        (TheoremId::Anchored, SphereParam::Anchored(p)) => fd_anchored(p, step),
        (TheoremId::OnSphere, SphereParam::OnSphere(p)) => fd_on_sphere(p, step),
        _ => Err(Error::UnsupportedTheorem(format!(
            "no finite-difference chart for {theorem} with this parameter variant"
        ))),
    }
}

/// Closed-form density for the same `(theorem, param)` pair the oracle
/// accepts; convenience for comparisons.
pub fn closed_form_density(theorem: TheoremId, param: &SphereParam, n: usize) -> Result<f64> {
    density::theorem_density(theorem, param, n)
}

/// Random non-degenerate parameter point for an oracle run: radii are kept
/// near unity and direction tuples are redrawn until their simplex factor
/// is well away from zero, so relative comparisons are meaningful.
pub fn random_chartfree_param<R: Rng + ?Sized>(
    theorem: TheoremId,
    config: &TheoremConfig,
    rng: &mut R,
) -> Result<SphereParam> {
    config.validate(theorem)?;
    let n = config.n;
    match theorem {
        TheoremId::TopDimensional => {
            let center = gaussian_point(n, 1.0, rng);
            let radius = 0.5 + 1.5 * rng.random::<f64>();
            let directions = loop {
                let us: Vec<Vector> = (0..=n).map(|_| sample_unit_sphere(n, rng)).collect();
                let tuple = PointTuple::new(us.clone()).expect("unit draws");
                if factorial(n) * simplex_volume(&tuple, None)? > 0.1 {
                    break us;
                }
            };
            Ok(SphereParam::Circumscribed(CircumscribedParam::new(
                center,
                Frame::identity(n),
                radius,
                directions,
            )?))
        }
        TheoremId::Pivoted1 => {
            let radius = 0.5 + 1.5 * rng.random::<f64>();
            let center_dir = sample_unit_sphere(n, rng);
            let directions = loop {
                let us: Vec<Vector> = (0..n).map(|_| sample_unit_sphere(n, rng)).collect();
                let tuple = PointTuple::new(us.clone()).expect("unit draws");
                if factorial(n) * simplex_volume(&tuple, Some(&-center_dir.clone()))? > 0.1 {
                    break us;
                }
            };
            Ok(SphereParam::Pivoted(PivotedCircleParam::new(
                Frame::empty(n),
                0.0,
                Frame::identity(n),
                radius,
                center_dir,
                directions,
            )?))
        }
        TheoremId::PivotedCircle => {
            let (m, q, r0) = (config.m(), config.q(), config.r0());
            if m + q != n {
                return Err(Error::UnsupportedTheorem(
                    "pivoted-circle oracle needs m = n - q".into(),
                ));
            }
            let pivot = config.pivot_frame()?;
            let carrier = pivot.orthocomplement();
            let radius = r0 + 0.5 + 1.5 * rng.random::<f64>();
            let rstar = (radius * radius - r0 * r0).sqrt();
            let center_dir = carrier.embed(&sample_unit_sphere(m, rng));
            let pivot_vertex = &center_dir * (-rstar / radius);
            let directions = loop {
                let us: Vec<Vector> = (0..m).map(|_| sample_unit_sphere(n, rng)).collect();
                let projected: Vec<Vector> = us
                    .iter()
                    .map(|u| carrier.project(u))
                    .collect::<Result<_>>()?;
                let tuple = PointTuple::new(projected).expect("projections");
                if factorial(m) * simplex_volume(&tuple, Some(&pivot_vertex))? > 0.05 {
                    break us;
                }
            };
            Ok(SphereParam::Pivoted(PivotedCircleParam::new(
                pivot,
                r0,
                carrier,
                radius,
                center_dir,
                directions,
            )?))
        }
        TheoremId::Anchored => {
            let (k, m) = (config.k(), config.m());
            if k != m {
                return Err(Error::UnsupportedTheorem("anchored oracle needs k = m".into()));
            }
            let flat = config.anchor_flat()?;
            let center = flat.offset() + flat.direction().embed(&gaussian_point(m, 1.0, rng));
            let radius = 0.5 + 1.5 * rng.random::<f64>();
            let directions = loop {
                let us: Vec<Vector> = (0..=k).map(|_| sample_unit_sphere(n, rng)).collect();
                let projected: Vec<Vector> = us
                    .iter()
                    .map(|u| flat.direction().project(u))
                    .collect::<Result<_>>()?;
                let tuple = PointTuple::new(projected).expect("projections");
                if factorial(k) * simplex_volume(&tuple, None)? > 0.05 {
                    break us;
                }
            };
            Ok(SphereParam::Anchored(AnchoredParam::new(
                flat.clone(),
                center,
                radius,
                flat.direction().clone(),
                directions,
            )?))
        }
        TheoremId::OnSphere => {
            let k = config.k();
            if k != n {
                return Err(Error::UnsupportedTheorem("on-sphere oracle needs k = n".into()));
            }
            let carrier = sample_frame(k, n + 1, rng);
            let normal = carrier.orthocomplement().basis()[0].clone();
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            let height = sign * (0.2 + 0.6 * rng.random::<f64>());
            let center = &normal * height;
            let directions = loop {
                let us: Vec<Vector> =
                    (0..=k).map(|_| carrier.embed(&sample_unit_sphere(k, rng))).collect();
                let tuple = PointTuple::new(us.clone()).expect("unit draws");
                if factorial(k) * simplex_volume(&tuple, None)? > 0.05 {
                    break us;
                }
            };
            Ok(SphereParam::OnSphere(SphereOnSphereParam::new(carrier, center, directions)?))
        }
        _ => Err(Error::UnsupportedTheorem(format!(
            "{theorem} has no chart-free parametrization"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::RandomStream;
    use approx::assert_relative_eq;

    fn e(i: usize, n: usize) -> Vector {
        let mut v = Vector::zeros(n);
        v[i] = 1.0;
        v
    }

    #[test]
    fn top_dimensional_worked_example() {
        // z = 0, r = 2, u = ((1,0), (-1,0), (0,1)): density 16
        let p = CircumscribedParam::new(
            Vector::zeros(2),
            Frame::identity(2),
            2.0,
            vec![e(0, 2), -e(0, 2), e(1, 2)],
        )
        .unwrap();
        let fd =
            fd_jacobian_density(TheoremId::TopDimensional, &SphereParam::Circumscribed(p), 1e-5)
                .unwrap();
        assert_relative_eq!(fd, 16.0, max_relative = 1e-6);
    }

    #[test]
    fn pivoted_1_worked_example() {
        // r = 1, z = e1, u = (e1, e2): density 2
        let p = PivotedCircleParam::new(
            Frame::empty(2),
            0.0,
            Frame::identity(2),
            1.0,
            e(0, 2),
            vec![e(0, 2), e(1, 2)],
        )
        .unwrap();
        let fd = fd_jacobian_density(TheoremId::Pivoted1, &SphereParam::Pivoted(p), 1e-5).unwrap();
        assert_relative_eq!(fd, 2.0, max_relative = 1e-6);
    }

    #[test]
    fn on_sphere_matches_closed_form() {
        let config = TheoremConfig::new(2).with_k(2);
        let mut rng = RandomStream::new(33, 0).rng();
        for _ in 0..5 {
            let param = random_chartfree_param(TheoremId::OnSphere, &config, &mut rng).unwrap();
            let fd = fd_jacobian_density(TheoremId::OnSphere, &param, 1e-5).unwrap();
            let closed = closed_form_density(TheoremId::OnSphere, &param, 2).unwrap();
            assert_relative_eq!(fd, closed, max_relative = 1e-5);
        }
    }

    #[test]
    fn grassmannian_bearing_cases_are_unsupported() {
        let config = TheoremConfig::new(3).with_k(1);
        let mut rng = RandomStream::new(1, 0).rng();
        let (param, _) = crate::sampling::sample_param(
            TheoremId::Circumscribed,
            &config,
            &crate::sampling::ProposalSpec::default(),
            &mut rng,
        )
        .unwrap();
        assert!(matches!(
            fd_jacobian_density(TheoremId::Circumscribed, &param, 1e-5),
            Err(Error::UnsupportedTheorem(_))
        ));
    }
}
