//! Closed-form Jacobian weights of the reparametrization formulas, as pure
//! functions of the sphere parameters.
//!
//! Conventions shared by all weights: exponents that evaluate to exactly
//! zero give a factor 1 even at base 0 (the factor is absent from the
//! formula), and `r^2 - r0^2` is clamped at zero before fractional powers
//! to absorb roundoff when `r` is close to `r0`.

use crate::geometry::{
    simplex_volume, AnchoredParam, CircumscribedParam, PivotedCircleParam, PointTuple,
    SphereOnSphereParam, Vector,
};
use crate::measures::{factorial, grassmannian_measure, sphere_surface_area};
use crate::theorem::{SphereParam, TheoremId};
use crate::{Error, Result};

fn volume_of(directions: &[Vector], pivot: Option<&Vector>) -> f64 {
    let tuple = PointTuple::new(directions.to_vec()).expect("directions form a tuple");
    simplex_volume(&tuple, pivot).expect("dimensions agree")
}

/// Weight of the linear subspace formula: `[k! Vol_k(0, u)]^{n-k}` for `k`
/// points `u` inside a `k`-subspace of `R^n`.
pub fn density_linear_bp(u: &PointTuple, n: usize) -> f64 {
    let k = u.len();
    let origin = Vector::zeros(u.dim());
    let vol = simplex_volume(u, Some(&origin)).expect("dimensions agree");
    (factorial(k) * vol).powi((n - k) as i32)
}

/// Weight of the affine subspace formula: `[k! Vol_k(u)]^{n-k}` for `k+1`
/// points `u` inside a `k`-flat of `R^n`.
pub fn density_affine_bp(u: &PointTuple, n: usize) -> f64 {
    let k = u.len() - 1;
    let vol = simplex_volume(u, None).expect("dimensions agree");
    (factorial(k) * vol).powi((n - k) as i32)
}

/// Weight of the circumscribed-sphere formula:
/// `r^{nk-1} [k! Vol_k(u)]^{n-k+1}`.
pub fn density_circumscribed(p: &CircumscribedParam, n: usize) -> f64 {
    let k = p.directions.len() - 1;
    let vol = volume_of(&p.directions, None);
    p.radius.powi((n * k) as i32 - 1) * (factorial(k) * vol).powi((n - k + 1) as i32)
}

/// Weight of the top-dimensional case `k = n`:
/// `r^{n^2-1} n! Vol_n(u)` for `n+1` unit directions.
pub fn density_top(radius: f64, directions: &[Vector], n: usize) -> f64 {
    let vol = volume_of(directions, None);
    radius.powi((n * n) as i32 - 1) * factorial(n) * vol
}

/// Weight of the sphere through `n` points and the origin:
/// `r^{n^2-1} n! Vol_n(-z, u)`.
pub fn density_pivoted_1(radius: f64, center_dir: &Vector, directions: &[Vector], n: usize) -> f64 {
    let vol = volume_of(directions, Some(&(-center_dir)));
    radius.powi((n * n) as i32 - 1) * factorial(n) * vol
}

/// Weight of the sphere through `m <= n` points and the origin:
/// `r^{mn-1} [m! Vol_m(-z, u)]^{n-m+1}`.
pub fn density_pivoted_2(radius: f64, center_dir: &Vector, directions: &[Vector], n: usize) -> f64 {
    let m = directions.len();
    let vol = volume_of(directions, Some(&(-center_dir)));
    radius.powi((m * n) as i32 - 1) * (factorial(m) * vol).powi((n - m + 1) as i32)
}

/// Weight of the sphere containing a fixed circle `S(0, r0, Q)`:
/// `r^{m(n-1)+1} (r^2 - r0^2)^{(m-2)/2}
///  [m! Vol_m(-(sqrt(r^2-r0^2)/r) z, u^L)]^{n-q-m+1}`,
/// where `u^L` is the orthogonal projection of the directions onto the
/// carrier. With `q = 0`, `r0 = 0` this reduces to the pivoted formulas.
pub fn density_pivoted(p: &PivotedCircleParam, n: usize) -> Result<f64> {
    let m = p.tuple_size();
    let q = p.pivot.dim();
    if p.radius < p.pivot_radius {
        return Err(Error::invalid("pivoted density needs r >= r0"));
    }
    if m + q > n {
        return Err(Error::invalid("pivoted density needs m <= n - q"));
    }
    if p.radius == 0.0 {
        return Ok(0.0);
    }
    let rstar = p.center_distance();
    let pivot_vertex = &p.center_dir * (-rstar / p.radius);
    let projected: Vec<Vector> = p
        .directions
        .iter()
        .map(|u| p.carrier.project(u).expect("dimensions agree"))
        .collect();
    let vol = volume_of(&projected, Some(&pivot_vertex));
    let radial = p.radius.powi((m * (n - 1) + 1) as i32);
    let ring = (p.radius * p.radius - p.pivot_radius * p.pivot_radius)
        .max(0.0)
        .powf((m as f64 - 2.0) / 2.0);
    let bracket = (factorial(m) * vol).powi((n - q - m + 1) as i32);
    Ok(radial * ring * bracket)
}

/// Weight of the anchored formula: `r^{n(k+1)-(m+1)} [k! Vol_k(u^P)]^{m-k+1}`
/// with `u^P` the projection of the directions onto the carrier inside the
/// anchor flat.
pub fn density_anchored(p: &AnchoredParam, n: usize) -> f64 {
    let k = p.directions.len() - 1;
    let m = p.flat.dim();
    let projected: Vec<Vector> = p
        .directions
        .iter()
        .map(|u| p.carrier.project(u).expect("dimensions agree"))
        .collect();
    let vol = volume_of(&projected, None);
    let alpha = (n * (k + 1)) as i32 - (m + 1) as i32;
    p.radius.powi(alpha) * (factorial(k) * vol).powi((m - k + 1) as i32)
}

/// Weight of the on-sphere formula: `R^{kn-2} [k! Vol_k(u)]^{n-k+1}` with
/// `R^2 = 1 - |p|^2`.
pub fn density_on_sphere(p: &SphereOnSphereParam, n: usize) -> f64 {
    let k = p.directions.len() - 1;
    let vol = volume_of(&p.directions, None);
    p.radius().powi((k * n) as i32 - 2) * (factorial(k) * vol).powi((n - k + 1) as i32)
}

/// Integrand weight of the rotationally symmetric on-sphere form:
/// `t^{(kn-2)/2} (1-t)^{(n-k-1)/2} [k! Vol_k(u)]^{n-k+1}` for `t` in `[0,1]`
/// and `k+1` unit directions in `R^k`. The constant prefactor is exposed
/// separately by [`symmetric_prefactor`].
pub fn density_on_sphere_symmetric(t: f64, u: &PointTuple, n: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::invalid(format!("t must lie in [0, 1], got {t}")));
    }
    let k = u.len() - 1;
    let vol = simplex_volume(u, None).expect("dimensions agree");
    let t_pow = t.powf(((k * n) as f64 - 2.0) / 2.0);
    let s_pow = (1.0 - t).powf((n as f64 - k as f64 - 1.0) / 2.0);
    Ok(t_pow * s_pow * (factorial(k) * vol).powi((n - k + 1) as i32))
}

/// Constant prefactor of the symmetric on-sphere form:
/// `(sigma_{n+1} / 2) |G(k,n)|`.
pub fn symmetric_prefactor(k: usize, n: usize) -> Result<f64> {
    Ok(sphere_surface_area(n + 1)? / 2.0 * grassmannian_measure(k, n)?)
}

/// Closed-form weight of `param` under `theorem`, in ambient dimension `n`
/// (the sphere dimension for the on-sphere formulas).
pub fn theorem_density(theorem: TheoremId, param: &SphereParam, n: usize) -> Result<f64> {
    match (theorem, param) {
        (TheoremId::LinearBp, SphereParam::Linear { points, .. }) => {
            Ok(density_linear_bp(points, n))
        }
        (TheoremId::AffineBp, SphereParam::Affine { points, .. }) => {
            Ok(density_affine_bp(points, n))
        }
        (TheoremId::Circumscribed, SphereParam::Circumscribed(p)) => {
            Ok(density_circumscribed(p, n))
        }
        (TheoremId::TopDimensional, SphereParam::Circumscribed(p)) => {
            Ok(density_top(p.radius, &p.directions, n))
        }
        (TheoremId::Pivoted1, SphereParam::Pivoted(p)) => {
            Ok(density_pivoted_1(p.radius, &p.center_dir, &p.directions, n))
        }
        (TheoremId::Pivoted2, SphereParam::Pivoted(p)) => {
            Ok(density_pivoted_2(p.radius, &p.center_dir, &p.directions, n))
        }
        (TheoremId::PivotedCircle, SphereParam::Pivoted(p)) => density_pivoted(p, n),
        (TheoremId::Anchored, SphereParam::Anchored(p)) => Ok(density_anchored(p, n)),
        (TheoremId::OnSphere, SphereParam::OnSphere(p)) => Ok(density_on_sphere(p, n)),
        (TheoremId::OnSphereSymmetric, SphereParam::SymmetricSlice { t, directions }) => {
            density_on_sphere_symmetric(*t, directions, n)
        }
        _ => Err(Error::invalid(format!(
            "parameter variant does not match theorem {theorem}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Frame;
    use approx::assert_relative_eq;

    fn e(i: usize, n: usize) -> Vector {
        let mut v = Vector::zeros(n);
        v[i] = 1.0;
        v
    }

    #[test]
    fn linear_bp_examples() {
        // k = n: exponent 0, density 1 for any u
        let u = PointTuple::from_rows(&[&[0.3, 0.4], &[0.1, 0.9]]).unwrap();
        assert_eq!(density_linear_bp(&u, 2), 1.0);
        // k=1, n=3, u = ((2,0,0)): [1 * 2]^2 = 4
        let u = PointTuple::from_rows(&[&[2.0, 0.0, 0.0]]).unwrap();
        assert_relative_eq!(density_linear_bp(&u, 3), 4.0, epsilon = 1e-14);
        // degenerate u -> 0
        let u = PointTuple::from_rows(&[&[1.0, 1.0, 0.0], &[2.0, 2.0, 0.0]]).unwrap();
        assert_eq!(density_linear_bp(&u, 3), 0.0);
    }

    #[test]
    fn affine_bp_examples() {
        let u = PointTuple::from_rows(&[&[0.1, 0.2], &[0.4, 0.8], &[0.9, 0.1]]).unwrap();
        assert_eq!(density_affine_bp(&u, 2), 1.0); // k = n
        let u = PointTuple::from_rows(&[&[0.0, 0.0], &[3.0, 0.0]]).unwrap();
        assert_relative_eq!(density_affine_bp(&u, 2), 3.0, epsilon = 1e-14);
        let u = PointTuple::from_rows(&[&[0.0, 0.0], &[1.0, 1.0], &[2.0, 2.0]]).unwrap();
        assert_eq!(density_affine_bp(&u, 3), 0.0);
    }

    #[test]
    fn circumscribed_substitution() {
        // n=2, k=1, r=1, u = (-e1, e1) -> 1 * [1! * 2]^2 = 4
        let p = CircumscribedParam::new(
            Vector::zeros(2),
            Frame::new(vec![e(0, 2)], 2).unwrap(),
            1.0,
            vec![-e(0, 2), e(0, 2)],
        )
        .unwrap();
        assert_relative_eq!(density_circumscribed(&p, 2), 4.0, epsilon = 1e-14);
    }

    #[test]
    fn top_dimensional_substitution() {
        // n=2, r=2, u = ((1,0),(-1,0),(0,1)): 8 * 2 * 1 = 16
        let u = vec![e(0, 2), -e(0, 2), e(1, 2)];
        assert_relative_eq!(density_top(2.0, &u, 2), 16.0, epsilon = 1e-13);
        // n=1: r^0 * 1! * |u1 - u0| with u in {-1, 1}
        let same = vec![e(0, 1), e(0, 1)];
        assert_eq!(density_top(0.7, &same, 1), 0.0);
        let opposite = vec![e(0, 1), -e(0, 1)];
        assert_relative_eq!(density_top(0.7, &opposite, 1), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn pivoted_1_substitution() {
        // n=2, r=1, z=e1, u=(e1,e2): 2! Vol2(-e1; e1, e2) = 2 * 1 = 2
        let u = vec![e(0, 2), e(1, 2)];
        assert_relative_eq!(density_pivoted_1(1.0, &e(0, 2), &u, 2), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn pivoted_circle_substitution() {
        // n=3, q=1, m=2, r0=1, r=sqrt(2), Q=span(e3), L=span(e1,e2), z=e1,
        // u=(e2,e3) -> (sqrt2)^5 * (2 Vol2)^1 = 4
        let p = PivotedCircleParam::new(
            Frame::new(vec![e(2, 3)], 3).unwrap(),
            1.0,
            Frame::new(vec![e(0, 3), e(1, 3)], 3).unwrap(),
            2.0_f64.sqrt(),
            e(0, 3),
            vec![e(1, 3), e(2, 3)],
        )
        .unwrap();
        assert_relative_eq!(density_pivoted(&p, 3).unwrap(), 4.0, epsilon = 1e-13);
    }

    #[test]
    fn pivoted_circle_vanishes_at_r0_for_m_over_2() {
        // r = r0 with m > 2 kills the (r^2 - r0^2)^{(m-2)/2} factor
        let p = PivotedCircleParam::new(
            Frame::empty(3),
            1.5,
            Frame::identity(3),
            1.5,
            e(0, 3),
            vec![e(0, 3), e(1, 3), e(2, 3)],
        )
        .unwrap();
        assert_eq!(density_pivoted(&p, 3).unwrap(), 0.0);
    }

    #[test]
    fn on_sphere_substitution() {
        // n=2, k=1, R = sqrt(0.5), u = +-(1,-1,0)/sqrt2: the segment between
        // the antipodal directions has length 2, so the weight is
        // (0.5)^0 [1! * 2]^2 = 4. (Any other value would break the
        // closed-form total 16 pi^2 for the constant integrand.)
        let dir = (e(0, 3) - e(1, 3)).normalize();
        let sigma = Frame::new(vec![dir.clone()], 3).unwrap();
        let p = SphereOnSphereParam::new(
            sigma,
            Vector::from_row_slice(&[0.5, 0.5, 0.0]),
            vec![dir.clone(), -dir],
        )
        .unwrap();
        assert_relative_eq!(density_on_sphere(&p, 2), 4.0, epsilon = 1e-13);
    }

    #[test]
    fn symmetric_form_examples() {
        // k=1, n=2: both exponents vanish, weight = [Vol_1]^2 independent of t
        let u = PointTuple::from_rows(&[&[1.0], &[-1.0]]).unwrap();
        let a = density_on_sphere_symmetric(0.25, &u, 2).unwrap();
        let b = density_on_sphere_symmetric(0.75, &u, 2).unwrap();
        assert_relative_eq!(a, 4.0, epsilon = 1e-14);
        assert_relative_eq!(a, b, epsilon = 1e-14);
        // t outside [0,1] is rejected
        assert!(density_on_sphere_symmetric(-0.1, &u, 2).is_err());
        assert!(density_on_sphere_symmetric(1.1, &u, 2).is_err());
        // t = 0 with kn > 2 kills the weight
        let u2 = PointTuple::from_rows(&[&[1.0, 0.0], &[0.0, 1.0], &[-1.0, 0.0]]).unwrap();
        assert_eq!(density_on_sphere_symmetric(0.0, &u2, 3).unwrap(), 0.0);
    }

    #[test]
    fn symmetric_prefactor_value() {
        // (sigma_3 / 2) |G(1,2)| = 2 pi * pi = 2 pi^2
        let pi = std::f64::consts::PI;
        assert_relative_eq!(
            symmetric_prefactor(1, 2).unwrap(),
            2.0 * pi * pi,
            epsilon = 1e-12
        );
    }

    #[test]
    fn anchored_point_case_is_pure_power() {
        // k = 0: weight reduces to r^{n-m-1}
        let n = 3;
        let dir = Frame::new(vec![e(0, n)], n).unwrap();
        let flat = crate::geometry::AffineFlat::new(dir, Vector::zeros(n)).unwrap();
        let p = AnchoredParam::new(
            flat,
            Vector::zeros(n),
            2.0,
            Frame::empty(n),
            vec![e(1, n)],
        )
        .unwrap();
        // alpha = n(k+1) - (m+1) = 3 - 2 = 1
        assert_relative_eq!(density_anchored(&p, n), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn pivoted_rejects_r_below_r0() {
        let p = PivotedCircleParam {
            pivot: Frame::empty(2),
            pivot_radius: 2.0,
            carrier: Frame::identity(2),
            radius: 1.0,
            center_dir: e(0, 2),
            directions: vec![e(0, 2), e(1, 2)],
        };
        assert!(density_pivoted(&p, 2).is_err());
    }
}
