//! Test integrands for the Monte Carlo identity checks. All are
//! non-negative and measurable; most have a closed-form integral so the
//! left-hand side can be pinned exactly.

use serde::{Deserialize, Serialize};

use crate::geometry::{simplex_volume, PointTuple};
use crate::measures::{ball_volume, sphere_surface_area};
use crate::{Error, Result};

/// Domain of the tuple integral: `(R^n)^T` or `(S^n)^T`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    Euclidean,
    Sphere,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "kebab-case")]
pub enum Integrand {
    /// Product of standard normal densities, one per point; integrates to
    /// exactly 1 over `(R^n)^T`.
    #[serde(rename = "gaussian")]
    GaussianProduct,
    /// Indicator that every point lies in the centered ball of the given
    /// radius.
    #[serde(rename = "ball")]
    BallIndicator { radius: f64 },
    /// Simplex volume of the tuple raised to a power, cut off to the
    /// centered ball so both sides stay finite.
    VolumePower { exponent: f64, cutoff: f64 },
    /// The constant 1 on a spherical domain.
    #[serde(rename = "constant")]
    ConstantOnSphere,
}

impl Integrand {
    pub fn name(&self) -> &'static str {
        match self {
            Integrand::GaussianProduct => "gaussian",
            Integrand::BallIndicator { .. } => "ball",
            Integrand::VolumePower { .. } => "volume-power",
            Integrand::ConstantOnSphere => "constant",
        }
    }

    pub fn validate_for(&self, domain: Domain) -> Result<()> {
        match self {
            Integrand::ConstantOnSphere if domain == Domain::Euclidean => Err(Error::invalid(
                "the constant integrand is not integrable over Euclidean tuples",
            )),
            Integrand::BallIndicator { radius } if *radius <= 0.0 => {
                Err(Error::invalid("ball indicator radius must be positive"))
            }
            Integrand::VolumePower { exponent, cutoff } => {
                if *exponent < 0.0 {
                    return Err(Error::invalid("volume power exponent must be non-negative"));
                }
                if domain == Domain::Euclidean && *cutoff <= 0.0 {
                    return Err(Error::invalid(
                        "volume power needs a positive cutoff on Euclidean domains",
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: &PointTuple) -> f64 {
        match self {
            Integrand::GaussianProduct => {
                let d = x.dim() as f64;
                let norm2: f64 = x.iter().map(|p| p.norm_squared()).sum();
                let log = -0.5 * norm2
                    - 0.5 * d * x.len() as f64 * (2.0 * std::f64::consts::PI).ln();
                log.exp()
            }
            Integrand::BallIndicator { radius } => {
                if x.iter().all(|p| p.norm() <= *radius) {
                    1.0
                } else {
                    0.0
                }
            }
            Integrand::VolumePower { exponent, cutoff } => {
                if x.iter().any(|p| p.norm() > *cutoff) {
                    return 0.0;
                }
                let vol = simplex_volume(x, None).expect("dimensions agree");
                if *exponent == 0.0 {
                    1.0
                } else {
                    vol.powf(*exponent)
                }
            }
            Integrand::ConstantOnSphere => 1.0,
        }
    }

    /// Exact value of the tuple integral when one is known. For spherical
    /// domains `n` is the sphere dimension (points live in `R^{n+1}`).
    pub fn exact_lhs(&self, tuple_size: usize, n: usize, domain: Domain) -> Option<f64> {
        match (self, domain) {
            (Integrand::GaussianProduct, Domain::Euclidean) => Some(1.0),
            (Integrand::GaussianProduct, Domain::Sphere) => {
                // Constant on the sphere: sigma_{n+1} * phi(1) per point.
                let d = (n + 1) as f64;
                let phi = (-0.5 - 0.5 * d * (2.0 * std::f64::consts::PI).ln()).exp();
                let sigma = sphere_surface_area(n + 1).ok()?;
                Some((sigma * phi).powi(tuple_size as i32))
            }
            (Integrand::BallIndicator { radius }, Domain::Euclidean) => {
                let kappa = ball_volume(n).ok()?;
                Some((kappa * radius.powi(n as i32)).powi(tuple_size as i32))
            }
            (Integrand::BallIndicator { radius }, Domain::Sphere) => {
                let sigma = sphere_surface_area(n + 1).ok()?;
                Some(if *radius >= 1.0 {
                    sigma.powi(tuple_size as i32)
                } else {
                    0.0
                })
            }
            (Integrand::ConstantOnSphere, Domain::Sphere) => {
                Some(sphere_surface_area(n + 1).ok()?.powi(tuple_size as i32))
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gaussian_at_origin() {
        let x = PointTuple::from_rows(&[&[0.0, 0.0]]).unwrap();
        assert_relative_eq!(
            Integrand::GaussianProduct.eval(&x),
            1.0 / (2.0 * std::f64::consts::PI),
            epsilon = 1e-15
        );
    }

    #[test]
    fn ball_indicator_cutoff() {
        let f = Integrand::BallIndicator { radius: 1.0 };
        let inside = PointTuple::from_rows(&[&[0.5, 0.0], &[0.0, -0.5]]).unwrap();
        let outside = PointTuple::from_rows(&[&[0.5, 0.0], &[1.5, 0.0]]).unwrap();
        assert_eq!(f.eval(&inside), 1.0);
        assert_eq!(f.eval(&outside), 0.0);
    }

    #[test]
    fn constant_rejected_on_euclidean() {
        assert!(Integrand::ConstantOnSphere.validate_for(Domain::Euclidean).is_err());
        assert!(Integrand::ConstantOnSphere.validate_for(Domain::Sphere).is_ok());
    }

    #[test]
    fn exact_values() {
        assert_eq!(
            Integrand::GaussianProduct.exact_lhs(3, 2, Domain::Euclidean),
            Some(1.0)
        );
        // unit interval: length 2 per point
        let ball = Integrand::BallIndicator { radius: 1.0 };
        assert_relative_eq!(
            ball.exact_lhs(1, 1, Domain::Euclidean).unwrap(),
            2.0,
            epsilon = 1e-14
        );
        // (4 pi)^2 for two points on S^2
        let pi = std::f64::consts::PI;
        assert_relative_eq!(
            Integrand::ConstantOnSphere.exact_lhs(2, 2, Domain::Sphere).unwrap(),
            16.0 * pi * pi,
            epsilon = 1e-12
        );
    }
}
