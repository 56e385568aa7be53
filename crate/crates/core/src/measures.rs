//! Total masses of the measures entering the reparametrization formulas:
//! spherical surface areas, Grassmannian volumes, ball volumes, factorials.

use statrs::function::gamma::ln_gamma;

use crate::{Error, Result};

const FACTORIALS: [f64; 21] = [
    1.0,
    1.0,
    2.0,
    6.0,
    24.0,
    120.0,
    720.0,
    5040.0,
    40320.0,
    362880.0,
    3628800.0,
    39916800.0,
    479001600.0,
    6227020800.0,
    87178291200.0,
    1307674368000.0,
    20922789888000.0,
    355687428096000.0,
    6402373705728000.0,
    121645100408832000.0,
    2432902008176640000.0,
];

/// `k!` as a double: exact table up to 20, `exp(ln Gamma)` beyond, so large
/// arguments degrade gracefully instead of overflowing silently.
pub fn factorial(k: usize) -> f64 {
    if k < FACTORIALS.len() {
        FACTORIALS[k]
    } else {
        ln_gamma(k as f64 + 1.0).exp()
    }
}

/// Surface measure of the unit sphere `S^{n-1}` in `R^n`:
/// `sigma_n = 2 pi^{n/2} / Gamma(n/2)`.
///
/// Half-integer Gamma values are expanded in closed form so small dimensions
/// are exact to the last bit: `sigma_{2j} = 2 pi^j / (j-1)!` and
/// `sigma_{2j+1} = 2 (4 pi)^j j! / (2j)!`.
pub fn sphere_surface_area(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("sphere surface area requires n >= 1"));
    }
    let pi = std::f64::consts::PI;
    if n % 2 == 0 {
        let j = n / 2;
        if j <= 10 {
            return Ok(2.0 * pi.powi(j as i32) / factorial(j - 1));
        }
    } else {
        let j = (n - 1) / 2;
        if j <= 10 {
            return Ok(2.0 * (4.0 * pi).powi(j as i32) * factorial(j) / factorial(2 * j));
        }
    }
    Ok((std::f64::consts::LN_2 + (n as f64 / 2.0) * pi.ln() - ln_gamma(n as f64 / 2.0)).exp())
}

/// Volume of the unit ball in `R^n`: `kappa_n = sigma_n / n`.
pub fn ball_volume(n: usize) -> Result<f64> {
    Ok(sphere_surface_area(n)? / n as f64)
}

/// Total mass of the Grassmannian of `k`-dimensional linear subspaces of
/// `R^n` under the rotation-invariant measure, normalized as
/// `(sigma_n ... sigma_{n-k+1}) / (sigma_1 ... sigma_k)`.
///
/// Evaluated with `k` canonicalized to `min(k, n-k)`, which leaves the value
/// unchanged and makes the duality `|G(k,n)| = |G(n-k,n)|` hold bit-exactly.
pub fn grassmannian_measure(k: usize, n: usize) -> Result<f64> {
    if k > n {
        return Err(Error::invalid(format!(
            "Grassmannian G({k},{n}) requires k <= n"
        )));
    }
    let k = k.min(n - k);
    let mut value = 1.0;
    for i in 0..k {
        value *= sphere_surface_area(n - i)? / sphere_surface_area(i + 1)?;
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn small_sphere_areas() {
        assert_relative_eq!(sphere_surface_area(1).unwrap(), 2.0, epsilon = 1e-15);
        assert_relative_eq!(sphere_surface_area(2).unwrap(), 2.0 * PI, epsilon = 1e-15);
        assert_relative_eq!(sphere_surface_area(3).unwrap(), 4.0 * PI, epsilon = 1e-15);
        assert_relative_eq!(sphere_surface_area(4).unwrap(), 2.0 * PI * PI, epsilon = 1e-15);
        assert!(sphere_surface_area(0).is_err());
    }

    #[test]
    fn matches_gamma_expression() {
        // Independent route through the Gamma function.
        use statrs::function::gamma::gamma;
        for n in 1..=12 {
            let direct = 2.0 * PI.powf(n as f64 / 2.0) / gamma(n as f64 / 2.0);
            assert_relative_eq!(
                sphere_surface_area(n).unwrap(),
                direct,
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn matches_recurrence() {
        // sigma_{n} = 2 pi sigma_{n-2} / (n - 2)
        for n in 3..=16 {
            let rec = 2.0 * PI * sphere_surface_area(n - 2).unwrap() / (n as f64 - 2.0);
            assert_relative_eq!(sphere_surface_area(n).unwrap(), rec, max_relative = 1e-14);
        }
    }

    #[test]
    fn grassmannian_values() {
        assert_relative_eq!(grassmannian_measure(1, 2).unwrap(), PI, epsilon = 1e-14);
        assert_eq!(grassmannian_measure(0, 5).unwrap(), 1.0);
        assert_eq!(grassmannian_measure(5, 5).unwrap(), 1.0);
        assert_relative_eq!(
            grassmannian_measure(2, 4).unwrap(),
            2.0 * PI * PI,
            epsilon = 1e-12
        );
        assert!(grassmannian_measure(3, 2).is_err());
    }

    #[test]
    fn grassmannian_duality_is_exact() {
        for n in 1..=10 {
            for k in 0..=n {
                let a = grassmannian_measure(k, n).unwrap();
                let b = grassmannian_measure(n - k, n).unwrap();
                assert_eq!(a.to_bits(), b.to_bits(), "G({k},{n}) vs G({},{n})", n - k);
            }
        }
    }

    #[test]
    fn factorial_table_and_tail() {
        assert_eq!(factorial(0), 1.0);
        assert_eq!(factorial(5), 120.0);
        assert_relative_eq!(factorial(25), 1.551121004333098e25, max_relative = 1e-12);
    }

    #[test]
    fn ball_volumes() {
        assert_relative_eq!(ball_volume(1).unwrap(), 2.0, epsilon = 1e-15);
        assert_relative_eq!(ball_volume(2).unwrap(), PI, epsilon = 1e-15);
        assert_relative_eq!(ball_volume(3).unwrap(), 4.0 * PI / 3.0, epsilon = 1e-14);
    }
}
