//! Python bindings: the measure constants, simplex volumes, sphere
//! decompositions, closed-form densities, and the Monte Carlo / finite
//! difference verification entry points.

use std::str::FromStr;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use bp_core::estimator::{estimate_rhs, SUBSTREAMS};
use bp_core::fd::{fd_jacobian_density as fd_density, random_chartfree_param};
use bp_core::geometry::{
    decompose_circumscribed, simplex_volume as core_simplex_volume, PointTuple, Vector,
};
use bp_core::integrand::{Domain, Integrand};
use bp_core::sampling::{ProposalSpec, RandomStream};
use bp_core::verify::{compare, LhsValue};
use bp_core::{TheoremConfig, TheoremId};

fn err(e: bp_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_tuple(points: Vec<Vec<f64>>) -> PyResult<PointTuple> {
    PointTuple::new(points.into_iter().map(Vector::from_vec).collect()).map_err(err)
}

fn parse_theorem(name: &str) -> PyResult<TheoremId> {
    TheoremId::from_str(name).map_err(err)
}

fn build_config(
    n: usize,
    k: Option<usize>,
    m: Option<usize>,
    q: Option<usize>,
    r0: Option<f64>,
) -> TheoremConfig {
    TheoremConfig { n, k, m, q, r0, pivot: None, anchor: None }
}

fn parse_integrand(name: &str) -> PyResult<Integrand> {
    match name {
        "gaussian" => Ok(Integrand::GaussianProduct),
        "constant" => Ok(Integrand::ConstantOnSphere),
        other => Err(PyValueError::new_err(format!(
            "unknown integrand '{other}' (use 'gaussian' or 'constant')"
        ))),
    }
}

/// Surface measure of the unit sphere S^{n-1} in R^n.
#[pyfunction]
fn sphere_surface_area(n: usize) -> PyResult<f64> {
    bp_core::measures::sphere_surface_area(n).map_err(err)
}

/// Total mass of the Grassmannian of k-subspaces of R^n.
#[pyfunction]
fn grassmannian_measure(k: usize, n: usize) -> PyResult<f64> {
    bp_core::measures::grassmannian_measure(k, n).map_err(err)
}

/// k-volume of the simplex spanned by the points (and the optional pivot
/// vertex).
#[pyfunction]
#[pyo3(signature = (points, pivot=None))]
fn simplex_volume(points: Vec<Vec<f64>>, pivot: Option<Vec<f64>>) -> PyResult<f64> {
    let tuple = to_tuple(points)?;
    let pivot = pivot.map(Vector::from_vec);
    core_simplex_volume(&tuple, pivot.as_ref()).map_err(err)
}

/// Center, radius, and unit directions of the sphere circumscribed around
/// the points.
#[pyfunction]
fn circumscribed_sphere(points: Vec<Vec<f64>>) -> PyResult<(Vec<f64>, f64, Vec<Vec<f64>>)> {
    let tuple = to_tuple(points)?;
    let param = decompose_circumscribed(&tuple).map_err(err)?;
    Ok((
        param.center.as_slice().to_vec(),
        param.radius,
        param.directions.iter().map(|u| u.as_slice().to_vec()).collect(),
    ))
}

/// Monte Carlo verification of one identity: compares the closed-form (or
/// estimated) left side against the importance-sampled right side and
/// returns a dict with means, stderr, z-score, and the pass flag.
#[pyfunction]
#[pyo3(signature = (theorem, n, k=None, m=None, q=None, r0=None, integrand="gaussian",
                    samples=100_000, seed=42, threshold=3.5))]
#[allow(clippy::too_many_arguments)]
fn verify(
    py: Python<'_>,
    theorem: &str,
    n: usize,
    k: Option<usize>,
    m: Option<usize>,
    q: Option<usize>,
    r0: Option<f64>,
    integrand: &str,
    samples: u64,
    seed: u64,
    threshold: f64,
) -> PyResult<Py<PyDict>> {
    let theorem = parse_theorem(theorem)?;
    let config = build_config(n, k, m, q, r0);
    config.validate(theorem).map_err(err)?;
    let integrand = parse_integrand(integrand)?;
    let domain = if theorem.spherical_domain() { Domain::Sphere } else { Domain::Euclidean };
    integrand.validate_for(domain).map_err(err)?;
    let proposal = ProposalSpec::default_for(theorem, &config);
    let lhs = integrand
        .exact_lhs(config.tuple_size(theorem), n, domain)
        .map(LhsValue::Exact)
        .ok_or_else(|| PyValueError::new_err("integrand has no closed-form left side"))?;
    let rhs = estimate_rhs(
        theorem,
        &integrand,
        &config,
        samples,
        &proposal,
        RandomStream::new(seed, SUBSTREAMS),
    )
    .map_err(err)?;
    let verdict = compare(&lhs, &rhs, threshold);
    let out = PyDict::new(py);
    out.set_item("theorem", theorem.name())?;
    out.set_item("lhs", verdict.lhs.mean)?;
    out.set_item("rhs", verdict.rhs.mean)?;
    out.set_item("stderr", verdict.rhs.stderr)?;
    out.set_item("z_score", verdict.z_score)?;
    out.set_item("pass", verdict.pass)?;
    out.set_item("samples", samples)?;
    out.set_item("seed", seed)?;
    Ok(out.into())
}

/// Worst relative error of the finite-difference Jacobian against the
/// closed-form density, over random non-degenerate parameter points of a
/// chart-free theorem.
#[pyfunction]
#[pyo3(signature = (theorem, n, k=None, m=None, q=None, r0=None, count=25, step=1e-5, seed=42))]
#[allow(clippy::too_many_arguments)]
fn fd_jacobian_check(
    theorem: &str,
    n: usize,
    k: Option<usize>,
    m: Option<usize>,
    q: Option<usize>,
    r0: Option<f64>,
    count: usize,
    step: f64,
    seed: u64,
) -> PyResult<f64> {
    let theorem = parse_theorem(theorem)?;
    let config = build_config(n, k, m, q, r0);
    config.validate(theorem).map_err(err)?;
    let mut rng = RandomStream::new(seed, 0).rng();
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let param = random_chartfree_param(theorem, &config, &mut rng).map_err(err)?;
        let fd = fd_density(theorem, &param, step).map_err(err)?;
        let closed = bp_core::density::theorem_density(theorem, &param, n).map_err(err)?;
        worst = worst.max((fd - closed).abs() / closed);
    }
    Ok(worst)
}

/// Names of the supported identities, as accepted by `verify`.
#[pyfunction]
fn theorems() -> Vec<&'static str> {
    TheoremId::ALL.iter().map(|t| t.name()).collect()
}

#[pymodule]
fn bpsphere(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(sphere_surface_area, m)?)?;
    m.add_function(wrap_pyfunction!(grassmannian_measure, m)?)?;
    m.add_function(wrap_pyfunction!(simplex_volume, m)?)?;
    m.add_function(wrap_pyfunction!(circumscribed_sphere, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(fd_jacobian_check, m)?)?;
    m.add_function(wrap_pyfunction!(theorems, m)?)?;
    Ok(())
}
