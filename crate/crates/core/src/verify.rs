//! Statistical certification of the identities: pairs a left-hand-side
//! value (exact where available, Monte Carlo otherwise) with the
//! importance-sampled right-hand side and scores the difference.

use serde::{Deserialize, Serialize};

use crate::estimator::{estimate_lhs, estimate_rhs, EstimatorReport, SUBSTREAMS};
use crate::integrand::{Domain, Integrand};
use crate::sampling::{ProposalSpec, RandomStream};
use crate::theorem::{TheoremConfig, TheoremId};

pub const DEFAULT_THRESHOLD: f64 = 3.5;

/// Left-hand side of a comparison: a closed-form value or an estimate.
#[derive(Clone, Debug)]
pub enum LhsValue {
    Exact(f64),
    Estimated(EstimatorReport),
}

impl LhsValue {
    pub fn mean(&self) -> f64 {
        match self {
            LhsValue::Exact(v) => *v,
            LhsValue::Estimated(r) => r.mean,
        }
    }

    pub fn stderr(&self) -> f64 {
        match self {
            LhsValue::Exact(_) => 0.0,
            LhsValue::Estimated(r) => r.stderr,
        }
    }
}

/// One side of a comparison as it appears in reports.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SideReport {
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
    pub exact: bool,
}

impl SideReport {
    fn from_lhs(lhs: &LhsValue) -> Self {
        match lhs {
            LhsValue::Exact(v) => SideReport { mean: *v, stderr: 0.0, n: 0, exact: true },
            LhsValue::Estimated(r) => {
                SideReport { mean: r.mean, stderr: r.stderr, n: r.samples, exact: false }
            }
        }
    }

    fn from_report(r: &EstimatorReport) -> Self {
        SideReport { mean: r.mean, stderr: r.stderr, n: r.samples, exact: false }
    }
}

/// Two-sided z comparison of an identity.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComparisonVerdict {
    pub lhs: SideReport,
    pub rhs: SideReport,
    pub z_score: f64,
    pub pass: bool,
}

/// Scores `(lhs - rhs) / sqrt(se_l^2 + se_r^2)`; an exact left side
/// contributes stderr 0. Passes when `|z| <= threshold`.
pub fn compare(lhs: &LhsValue, rhs: &EstimatorReport, threshold: f64) -> ComparisonVerdict {
    let denom = (lhs.stderr() * lhs.stderr() + rhs.stderr * rhs.stderr).sqrt();
    let diff = lhs.mean() - rhs.mean;
    let z_score = if denom > 0.0 {
        diff / denom
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY * diff.signum()
    };
    ComparisonVerdict {
        lhs: SideReport::from_lhs(lhs),
        rhs: SideReport::from_report(rhs),
        z_score,
        pass: z_score.abs() <= threshold,
    }
}

/// One verification case: a theorem instance, an integrand, and a sample
/// budget.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CaseSpec {
    pub theorem: TheoremId,
    pub config: TheoremConfig,
    pub integrand: Integrand,
    pub samples: u64,
}

impl CaseSpec {
    pub fn new(theorem: TheoremId, config: TheoremConfig, integrand: Integrand, samples: u64) -> Self {
        CaseSpec { theorem, config, integrand, samples }
    }
}

/// Outcome of one case, as serialized into reports.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CaseResult {
    pub theorem: TheoremId,
    pub config: TheoremConfig,
    pub integrand: Integrand,
    pub samples: u64,
    pub lhs: SideReport,
    pub rhs: SideReport,
    pub z_score: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub wall_time: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub threshold: f64,
}

/// Machine-readable verification report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteReport {
    pub version: String,
    pub config: SuiteConfig,
    pub cases: Vec<CaseResult>,
    pub summary: SuiteSummary,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }
}

fn failed_case(spec: &CaseSpec, reason: String) -> CaseResult {
    let empty = SideReport { mean: f64::NAN, stderr: f64::NAN, n: 0, exact: false };
    CaseResult {
        theorem: spec.theorem,
        config: spec.config.clone(),
        integrand: spec.integrand.clone(),
        samples: spec.samples,
        lhs: empty.clone(),
        rhs: empty,
        z_score: f64::NAN,
        pass: false,
        reason: Some(reason),
        wall_time: 0.0,
    }
}

/// Runs one case. Each case consumes the stream block
/// `[base, base + 2 * SUBSTREAMS)`: the left side uses the first half, the
/// right side the second.
pub fn run_case(
    spec: &CaseSpec,
    seed: u64,
    base_stream: u64,
    threshold: f64,
    proposal: Option<&ProposalSpec>,
) -> CaseResult {
    let start = std::time::Instant::now();
    if let Err(e) = spec.config.validate(spec.theorem) {
        return failed_case(spec, e.to_string());
    }
    let domain =
        if spec.theorem.spherical_domain() { Domain::Sphere } else { Domain::Euclidean };
    if let Err(e) = spec.integrand.validate_for(domain) {
        return failed_case(spec, e.to_string());
    }
    let default_proposal = ProposalSpec::default_for(spec.theorem, &spec.config);
    let proposal = proposal.unwrap_or(&default_proposal);
    let tuple_size = spec.config.tuple_size(spec.theorem);

    let lhs = match spec.integrand.exact_lhs(tuple_size, spec.config.n, domain) {
        Some(v) => LhsValue::Exact(v),
        None => {
            match estimate_lhs(
                &spec.integrand,
                tuple_size,
                spec.config.n,
                domain,
                spec.samples,
                proposal,
                RandomStream::new(seed, base_stream),
            ) {
                Ok(r) => LhsValue::Estimated(r),
                Err(e) => return failed_case(spec, e.to_string()),
            }
        }
    };
    let rhs = match estimate_rhs(
        spec.theorem,
        &spec.integrand,
        &spec.config,
        spec.samples,
        proposal,
        RandomStream::new(seed, base_stream + SUBSTREAMS),
    ) {
        Ok(r) => r,
        Err(e) => return failed_case(spec, e.to_string()),
    };
    let verdict = compare(&lhs, &rhs, threshold);
    CaseResult {
        theorem: spec.theorem,
        config: spec.config.clone(),
        integrand: spec.integrand.clone(),
        samples: spec.samples,
        lhs: verdict.lhs,
        rhs: verdict.rhs,
        z_score: verdict.z_score,
        pass: verdict.pass,
        reason: None,
        wall_time: start.elapsed().as_secs_f64(),
    }
}

/// Runs every case with per-case stream blocks carved out of `seed`'s
/// stream space; deterministic given the seed.
pub fn run_suite(specs: &[CaseSpec], seed: u64, threshold: f64) -> SuiteReport {
    let cases: Vec<CaseResult> = specs
        .iter()
        .enumerate()
        .map(|(i, spec)| run_case(spec, seed, (i as u64) * 2 * SUBSTREAMS, threshold, None))
        .collect();
    let passed = cases.iter().filter(|c| c.pass).count();
    let failed = cases.len() - passed;
    SuiteReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: SuiteConfig { seed, threshold },
        cases,
        summary: SuiteSummary { passed, failed },
    }
}

/// The default verification suite: Gaussian normalization identities over
/// every theorem at a spread of dimensions, plus the spherical closed
/// forms.
pub fn default_suite(samples: u64) -> Vec<CaseSpec> {
    let gauss = Integrand::GaussianProduct;
    let constant = Integrand::ConstantOnSphere;
    let mut cases = Vec::new();
    for (n, k) in [(2, 1), (2, 2), (3, 1), (3, 2), (3, 3), (4, 2)] {
        cases.push(CaseSpec::new(
            TheoremId::Circumscribed,
            TheoremConfig::new(n).with_k(k),
            gauss.clone(),
            samples,
        ));
    }
    for n in [1, 2, 3] {
        cases.push(CaseSpec::new(
            TheoremId::TopDimensional,
            TheoremConfig::new(n),
            gauss.clone(),
            samples,
        ));
    }
    for n in [2, 3] {
        cases.push(CaseSpec::new(
            TheoremId::Pivoted1,
            TheoremConfig::new(n),
            gauss.clone(),
            samples,
        ));
    }
    for (n, m) in [(3, 2), (4, 2)] {
        cases.push(CaseSpec::new(
            TheoremId::Pivoted2,
            TheoremConfig::new(n).with_m(m),
            gauss.clone(),
            samples,
        ));
    }
    for (n, m, q, r0) in [(3, 2, 1, 1.0), (4, 2, 1, 0.5), (3, 1, 1, 1.0)] {
        cases.push(CaseSpec::new(
            TheoremId::PivotedCircle,
            TheoremConfig::new(n).with_m(m).with_q(q).with_r0(r0),
            gauss.clone(),
            samples,
        ));
    }
    for (n, m, k) in [(3, 2, 1), (3, 2, 2), (4, 3, 2)] {
        cases.push(CaseSpec::new(
            TheoremId::Anchored,
            TheoremConfig::new(n).with_m(m).with_k(k),
            gauss.clone(),
            samples,
        ));
    }
    for (n, k) in [(3, 1), (3, 2)] {
        cases.push(CaseSpec::new(
            TheoremId::AffineBp,
            TheoremConfig::new(n).with_k(k),
            gauss.clone(),
            samples,
        ));
    }
    for (n, k) in [(3, 1), (3, 2)] {
        cases.push(CaseSpec::new(
            TheoremId::LinearBp,
            TheoremConfig::new(n).with_k(k),
            gauss.clone(),
            samples,
        ));
    }
    for (n, k) in [(2, 1), (3, 1)] {
        cases.push(CaseSpec::new(
            TheoremId::OnSphere,
            TheoremConfig::new(n).with_k(k),
            constant.clone(),
            samples,
        ));
        cases.push(CaseSpec::new(
            TheoremId::OnSphereSymmetric,
            TheoremConfig::new(n).with_k(k),
            constant.clone(),
            samples,
        ));
    }
    cases
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(mean: f64, stderr: f64) -> EstimatorReport {
        EstimatorReport {
            mean,
            stderr,
            samples: 100,
            seed: 0,
            stream_id: 0,
            config: String::new(),
            wall_time: 0.0,
        }
    }

    #[test]
    fn identical_reports_score_zero() {
        let r = report(1.5, 0.1);
        let v = compare(&LhsValue::Estimated(r.clone()), &r, 3.5);
        assert_eq!(v.z_score, 0.0);
        assert!(v.pass);
    }

    #[test]
    fn borderline_fail() {
        // means 1.00 vs 1.05 with stderrs 0.01 each: z = -3.54, fails at 3.5
        let v = compare(&LhsValue::Estimated(report(1.0, 0.01)), &report(1.05, 0.01), 3.5);
        assert!((v.z_score + 3.5355).abs() < 1e-3);
        assert!(!v.pass);
    }

    #[test]
    fn exact_lhs_uses_rhs_stderr_only() {
        let v = compare(&LhsValue::Exact(2.0), &report(2.02, 0.01), 3.5);
        assert!((v.z_score + 2.0).abs() < 1e-12);
        assert!(v.lhs.exact);
        assert!(v.pass);
    }

    #[test]
    fn exact_vs_exactly_equal_mean() {
        let v = compare(&LhsValue::Exact(1.0), &report(1.0, 0.0), 3.5);
        assert_eq!(v.z_score, 0.0);
        assert!(v.pass);
        let w = compare(&LhsValue::Exact(1.0), &report(2.0, 0.0), 3.5);
        assert!(!w.pass);
    }

    #[test]
    fn empty_suite_is_empty() {
        let report = run_suite(&[], 42, 3.5);
        assert!(report.cases.is_empty());
        assert_eq!(report.summary.passed, 0);
        assert_eq!(report.summary.failed, 0);
    }

    #[test]
    fn bad_config_becomes_failed_verdict() {
        let spec = CaseSpec::new(
            TheoremId::PivotedCircle,
            TheoremConfig::new(3).with_m(3).with_q(1),
            Integrand::GaussianProduct,
            100,
        );
        let report = run_suite(&[spec], 42, 3.5);
        assert_eq!(report.summary.failed, 1);
        assert!(report.cases[0].reason.as_ref().unwrap().contains("m <= n - q"));
    }

    #[test]
    fn default_suite_has_expected_shape() {
        let suite = default_suite(1000);
        assert_eq!(suite.len(), 27);
        assert!(suite.iter().all(|c| c.samples == 1000));
    }

    #[test]
    fn gaussian_integrand_works_on_sphere_domains() {
        // On the sphere the Gaussian product is constant, so the left side
        // is closed-form; the symmetric-slice estimator must reproduce it.
        let spec = CaseSpec::new(
            TheoremId::OnSphereSymmetric,
            TheoremConfig::new(2).with_k(1),
            Integrand::GaussianProduct,
            50_000,
        );
        let result = run_case(&spec, 42, 0, 3.5, None);
        assert!(result.lhs.exact);
        let sigma = crate::measures::sphere_surface_area(3).unwrap();
        let phi = (2.0 * std::f64::consts::PI).powf(-1.5) * (-0.5_f64).exp();
        assert!((result.lhs.mean - (sigma * phi).powi(2)).abs() < 1e-12);
        assert!(result.pass, "z = {}", result.z_score);
    }

    #[test]
    fn volume_power_case_estimates_both_sides() {
        // No closed form for this integrand, so the left side is also a
        // Monte Carlo estimate.
        let spec = CaseSpec::new(
            TheoremId::TopDimensional,
            TheoremConfig::new(2),
            Integrand::VolumePower { exponent: 1.0, cutoff: 1.5 },
            150_000,
        );
        let result = run_case(&spec, 42, 0, 3.5, None);
        assert!(!result.lhs.exact);
        assert!(result.lhs.stderr > 0.0 && result.rhs.stderr > 0.0);
        assert!(result.pass, "lhs {:?} rhs {:?} z {}", result.lhs, result.rhs, result.z_score);
    }

    #[test]
    fn anchored_point_case_estimates_one() {
        // k = 0: a single point split as nearest flat point, distance, and
        // direction in the orthogonal complement.
        let spec = CaseSpec::new(
            TheoremId::Anchored,
            TheoremConfig::new(2).with_m(1).with_k(0),
            Integrand::GaussianProduct,
            100_000,
        );
        let result = run_case(&spec, 42, 0, 3.5, None);
        assert!(result.pass, "rhs {} +- {}", result.rhs.mean, result.rhs.stderr);
    }

    #[test]
    fn small_deterministic_case_runs() {
        let spec = CaseSpec::new(
            TheoremId::TopDimensional,
            TheoremConfig::new(1),
            Integrand::GaussianProduct,
            20_000,
        );
        let a = run_case(&spec, 42, 0, 3.5, None);
        let b = run_case(&spec, 42, 0, 3.5, None);
        assert!(a.pass, "z = {}, rhs = {} +- {}", a.z_score, a.rhs.mean, a.rhs.stderr);
        assert_eq!(a.rhs.mean.to_bits(), b.rhs.mean.to_bits());
    }
}
