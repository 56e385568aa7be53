//! Certify a couple of identities from library code.
//!
//! Run with: cargo run --release -p bp-core --example certify

use bp_core::fd::{fd_jacobian_density, random_chartfree_param};
use bp_core::integrand::Integrand;
use bp_core::sampling::RandomStream;
use bp_core::verify::{run_suite, CaseSpec};
use bp_core::{TheoremConfig, TheoremId};

fn main() {
    let cases = vec![
        CaseSpec::new(
            TheoremId::Circumscribed,
            TheoremConfig::new(3).with_k(2),
            Integrand::GaussianProduct,
            200_000,
        ),
        CaseSpec::new(
            TheoremId::OnSphere,
            TheoremConfig::new(2).with_k(1),
            Integrand::ConstantOnSphere,
            200_000,
        ),
    ];
    let report = run_suite(&cases, 42, 3.5);
    for case in &report.cases {
        println!(
            "{:<14} lhs {:>10.4}   rhs {:>10.4} +- {:.4}   z {:+.2}   {}",
            case.theorem.to_string(),
            case.lhs.mean,
            case.rhs.mean,
            case.rhs.stderr,
            case.z_score,
            if case.pass { "pass" } else { "FAIL" },
        );
    }

    // The same density, checked through finite differences instead of
    // Monte Carlo.
    let config = TheoremConfig::new(3);
    let mut rng = RandomStream::new(42, 0).rng();
    let param = random_chartfree_param(TheoremId::TopDimensional, &config, &mut rng).unwrap();
    let fd = fd_jacobian_density(TheoremId::TopDimensional, &param, 1e-5).unwrap();
    let closed =
        bp_core::density::theorem_density(TheoremId::TopDimensional, &param, 3).unwrap();
    println!("top-dimensional Jacobian: fd {fd:.6} vs closed form {closed:.6}");
}
