//! `bp`: batch front-end for the sphere reparametrization identities.
//! Runs verification suites, finite-difference oracles, round trips, and
//! constant tables; emits machine-readable JSON reports.
//!
//! Exit status: 0 when everything passes, 1 when any check fails, 2 on
//! usage errors.

use std::io::Write;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use bp_core::estimator::SUBSTREAMS;
use bp_core::fd::{fd_jacobian_density, random_chartfree_param};
use bp_core::geometry::{
    decompose_anchored, decompose_circumscribed, decompose_on_sphere, decompose_pivoted_circle,
    PointTuple, Vector,
};
use bp_core::integrand::Integrand;
use bp_core::sampling::{
    gaussian_point, sample_unit_sphere, ParamSampler, ProposalSpec, RadialLaw, RandomStream,
};
use bp_core::theorem::SphereParam;
use bp_core::verify::{default_suite, run_suite, CaseSpec, SuiteReport};
use bp_core::{TheoremConfig, TheoremId};

#[derive(Parser)]
#[command(name = "bp", version, about = "Verify sphere reparametrization identities by Monte Carlo")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo comparison of both sides of one identity (or the whole
    /// default suite when no theorem is given)
    Verify(VerifyArgs),
    /// Finite-difference Jacobian check for chart-free parametrizations
    Oracle(OracleArgs),
    /// Decompose/reconstruct round trips on random tuples
    Roundtrip(RoundtripArgs),
    /// Print sphere surface areas and Grassmannian measures
    Constants(ConstantsArgs),
    /// Draw parameter-space samples and print them as JSON lines
    Sample(SampleArgs),
}

#[derive(Args, Clone)]
struct DimArgs {
    /// Ambient dimension (sphere dimension for the on-sphere formulas)
    #[arg(long)]
    n: Option<usize>,
    /// Subspace / tuple dimension k
    #[arg(long)]
    k: Option<usize>,
    /// Point count m (pivoted formulas) or anchor dimension m (anchored)
    #[arg(long)]
    m: Option<usize>,
    /// Dimension of the fixed pivot plane
    #[arg(long)]
    q: Option<usize>,
    /// Radius of the fixed circle
    #[arg(long)]
    r0: Option<f64>,
}

impl DimArgs {
    fn config(&self) -> Result<TheoremConfig, String> {
        let n = self.n.ok_or("--n is required with --theorem")?;
        Ok(TheoremConfig {
            n,
            k: self.k,
            m: self.m,
            q: self.q,
            r0: self.r0,
            pivot: None,
            anchor: None,
        })
    }
}

#[derive(Args)]
struct VerifyArgs {
    /// Identity to verify; omit to run the default suite
    #[arg(long)]
    theorem: Option<TheoremArg>,
    #[command(flatten)]
    dims: DimArgs,
    /// Monte Carlo samples per estimator
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    /// RNG seed (BP_SEED env var applies when the flag is absent)
    #[arg(long)]
    seed: Option<u64>,
    /// Test integrand: gaussian | constant | ball:RADIUS | volume-power:EXP,CUTOFF
    #[arg(long, default_value = "gaussian")]
    integrand: IntegrandArg,
    /// Pass threshold on |z|
    #[arg(long, default_value_t = 3.5)]
    threshold: f64,
    /// Write the JSON report here
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    /// Radial proposal envelope multiplier
    #[arg(long)]
    radial_scale: Option<f64>,
    /// Center proposal envelope scale
    #[arg(long)]
    center_scale: Option<f64>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    theorem: TheoremArg,
    #[command(flatten)]
    dims: DimArgs,
    /// Number of random parameter points
    #[arg(long, default_value_t = 100)]
    count: usize,
    /// Central-difference step
    #[arg(long, default_value_t = 1e-5)]
    step: f64,
    /// Maximum relative error
    #[arg(long, default_value_t = 1e-5)]
    tol: f64,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct RoundtripArgs {
    #[arg(long)]
    theorem: TheoremArg,
    #[command(flatten)]
    dims: DimArgs,
    /// Number of random tuples
    #[arg(long, default_value_t = 1000)]
    count: usize,
    /// Maximum componentwise deviation
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ConstantsArgs {
    #[arg(long)]
    n: usize,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    theorem: TheoremArg,
    #[command(flatten)]
    dims: DimArgs,
    /// Number of draws
    #[arg(long, default_value_t = 10)]
    samples: u64,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone)]
struct TheoremArg(TheoremId);

impl FromStr for TheoremArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TheoremId::from_str(s)
            .map(TheoremArg)
            .map_err(|_| format!("unknown theorem '{s}' (try e.g. circumscribed, pivoted-circle)"))
    }
}

#[derive(Clone)]
struct IntegrandArg(Integrand);

impl FromStr for IntegrandArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, params) = match s.split_once(':') {
            Some((a, b)) => (a, Some(b)),
            None => (s, None),
        };
        match (name, params) {
            ("gaussian", None) => Ok(IntegrandArg(Integrand::GaussianProduct)),
            ("constant", None) => Ok(IntegrandArg(Integrand::ConstantOnSphere)),
            ("ball", Some(r)) => {
                let radius: f64 = r.parse().map_err(|_| "ball:RADIUS needs a number")?;
                Ok(IntegrandArg(Integrand::BallIndicator { radius }))
            }
            ("ball", None) => Ok(IntegrandArg(Integrand::BallIndicator { radius: 1.0 })),
            ("volume-power", Some(rest)) => {
                let (e, c) = rest
                    .split_once(',')
                    .ok_or("volume-power:EXPONENT,CUTOFF needs two numbers")?;
                Ok(IntegrandArg(Integrand::VolumePower {
                    exponent: e.trim().parse().map_err(|_| "bad exponent")?,
                    cutoff: c.trim().parse().map_err(|_| "bad cutoff")?,
                }))
            }
            _ => Err(format!("unknown integrand '{s}'")),
        }
    }
}

/// Flag wins over the BP_SEED environment variable; default 42.
fn resolve_seed(flag: Option<u64>) -> u64 {
    flag.or_else(|| std::env::var("BP_SEED").ok().and_then(|v| v.parse().ok()))
        .unwrap_or(42)
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify(args) => cmd_verify(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Roundtrip(args) => cmd_roundtrip(args),
        Command::Constants(args) => cmd_constants(args),
        Command::Sample(args) => cmd_sample(args),
    }
}

fn cmd_verify(args: VerifyArgs) -> ExitCode {
    let seed = resolve_seed(args.seed);
    let cases: Vec<CaseSpec> = match &args.theorem {
        Some(theorem) => {
            let config = match args.dims.config() {
                Ok(c) => c,
                Err(e) => return usage_error(&e),
            };
            if let Err(e) = config.validate(theorem.0) {
                return usage_error(&e.to_string());
            }
            let integrand = match (theorem.0.spherical_domain(), &args.integrand.0) {
                // the constant integrand is not integrable over Euclidean
                // tuples, so reject the mismatch up front
                (false, Integrand::ConstantOnSphere) => {
                    return usage_error("the constant integrand needs an on-sphere theorem");
                }
                (_, f) => f.clone(),
            };
            vec![CaseSpec::new(theorem.0, config, integrand, args.samples)]
        }
        None => default_suite(args.samples),
    };

    let mut report = if args.radial_scale.is_some() || args.center_scale.is_some() {
        let mut proposal = ProposalSpec::default();
        if let Some(s) = args.radial_scale {
            proposal.radial = RadialLaw::HalfNormal { scale: s };
        }
        if let Some(s) = args.center_scale {
            proposal.center_scale = s;
        }
        if let Err(e) = proposal.validate() {
            return usage_error(&e.to_string());
        }
        let results: Vec<_> = cases
            .iter()
            .enumerate()
            .map(|(i, spec)| {
                bp_core::verify::run_case(
                    spec,
                    seed,
                    (i as u64) * 2 * SUBSTREAMS,
                    args.threshold,
                    Some(&proposal),
                )
            })
            .collect();
        let passed = results.iter().filter(|c| c.pass).count();
        let failed = results.len() - passed;
        SuiteReport {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: bp_core::verify::SuiteConfig { seed, threshold: args.threshold },
            cases: results,
            summary: bp_core::verify::SuiteSummary { passed, failed },
        }
    } else {
        run_suite(&cases, seed, args.threshold)
    };
    report.version = env!("CARGO_PKG_VERSION").to_string();

    for case in &report.cases {
        let verdict = if case.pass { "pass" } else { "FAIL" };
        match &case.reason {
            Some(reason) => println!(
                "[{verdict}] {} n={} k={} m={} q={} r0={}: {reason}",
                case.theorem,
                case.config.n,
                case.config.k(),
                case.config.m(),
                case.config.q(),
                case.config.r0(),
            ),
            None => println!(
                "[{verdict}] {} n={} k={} m={} q={} r0={}: lhs {:.6} rhs {:.6} +- {:.6} z {:+.2}",
                case.theorem,
                case.config.n,
                case.config.k(),
                case.config.m(),
                case.config.q(),
                case.config.r0(),
                case.lhs.mean,
                case.rhs.mean,
                case.rhs.stderr,
                case.z_score,
            ),
        }
    }
    println!("{} passed, {} failed", report.summary.passed, report.summary.failed);

    if let Some(path) = &args.out {
        let json = serde_json::to_string_pretty(&report).expect("report serializes");
        if let Err(e) = std::fs::File::create(path).and_then(|mut f| f.write_all(json.as_bytes()))
        {
            eprintln!("error: cannot write report to {}: {e}", path.display());
            return ExitCode::from(1);
        }
    }
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn cmd_oracle(args: OracleArgs) -> ExitCode {
    let seed = resolve_seed(args.seed);
    let config = match args.dims.config() {
        Ok(c) => c,
        Err(e) => return usage_error(&e),
    };
    if let Err(e) = config.validate(args.theorem.0) {
        return usage_error(&e.to_string());
    }
    let mut rng = RandomStream::new(seed, 0).rng();
    let mut worst: f64 = 0.0;
    for _ in 0..args.count {
        let param = match random_chartfree_param(args.theorem.0, &config, &mut rng) {
            Ok(p) => p,
            Err(e) => return usage_error(&e.to_string()),
        };
        let fd = match fd_jacobian_density(args.theorem.0, &param, args.step) {
            Ok(v) => v,
            Err(e) => return usage_error(&e.to_string()),
        };
        let closed = bp_core::density::theorem_density(args.theorem.0, &param, config.n)
            .expect("generated parameters match the theorem");
        worst = worst.max((fd - closed).abs() / closed);
    }
    let pass = worst <= args.tol;
    println!(
        "[{}] {} fd oracle: worst relative error {worst:.3e} over {} points (tol {:.1e})",
        if pass { "pass" } else { "FAIL" },
        args.theorem.0,
        args.count,
        args.tol
    );
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn cmd_roundtrip(args: RoundtripArgs) -> ExitCode {
    let seed = resolve_seed(args.seed);
    let config = match args.dims.config() {
        Ok(c) => c,
        Err(e) => return usage_error(&e),
    };
    let theorem = args.theorem.0;
    if let Err(e) = config.validate(theorem) {
        return usage_error(&e.to_string());
    }
    let tuple_size = config.tuple_size(theorem);
    let dim = config.point_dim(theorem);
    let mut rng = RandomStream::new(seed, 0).rng();
    let mut worst: f64 = 0.0;
    let mut done = 0;
    let mut rejected = 0usize;
    while done < args.count {
        let pts: Vec<Vector> = (0..tuple_size)
            .map(|_| {
                if theorem.spherical_domain() {
                    sample_unit_sphere(dim, &mut rng)
                } else {
                    gaussian_point(dim, 1.0, &mut rng)
                }
            })
            .collect();
        let tuple = PointTuple::new(pts).expect("finite draws");
        let back = match theorem {
            TheoremId::Circumscribed | TheoremId::TopDimensional => {
                decompose_circumscribed(&tuple).map(|p| p.reconstruct())
            }
            TheoremId::PivotedCircle | TheoremId::Pivoted1 | TheoremId::Pivoted2 => {
                let pivot = config.pivot_frame().expect("validated");
                decompose_pivoted_circle(&tuple, &pivot, config.r0()).map(|p| p.reconstruct())
            }
            TheoremId::Anchored => {
                let flat = config.anchor_flat().expect("validated");
                decompose_anchored(&tuple, &flat).map(|p| p.reconstruct())
            }
            TheoremId::OnSphere => decompose_on_sphere(&tuple).map(|p| p.reconstruct()),
            _ => {
                return usage_error(&format!("{theorem} has no decomposition to round trip"));
            }
        };
        match back {
            Ok(reconstructed) => {
                worst = worst.max(reconstructed.max_abs_diff(&tuple));
                done += 1;
            }
            Err(_) => {
                rejected += 1;
                if rejected > 100 * args.count {
                    return usage_error("too many degenerate tuples; check the configuration");
                }
            }
        }
    }
    let pass = worst <= args.tol;
    println!(
        "[{}] {} round trip: worst deviation {worst:.3e} over {} tuples (tol {:.1e})",
        if pass { "pass" } else { "FAIL" },
        theorem,
        args.count,
        args.tol
    );
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn cmd_constants(args: ConstantsArgs) -> ExitCode {
    if args.n == 0 {
        return usage_error("--n must be at least 1");
    }
    println!("sphere surface areas sigma_d = 2 pi^(d/2) / Gamma(d/2):");
    for d in 1..=args.n {
        println!("  sigma_{d} = {:.15}", bp_core::measures::sphere_surface_area(d).unwrap());
    }
    println!("Grassmannian measures |G(k,{})|:", args.n);
    for k in 0..=args.n {
        println!(
            "  |G({k},{})| = {:.15}",
            args.n,
            bp_core::measures::grassmannian_measure(k, args.n).unwrap()
        );
    }
    ExitCode::SUCCESS
}

fn cmd_sample(args: SampleArgs) -> ExitCode {
    let seed = resolve_seed(args.seed);
    let config = match args.dims.config() {
        Ok(c) => c,
        Err(e) => return usage_error(&e),
    };
    let theorem = args.theorem.0;
    let proposal = ProposalSpec::default_for(theorem, &config);
    let sampler = match ParamSampler::new(theorem, &config, &proposal) {
        Ok(s) => s,
        Err(e) => return usage_error(&e.to_string()),
    };
    let mut rng = RandomStream::new(seed, 0).rng();
    for i in 0..args.samples {
        let (param, weight) = sampler.draw(&mut rng);
        let density =
            bp_core::density::theorem_density(theorem, &param, config.n).expect("matched variant");
        let summary = match &param {
            SphereParam::Linear { .. } | SphereParam::Affine { .. } => serde_json::json!({}),
            SphereParam::Circumscribed(p) => serde_json::json!({
                "radius": p.radius, "center_norm": p.center.norm(),
            }),
            SphereParam::Pivoted(p) => serde_json::json!({
                "radius": p.radius, "center_distance": p.center_distance(),
            }),
            SphereParam::Anchored(p) => serde_json::json!({
                "radius": p.radius, "center_norm": p.center.norm(),
            }),
            SphereParam::OnSphere(p) => serde_json::json!({
                "radius": p.radius(), "hull_point_norm": p.center.norm(),
            }),
            SphereParam::SymmetricSlice { t, .. } => serde_json::json!({ "t": t }),
        };
        let mut line = serde_json::json!({
            "index": i,
            "theorem": theorem.name(),
            "weight": weight,
            "density": density,
        });
        line.as_object_mut()
            .unwrap()
            .extend(summary.as_object().unwrap().clone());
        println!("{line}");
    }
    ExitCode::SUCCESS
}
