//! Monte Carlo estimators for both sides of each identity.
//!
//! Work is partitioned over a fixed number of substreams (not threads), and
//! the per-substream moments are combined in stream order, so results are
//! bit-identical across runs and worker counts.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::integrand::{Domain, Integrand};
use crate::measures::sphere_surface_area;
use crate::sampling::{
    sample_unit_sphere, ParamSampler, ProposalSpec, RandomStream,
};
use crate::theorem::{TheoremConfig, TheoremId};
use crate::{Error, Result};

/// Number of substreams an estimate is split over. Each substream `c` uses
/// `stream_id + c`, so one estimate consumes a block of `SUBSTREAMS` ids.
pub const SUBSTREAMS: u64 = 64;

/// Importance-sampling estimate with its sampling configuration echoed.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EstimatorReport {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
    pub stream_id: u64,
    pub config: String,
    pub wall_time: f64,
}

#[derive(Clone, Copy)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn merge(self, other: Moments) -> Moments {
        if other.count == 0 {
            return self;
        }
        if self.count == 0 {
            return other;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.count as f64 / count as f64;
        let m2 = self.m2
            + other.m2
            + delta * delta * self.count as f64 * other.count as f64 / count as f64;
        Moments { count, mean, m2 }
    }
}

/// Mean and standard error of `eval` over `samples` draws, split across
/// `SUBSTREAMS` deterministic substreams of `stream`.
pub fn mc_estimate<F>(samples: u64, stream: RandomStream, eval: F) -> (f64, f64)
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    assert!(samples >= 2, "estimates need at least two samples");
    let chunks = SUBSTREAMS.min(samples);
    let counts: Vec<u64> = (0..chunks)
        .map(|c| samples / chunks + u64::from(c < samples % chunks))
        .collect();
    let parts: Vec<Moments> = counts
        .par_iter()
        .enumerate()
        .map(|(c, &count)| {
            let mut rng = stream.substream(c as u64).rng();
            let mut mom = Moments { count: 0, mean: 0.0, m2: 0.0 };
            for _ in 0..count {
                let x = eval(&mut rng);
                mom.count += 1;
                let delta = x - mom.mean;
                mom.mean += delta / mom.count as f64;
                mom.m2 += delta * (x - mom.mean);
            }
            mom
        })
        .collect();
    let total = parts
        .into_iter()
        .fold(Moments { count: 0, mean: 0.0, m2: 0.0 }, Moments::merge);
    let variance = total.m2 / (total.count.saturating_sub(1).max(1)) as f64;
    (total.mean, (variance / total.count as f64).sqrt())
}

/// Unbiased estimate of the tuple integral of `f` over `(R^n)^tuple_size`,
/// or over `(S^n)^tuple_size` for spherical domains (uniform sampling with
/// the exact total-measure weight).
pub fn estimate_lhs(
    f: &Integrand,
    tuple_size: usize,
    n: usize,
    domain: Domain,
    samples: u64,
    proposal: &ProposalSpec,
    stream: RandomStream,
) -> Result<EstimatorReport> {
    if samples < 2 {
        return Err(Error::invalid("estimates need at least two samples"));
    }
    f.validate_for(domain)?;
    proposal.validate()?;
    let start = std::time::Instant::now();
    let (mean, stderr) = match domain {
        Domain::Euclidean => {
            let scale = proposal.center_scale;
            let log_norm =
                -0.5 * (n * tuple_size) as f64 * (2.0 * std::f64::consts::PI * scale * scale).ln();
            mc_estimate(samples, stream, move |rng| {
                let mut log_weight = -log_norm;
                let mut pts = Vec::with_capacity(tuple_size);
                for _ in 0..tuple_size {
                    let p = crate::sampling::gaussian_point(n, scale, rng);
                    log_weight += 0.5 * p.norm_squared() / (scale * scale);
                    pts.push(p);
                }
                let tuple = crate::geometry::PointTuple::new(pts).expect("finite draws");
                f.eval(&tuple) * log_weight.exp()
            })
        }
        Domain::Sphere => {
            let weight = sphere_surface_area(n + 1)?.powi(tuple_size as i32);
            mc_estimate(samples, stream, move |rng| {
                let pts = (0..tuple_size).map(|_| sample_unit_sphere(n + 1, rng)).collect();
                let tuple = crate::geometry::PointTuple::new(pts).expect("finite draws");
                f.eval(&tuple) * weight
            })
        }
    };
    Ok(EstimatorReport {
        mean,
        stderr,
        samples,
        seed: stream.seed,
        stream_id: stream.stream_id,
        config: format!("lhs tuple_size={tuple_size} n={n} integrand={}", f.name()),
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// Unbiased estimate of the theorem's right-hand side: draws parameters
/// from the importance sampler, evaluates `f` at the reconstructed tuple,
/// and weighs by the closed-form density times the importance weight.
pub fn estimate_rhs(
    theorem: TheoremId,
    f: &Integrand,
    config: &TheoremConfig,
    samples: u64,
    proposal: &ProposalSpec,
    stream: RandomStream,
) -> Result<EstimatorReport> {
    if samples < 2 {
        return Err(Error::invalid("estimates need at least two samples"));
    }
    let domain = if theorem.spherical_domain() { Domain::Sphere } else { Domain::Euclidean };
    f.validate_for(domain)?;
    let sampler = ParamSampler::new(theorem, config, proposal)?;
    let n = config.n;
    let start = std::time::Instant::now();
    let (mean, stderr) = mc_estimate(samples, stream, move |rng| {
        let (param, weight) = sampler.draw(rng);
        let density = crate::density::theorem_density(theorem, &param, n)
            .expect("sampled parameters match their theorem");
        if density == 0.0 {
            return 0.0;
        }
        let tuple = param.reconstruct(sampler.config()).expect("sampled parameters reconstruct");
        let value = f.eval(&tuple);
        // ordered so a vanishing integrand can never meet an overflowing
        // weight as inf * 0
        if value == 0.0 {
            return 0.0;
        }
        weight * density * value
    });
    Ok(EstimatorReport {
        mean,
        stderr,
        samples,
        seed: stream.seed,
        stream_id: stream.stream_id,
        config: format!(
            "rhs theorem={theorem} n={n} k={} m={} q={} r0={} integrand={}",
            config.k(),
            config.m(),
            config.q(),
            config.r0(),
            f.name()
        ),
        wall_time: start.elapsed().as_secs_f64(),
    })
}
