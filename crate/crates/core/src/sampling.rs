//! Uniform samplers for spheres and Grassmannian frames, and importance
//! samplers for each theorem's full parameter space.
//!
//! Every total-mass constant (sphere areas, Grassmannian volumes, ball
//! volumes) and every proposal density is folded into the returned
//! importance weight, so `E[weight * g(param)]` equals the right-hand-side
//! integral of `g` for any integrable `g`.
//!
//! The sphere parametrizations concentrate unbounded mass on a collapse
//! stratum: direction tuples that cluster while the radius grows, keeping
//! the reconstructed points bounded. Independent per-factor proposals have
//! infinite variance there, so the samplers use a matched scheme instead:
//!
//! * direction tuples come from an even mixture of the uniform law and a
//!   multi-scale cluster (tangent coordinates through a stereographic
//!   chart, squared cluster size Gamma(1/2)-distributed, exact closed-form
//!   density);
//! * the radius is drawn from a generalized-Gamma law matching the
//!   theorem's radial power and the Gaussian envelope
//!   `exp(-spread * r^2 / (2 scale^2))` of the drawn directions;
//! * free centers are drawn from a Gaussian centered at minus radius times
//!   the direction mean, where the envelope mass sits.
//!
//! Weights stay exact for any integrand; the matching only controls
//! variance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::geometry::{
    tangent_basis, AffineFlat, AnchoredParam, CircumscribedParam, Frame, PivotedCircleParam,
    PointTuple, SphereOnSphereParam, Vector,
};
use crate::measures::{ball_volume, grassmannian_measure, sphere_surface_area};
use crate::theorem::{SphereParam, TheoremConfig, TheoremId};
use crate::{Error, Result};

/// Reproducible substream of a counter-based generator: identical
/// `(seed, stream_id)` reproduce identical draw sequences on any thread.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RandomStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RandomStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        RandomStream { seed, stream_id }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }

    pub fn substream(&self, offset: u64) -> RandomStream {
        RandomStream { seed: self.seed, stream_id: self.stream_id.wrapping_add(offset) }
    }
}

/// Proposal law for a non-negative radial coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "kebab-case")]
pub enum RadialLaw {
    HalfNormal { scale: f64 },
    Gamma { shape: f64, scale: f64 },
    Uniform { max: f64 },
}

impl RadialLaw {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            RadialLaw::HalfNormal { scale } => *scale > 0.0,
            RadialLaw::Gamma { shape, scale } => *shape > 0.0 && *scale > 0.0,
            RadialLaw::Uniform { max } => *max > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid("radial proposal parameters must be strictly positive"))
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            RadialLaw::HalfNormal { scale } => {
                let g: f64 = StandardNormal.sample(rng);
                g.abs() * scale
            }
            RadialLaw::Gamma { shape, scale } => rand_distr::Gamma::new(*shape, *scale)
                .expect("validated parameters")
                .sample(rng),
            RadialLaw::Uniform { max } => rng.random::<f64>() * max,
        }
    }

    pub fn density(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        match self {
            RadialLaw::HalfNormal { scale } => {
                (2.0 / std::f64::consts::PI).sqrt() / scale
                    * (-x * x / (2.0 * scale * scale)).exp()
            }
            RadialLaw::Gamma { shape, scale } => {
                let log =
                    (shape - 1.0) * x.ln() - x / scale - ln_gamma(*shape) - shape * scale.ln();
                log.exp()
            }
            RadialLaw::Uniform { max } => {
                if x <= *max {
                    1.0 / max
                } else {
                    0.0
                }
            }
        }
    }

    /// The law's scale parameter, applied as a multiplier on the matched
    /// radial envelope of [`ParamSampler`].
    pub fn scale_multiplier(&self) -> f64 {
        match self {
            RadialLaw::HalfNormal { scale } | RadialLaw::Gamma { scale, .. } => *scale,
            RadialLaw::Uniform { max } => *max,
        }
    }
}

/// Tuning knobs of the parameter-space samplers: the radial envelope
/// multiplier and the Gaussian envelope scale for unbounded centers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProposalSpec {
    pub radial: RadialLaw,
    pub center_scale: f64,
}

impl Default for ProposalSpec {
    fn default() -> Self {
        ProposalSpec { radial: RadialLaw::HalfNormal { scale: 1.0 }, center_scale: 1.0 }
    }
}

impl ProposalSpec {
    pub fn validate(&self) -> Result<()> {
        self.radial.validate()?;
        if self.center_scale <= 0.0 {
            return Err(Error::invalid("center proposal scale must be strictly positive"));
        }
        Ok(())
    }

    /// Default proposal for a theorem instance. Scale 1 matches the
    /// standard-normal test integrands.
    pub fn default_for(_theorem: TheoremId, _config: &TheoremConfig) -> Self {
        ProposalSpec::default()
    }
}

/// Isotropic normal draw in `R^dim` with the given scale per coordinate.
pub fn gaussian_point<R: Rng + ?Sized>(dim: usize, scale: f64, rng: &mut R) -> Vector {
    Vector::from_fn(dim, |_, _| {
        let g: f64 = StandardNormal.sample(rng);
        g * scale
    })
}

/// Log-density of the isotropic normal with the given scale at squared
/// radius `norm2`, in `dim` dimensions.
fn log_gaussian(norm2: f64, dim: usize, scale: f64) -> f64 {
    -0.5 * norm2 / (scale * scale)
        - 0.5 * dim as f64 * (2.0 * std::f64::consts::PI * scale * scale).ln()
}

fn log_gamma_pdf(x: f64, shape: f64, scale: f64) -> f64 {
    if x <= 0.0 {
        return f64::NEG_INFINITY;
    }
    (shape - 1.0) * x.ln() - x / scale - ln_gamma(shape) - shape * scale.ln()
}

/// Uniform point of the unit sphere `S^{dim-1}`, by normalizing an
/// isotropic Gaussian draw; `dim = 1` returns +-1 with equal probability.
pub fn sample_unit_sphere<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vector {
    assert!(dim >= 1, "spheres need dim >= 1");
    if dim == 1 {
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        return Vector::from_row_slice(&[sign]);
    }
    loop {
        let g = gaussian_point(dim, 1.0, rng);
        let norm = g.norm();
        if norm > 1e-12 {
            return g / norm;
        }
    }
}

/// Uniform point of the closed unit ball in `R^dim`.
pub fn sample_in_unit_ball<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vector {
    let dir = sample_unit_sphere(dim, rng);
    let u: f64 = rng.random();
    dir * u.powf(1.0 / dim as f64)
}

/// Frame whose span follows the rotation-invariant distribution on the
/// Grassmannian of `k`-subspaces of `R^n` (mass 1; the measure constant is
/// applied by the importance weights).
pub fn sample_frame<R: Rng + ?Sized>(k: usize, n: usize, rng: &mut R) -> Frame {
    assert!(k >= 1 && k <= n, "frames need 1 <= k <= n");
    loop {
        let vs: Vec<Vector> = (0..k).map(|_| gaussian_point(n, 1.0, rng)).collect();
        if let Ok(frame) = Frame::from_spanning(&vs, 1e-8) {
            return frame;
        }
    }
}

/// Invariant-distributed `k`-frame inside the span of `sub`.
pub fn sample_frame_in<R: Rng + ?Sized>(sub: &Frame, k: usize, rng: &mut R) -> Frame {
    assert!(k >= 1 && k <= sub.dim());
    loop {
        let vs: Vec<Vector> = (0..k)
            .map(|_| sub.embed(&gaussian_point(sub.dim(), 1.0, rng)))
            .collect();
        if let Ok(frame) = Frame::from_spanning(&vs, 1e-8) {
            return frame;
        }
    }
}

fn sphere_in_frame<R: Rng + ?Sized>(frame: &Frame, rng: &mut R) -> Vector {
    frame.embed(&sample_unit_sphere(frame.dim(), rng))
}

/// Squared scale of the cluster component's tangent spread.
const CLUSTER_BASE_SCALE: f64 = 1.0;
/// Gamma shape of the squared cluster size: the `G^{-1/2}` left tail covers
/// every collapse scale with polynomial density.
const CLUSTER_SHAPE: f64 = 0.5;
/// Floor for the direction spread entering the radial envelope. Keeps the
/// radial scale within floating-point range; strata below the floor carry
/// a target mass around 1e-6 of the total, far below the Monte Carlo
/// resolution.
const SPREAD_FLOOR: f64 = 1e-12;

/// Mixture proposal for a tuple of points on the unit sphere of a carrier
/// subspace: half uniform, half clustered around a center through a
/// stereographic chart. The cluster's squared tangent size is
/// Gamma(1/2)-distributed, giving an unbounded (but exactly known) density
/// at the collapse stratum.
struct SphereTupleProposal {
    carrier: Frame,
    count: usize,
}

impl SphereTupleProposal {
    fn new(carrier: Frame, count: usize) -> Self {
        SphereTupleProposal { carrier, count }
    }

    fn sphere_dim(&self) -> usize {
        self.carrier.dim()
    }

    /// Number of points the cluster component applies to. With an
    /// internal center the first point doubles as the cluster center.
    fn clustered_count(&self, external_center: bool) -> usize {
        if external_center {
            self.count
        } else {
            self.count - 1
        }
    }

    fn has_cluster(&self, external_center: bool) -> bool {
        self.sphere_dim() >= 2 && self.clustered_count(external_center) >= 1
    }

    fn draw<R: Rng + ?Sized>(&self, center: Option<&Vector>, rng: &mut R) -> Vec<Vector> {
        let d = self.sphere_dim();
        let external = center.is_some();
        let mut points = Vec::with_capacity(self.count);
        let clustered = if !self.has_cluster(external) {
            false
        } else {
            rng.random::<bool>()
        };
        let anchor = match center {
            Some(c) => c.clone(),
            None => {
                let first = sphere_in_frame(&self.carrier, rng);
                points.push(first.clone());
                first
            }
        };
        let rest = self.clustered_count(external);
        if !clustered {
            for _ in 0..rest {
                points.push(sphere_in_frame(&self.carrier, rng));
            }
            return points;
        }
        // Cluster draw: squared size, a uniform direction on the joint
        // tangent sphere, then the stereographic chart around the anchor.
        let e = rest * (d - 1);
        let size: f64 = rand_distr::Gamma::new(CLUSTER_SHAPE, 2.0 * CLUSTER_BASE_SCALE)
            .expect("fixed parameters")
            .sample(rng);
        let dir = sample_unit_sphere(e, rng);
        let tangents = tangent_basis(&anchor, &self.carrier);
        for i in 0..rest {
            let mut g = Vector::zeros(d - 1);
            for j in 0..(d - 1) {
                g[j] = size.sqrt() * dir[i * (d - 1) + j];
            }
            let c2 = g.norm_squared();
            let mut u = &anchor * (4.0 - c2);
            for (t, &gj) in tangents.iter().zip(g.iter()) {
                u.axpy(4.0 * gj, t, 1.0);
            }
            points.push(u.normalize());
        }
        points
    }

    /// Log-density of a drawn tuple with respect to the product of
    /// spherical measures on the carrier sphere.
    fn log_density(&self, center: Option<&Vector>, points: &[Vector]) -> f64 {
        let d = self.sphere_dim();
        let sigma = sphere_surface_area(d).expect("d >= 1");
        let external = center.is_some();
        let mut log = 0.0;
        let anchor = match center {
            Some(c) => c.clone(),
            None => {
                log -= sigma.ln();
                points[0].clone()
            }
        };
        let rest: &[Vector] = if external { points } else { &points[1..] };
        if !self.has_cluster(external) {
            return log - rest.len() as f64 * sigma.ln();
        }
        let log_uniform = -(rest.len() as f64) * sigma.ln();
        let log_cluster = self.log_cluster_density(&anchor, rest);
        if log_cluster == f64::INFINITY {
            return f64::INFINITY;
        }
        // log(0.5 e^a + 0.5 e^b), stably.
        let hi = log_uniform.max(log_cluster);
        log + 0.5_f64.ln() + hi + ((log_uniform - hi).exp() + (log_cluster - hi).exp()).ln()
    }

    fn log_cluster_density(&self, anchor: &Vector, rest: &[Vector]) -> f64 {
        let d = self.sphere_dim();
        let e = rest.len() * (d - 1);
        let mut total_g2 = 0.0;
        let mut log_jacobian = 0.0;
        for u in rest {
            let t = u.dot(anchor);
            if t <= -1.0 + 1e-12 {
                return f64::NEG_INFINITY;
            }
            // Stereographic coordinates: |g|^2 = 4 (1 - t) / (1 + t).
            let c2 = 4.0 * (1.0 - t) / (1.0 + t);
            total_g2 += c2;
            log_jacobian += (d as f64 - 1.0) * ((4.0 + c2) / 4.0).ln();
        }
        if total_g2 <= 0.0 {
            // All points exactly at the anchor: the density's integrable
            // singularity; report an effectively infinite density.
            return f64::INFINITY;
        }
        // Joint tangent density: radial Gamma(1/2) in |g|^2 times the
        // uniform direction on S^{e-1}.
        let log_radial = log_gamma_pdf(total_g2, CLUSTER_SHAPE, 2.0 * CLUSTER_BASE_SCALE);
        let log_sphere_e = sphere_surface_area(e).expect("e >= 1").ln();
        let log_plane = std::f64::consts::LN_2 + log_radial
            + 0.5 * (2.0 - e as f64) * total_g2.ln()
            - log_sphere_e;
        log_plane + log_jacobian
    }
}

/// Generalized-Gamma radial proposal on `r >= r0`: `y = r^2 - r0^2` follows
/// an equal-weight mixture of Gamma components with a common scale, so both
/// the near-`r0` power and the tail power of the target are covered.
struct RadialConditional {
    r0: f64,
    shapes: Vec<f64>,
    scale: f64,
}

impl RadialConditional {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let idx = (rng.random::<f64>() * self.shapes.len() as f64) as usize;
        let shape = self.shapes[idx.min(self.shapes.len() - 1)];
        let y = rand_distr::Gamma::new(shape, self.scale)
            .expect("positive parameters")
            .sample(rng);
        (self.r0 * self.r0 + y).sqrt()
    }

    fn log_density(&self, r: f64) -> f64 {
        let y = r * r - self.r0 * self.r0;
        if y <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let mut acc = 0.0;
        for shape in &self.shapes {
            acc += (log_gamma_pdf(y, *shape, self.scale)).exp();
        }
        (acc / self.shapes.len() as f64).ln() + (2.0 * r).ln()
    }
}

/// Prepared sampler of one theorem's parameter space: fixed frames and
/// measure constants are resolved once, then [`ParamSampler::draw`] yields
/// `(parameter, importance weight)` pairs.
pub struct ParamSampler {
    theorem: TheoremId,
    config: TheoremConfig,
    /// Gaussian envelope scale for centers and radii.
    scale: f64,
    /// Extra multiplier on the radial envelope.
    radial_multiplier: f64,
    log_mass: f64,
    pivot: Option<Frame>,
    pivot_complement: Option<Frame>,
    anchor: Option<AffineFlat>,
    anchor_perp: Option<Frame>,
}

impl ParamSampler {
    pub fn new(
        theorem: TheoremId,
        config: &TheoremConfig,
        proposal: &ProposalSpec,
    ) -> Result<Self> {
        config.validate(theorem)?;
        proposal.validate()?;
        let n = config.n;
        let (k, m, q) = (config.k(), config.m(), config.q());
        let mut pivot = None;
        let mut pivot_complement = None;
        let mut anchor = None;
        let mut anchor_perp = None;
        // Masses of the factors that are sampled from normalized measures:
        // Grassmannians always, plus every compact factor the matched
        // schemes below do not cover by an explicit density.
        let log_mass = match theorem {
            TheoremId::LinearBp | TheoremId::AffineBp => grassmannian_measure(k, n)?.ln(),
            TheoremId::Circumscribed => grassmannian_measure(k, n)?.ln(),
            TheoremId::TopDimensional => 0.0,
            TheoremId::Pivoted1 => sphere_surface_area(n)?.ln(),
            TheoremId::Pivoted2 => {
                grassmannian_measure(m, n)?.ln() + sphere_surface_area(m)?.ln()
            }
            TheoremId::PivotedCircle => {
                let frame = config.pivot_frame()?;
                pivot_complement = Some(frame.orthocomplement());
                pivot = Some(frame);
                grassmannian_measure(m, n - q)?.ln() + sphere_surface_area(m)?.ln()
            }
            TheoremId::Anchored => {
                let flat = config.anchor_flat()?;
                anchor_perp = Some(flat.direction().orthocomplement());
                anchor = Some(flat);
                grassmannian_measure(k, m)?.ln()
            }
            TheoremId::OnSphere => {
                (grassmannian_measure(k, n + 1)? * ball_volume(n + 1 - k)?).ln()
                    + (k as f64 + 1.0) * sphere_surface_area(k)?.ln()
            }
            TheoremId::OnSphereSymmetric => {
                crate::density::symmetric_prefactor(k, n)?.ln()
                    + (k as f64 + 1.0) * sphere_surface_area(k)?.ln()
            }
        };
        Ok(ParamSampler {
            theorem,
            config: config.clone(),
            scale: proposal.center_scale,
            radial_multiplier: proposal.radial.scale_multiplier(),
            log_mass,
            pivot,
            pivot_complement,
            anchor,
            anchor_perp,
        })
    }

    pub fn theorem(&self) -> TheoremId {
        self.theorem
    }

    pub fn config(&self) -> &TheoremConfig {
        &self.config
    }

    /// One draw of the parameter space together with its importance weight.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (SphereParam, f64) {
        let n = self.config.n;
        let (k, m) = (self.config.k(), self.config.m());
        let scale = self.scale;
        let mut log_weight = self.log_mass;
        match self.theorem {
            TheoremId::LinearBp => {
                let carrier = sample_frame(k, n, rng);
                let mut pts = Vec::with_capacity(k);
                for _ in 0..k {
                    let local = gaussian_point(k, scale, rng);
                    log_weight -= log_gaussian(local.norm_squared(), k, scale);
                    pts.push(carrier.embed(&local));
                }
                let points = PointTuple::new(pts).expect("sampled points are valid");
                (SphereParam::Linear { carrier, points }, log_weight.exp())
            }
            TheoremId::AffineBp => {
                let carrier = sample_frame(k, n, rng);
                let complement = carrier.orthocomplement();
                let h_local = gaussian_point(n - k, scale, rng);
                log_weight -= log_gaussian(h_local.norm_squared(), n - k, scale);
                let offset = complement.embed(&h_local);
                let mut pts = Vec::with_capacity(k + 1);
                for _ in 0..=k {
                    let local = gaussian_point(k, scale, rng);
                    log_weight -= log_gaussian(local.norm_squared(), k, scale);
                    pts.push(carrier.embed(&local));
                }
                let points = PointTuple::new(pts).expect("sampled points are valid");
                (SphereParam::Affine { carrier, offset, points }, log_weight.exp())
            }
            TheoremId::Circumscribed | TheoremId::TopDimensional => {
                let kk = if self.theorem == TheoremId::TopDimensional { n } else { k };
                let tuple = kk + 1;
                let carrier = if kk == n {
                    Frame::identity(n)
                } else {
                    sample_frame(kk, n, rng)
                };
                let proposal = SphereTupleProposal::new(carrier.clone(), tuple);
                let directions = proposal.draw(None, rng);
                log_weight -= proposal.log_density(None, &directions);

                let mut mean = Vector::zeros(n);
                for u in &directions {
                    mean += u;
                }
                mean /= tuple as f64;
                let spread = (1.0 - mean.norm_squared()).max(SPREAD_FLOOR);
                let lambda = scale * self.radial_multiplier;
                let radial = RadialConditional {
                    r0: 0.0,
                    shapes: vec![(n * kk) as f64 / 2.0],
                    scale: 2.0 * lambda * lambda / (tuple as f64 * spread),
                };
                let radius = radial.sample(rng);
                log_weight -= radial.log_density(radius);

                let center = gaussian_point(n, scale / (tuple as f64).sqrt(), rng)
                    - &mean * radius;
                let resid = (&center + &mean * radius).norm_squared();
                log_weight -= log_gaussian(resid, n, scale / (tuple as f64).sqrt());

                let param = CircumscribedParam::new(center, carrier, radius, directions)
                    .expect("sampled parameters are valid");
                (SphereParam::Circumscribed(param), log_weight.exp())
            }
            TheoremId::Pivoted1 | TheoremId::Pivoted2 | TheoremId::PivotedCircle => {
                let mm = if self.theorem == TheoremId::Pivoted1 { n } else { m };
                let (pivot_frame, carrier, r0) = match self.theorem {
                    TheoremId::PivotedCircle => {
                        let pf = self.pivot.as_ref().expect("resolved").clone();
                        let complement = self.pivot_complement.as_ref().expect("resolved");
                        let carrier = if mm == complement.dim() {
                            complement.clone()
                        } else {
                            sample_frame_in(complement, mm, rng)
                        };
                        (pf, carrier, self.config.r0())
                    }
                    _ => {
                        let carrier = if mm == n {
                            Frame::identity(n)
                        } else {
                            sample_frame(mm, n, rng)
                        };
                        (Frame::empty(n), carrier, 0.0)
                    }
                };
                // uniform center direction; its sphere mass sits in log_mass
                let center_dir = sphere_in_frame(&carrier, rng);
                let joint = carrier.concat(&pivot_frame).expect("carrier orthogonal to pivot");
                let proposal = SphereTupleProposal::new(joint, mm);
                let cluster_center = -&center_dir;
                let directions = proposal.draw(Some(&cluster_center), rng);
                log_weight -= proposal.log_density(Some(&cluster_center), &directions);

                let mut mean = Vector::zeros(n);
                for u in &directions {
                    mean += u;
                }
                mean /= mm as f64;
                let closeness = (1.0 + center_dir.dot(&mean)).max(SPREAD_FLOOR);
                let lambda = scale * self.radial_multiplier;
                let radial = RadialConditional {
                    r0,
                    shapes: vec![mm as f64 / 2.0, (mm * n) as f64 / 2.0],
                    scale: lambda * lambda / (mm as f64 * closeness),
                };
                let radius = radial.sample(rng);
                log_weight -= radial.log_density(radius);

                let param = PivotedCircleParam::new(
                    pivot_frame,
                    r0,
                    carrier,
                    radius,
                    center_dir,
                    directions,
                )
                .expect("sampled parameters are valid");
                (SphereParam::Pivoted(param), log_weight.exp())
            }
            TheoremId::Anchored => {
                let flat = self.anchor.as_ref().expect("resolved at construction");
                let perp = self.anchor_perp.as_ref().expect("resolved");
                let tuple = k + 1;
                let carrier = if k == 0 {
                    Frame::empty(n)
                } else if k == m {
                    flat.direction().clone()
                } else {
                    sample_frame_in(flat.direction(), k, rng)
                };
                let joint = carrier.concat(perp).expect("carrier inside the flat direction");
                let proposal = SphereTupleProposal::new(joint, tuple);
                let directions = proposal.draw(None, rng);
                log_weight -= proposal.log_density(None, &directions);

                let mut mean = Vector::zeros(n);
                for u in &directions {
                    mean += u;
                }
                mean /= tuple as f64;
                let mean_in_flat = flat.direction().coords(&mean);
                let spread = (1.0 - mean_in_flat.norm_squared()).max(SPREAD_FLOOR);
                let lambda = scale * self.radial_multiplier;
                let alpha = (n * (k + 1)) as f64 - (m as f64 + 1.0);
                let radial = RadialConditional {
                    r0: 0.0,
                    shapes: vec![(alpha + 1.0) / 2.0],
                    scale: 2.0 * lambda * lambda / (tuple as f64 * spread),
                };
                let radius = radial.sample(rng);
                log_weight -= radial.log_density(radius);

                let local = gaussian_point(m, scale / (tuple as f64).sqrt(), rng)
                    - &mean_in_flat * radius;
                let resid = (&local + &mean_in_flat * radius).norm_squared();
                log_weight -= log_gaussian(resid, m, scale / (tuple as f64).sqrt());
                let center = flat.offset() + flat.direction().embed(&local);

                let param = AnchoredParam::new(flat.clone(), center, radius, carrier, directions)
                    .expect("sampled parameters are valid");
                (SphereParam::Anchored(param), log_weight.exp())
            }
            TheoremId::OnSphere => {
                let carrier = sample_frame(k, n + 1, rng);
                let complement = carrier.orthocomplement();
                let center = complement.embed(&sample_in_unit_ball(n + 1 - k, rng));
                let directions = (0..=k).map(|_| sphere_in_frame(&carrier, rng)).collect();
                let param = SphereOnSphereParam::new(carrier, center, directions)
                    .expect("sampled parameters are valid");
                (SphereParam::OnSphere(param), log_weight.exp())
            }
            TheoremId::OnSphereSymmetric => {
                let t: f64 = rng.random();
                let pts: Vec<Vector> = (0..=k).map(|_| sample_unit_sphere(k, rng)).collect();
                let directions = PointTuple::new(pts).expect("sampled points are valid");
                (SphereParam::SymmetricSlice { t, directions }, log_weight.exp())
            }
        }
    }
}

/// Draws one point of the theorem's parameter space, together with an
/// importance weight such that `E[weight * g(param)]` equals the theorem's
/// right-hand-side integral of `g`.
pub fn sample_param<R: Rng + ?Sized>(
    theorem: TheoremId,
    config: &TheoremConfig,
    proposal: &ProposalSpec,
    rng: &mut R,
) -> Result<(SphereParam, f64)> {
    Ok(ParamSampler::new(theorem, config, proposal)?.draw(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn unit_sphere_norms_and_determinism() {
        let stream = RandomStream::new(13, 5);
        let mut a = stream.rng();
        let mut b = stream.rng();
        for _ in 0..200 {
            let v = sample_unit_sphere(4, &mut a);
            assert_relative_eq!(v.norm(), 1.0, epsilon = 1e-12);
            assert_eq!(v, sample_unit_sphere(4, &mut b));
        }
        // different stream, different sequence
        let mut c = stream.substream(1).rng();
        assert_ne!(sample_unit_sphere(4, &mut c), sample_unit_sphere(4, &mut stream.rng()));
    }

    #[test]
    fn sphere_dim_one_is_fair_coin() {
        let mut rng = RandomStream::new(42, 0).rng();
        let n = 1_000_000;
        let mut plus = 0u64;
        for _ in 0..n {
            if sample_unit_sphere(1, &mut rng)[0] > 0.0 {
                plus += 1;
            }
        }
        let freq = plus as f64 / n as f64;
        assert!((0.497..=0.503).contains(&freq), "frequency of +1 was {freq}");
    }

    #[test]
    fn sphere_coordinate_means_vanish() {
        // CLT bound: each coordinate mean within 4 / sqrt(N * dim) of zero.
        let mut rng = RandomStream::new(7, 0).rng();
        let (n, dim) = (1_000_000usize, 3usize);
        let mut sums = vec![0.0; dim];
        for _ in 0..n {
            let v = sample_unit_sphere(dim, &mut rng);
            for (s, x) in sums.iter_mut().zip(v.iter()) {
                *s += x;
            }
        }
        let bound = 4.0 / ((n * dim) as f64).sqrt();
        for s in sums {
            assert!((s / n as f64).abs() < bound, "coordinate mean {} too large", s);
        }
    }

    #[test]
    fn frames_are_orthonormal() {
        let mut rng = RandomStream::new(3, 0).rng();
        for _ in 0..100 {
            let f = sample_frame(2, 5, &mut rng);
            for (i, a) in f.basis().iter().enumerate() {
                for (j, b) in f.basis().iter().enumerate() {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((a.dot(b) - expect).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn full_frame_spans_everything() {
        let mut rng = RandomStream::new(3, 1).rng();
        let f = sample_frame(3, 3, &mut rng);
        assert!(f.same_span(&Frame::identity(3), 1e-10));
    }

    #[test]
    fn radial_laws_normalize() {
        // Quadrature check of each density after the substitution x = y^2,
        // which regularizes the Gamma(1/2) endpoint singularity.
        for law in [
            RadialLaw::HalfNormal { scale: 0.8 },
            RadialLaw::Gamma { shape: 0.5, scale: 1.2 },
            RadialLaw::Uniform { max: 2.5 },
        ] {
            let (mut acc, h) = (0.0, 1e-4);
            let mut y = h / 2.0;
            while y < 9.0 {
                acc += law.density(y * y) * 2.0 * y * h;
                y += h;
            }
            assert_relative_eq!(acc, 1.0, epsilon = 2e-3);
        }
    }

    #[test]
    fn importance_weight_toy_integral() {
        // E[e^{-r} / rho(r)] = 1 with a half-normal proposal
        let law = RadialLaw::HalfNormal { scale: 1.0 };
        let mut rng = RandomStream::new(11, 0).rng();
        let n = 100_000;
        let (mut sum, mut sum2) = (0.0, 0.0);
        for _ in 0..n {
            let r = law.sample(&mut rng);
            let v = (-r).exp() / law.density(r);
            sum += v;
            sum2 += v * v;
        }
        let mean = sum / n as f64;
        let var = (sum2 / n as f64 - mean * mean) / (n as f64 - 1.0);
        let stderr = var.sqrt();
        assert!(
            (mean - 1.0).abs() < 3.0 * stderr,
            "mean {mean} not within 3 stderr ({stderr}) of 1"
        );
    }

    #[test]
    fn cluster_density_normalizes_on_circle() {
        // One clustered point on S^1: integrate the cluster density over
        // the angle from the anchor.
        let carrier = Frame::identity(2);
        let proposal = SphereTupleProposal::new(carrier, 1);
        let anchor = Vector::from_row_slice(&[1.0, 0.0]);
        let (mut acc, h) = (0.0, 1e-5);
        let mut phi = h / 2.0;
        while phi < std::f64::consts::PI {
            let u = Vector::from_row_slice(&[phi.cos(), phi.sin()]);
            acc += 2.0 * proposal.log_cluster_density(&anchor, &[u]).exp() * h;
            phi += h;
        }
        assert_relative_eq!(acc, 1.0, epsilon = 1e-4);
    }

    #[test]
    fn cluster_density_normalizes_on_sphere() {
        // One clustered point on S^2: the density depends only on the polar
        // angle, so integrate with the sin(phi) surface element.
        let carrier = Frame::identity(3);
        let proposal = SphereTupleProposal::new(carrier, 1);
        let anchor = Vector::from_row_slice(&[0.0, 0.0, 1.0]);
        let (mut acc, h) = (0.0, 1e-5);
        let mut phi = h / 2.0;
        while phi < std::f64::consts::PI {
            let u = Vector::from_row_slice(&[phi.sin(), 0.0, phi.cos()]);
            let density = proposal.log_cluster_density(&anchor, &[u]).exp();
            acc += density * 2.0 * std::f64::consts::PI * phi.sin() * h;
            phi += h;
        }
        assert_relative_eq!(acc, 1.0, epsilon = 1e-4);
    }

    #[test]
    fn cluster_pair_density_normalizes() {
        // Two clustered points on S^1: two-dimensional quadrature over both
        // angles checks the joint tangent construction.
        let carrier = Frame::identity(2);
        let proposal = SphereTupleProposal::new(carrier, 2);
        let anchor = Vector::from_row_slice(&[1.0, 0.0]);
        let (mut acc, h) = (0.0, 2e-3);
        let steps = (2.0 * std::f64::consts::PI / h) as usize;
        for i in 0..steps {
            let a = -std::f64::consts::PI + (i as f64 + 0.5) * h;
            for j in 0..steps {
                let b = -std::f64::consts::PI + (j as f64 + 0.5) * h;
                let ua = Vector::from_row_slice(&[a.cos(), a.sin()]);
                let ub = Vector::from_row_slice(&[b.cos(), b.sin()]);
                acc += proposal.log_cluster_density(&anchor, &[ua, ub]).exp() * h * h;
            }
        }
        assert_relative_eq!(acc, 1.0, epsilon = 1e-2);
    }

    #[test]
    fn cluster_draws_match_density_support() {
        // Every drawn tuple must have finite positive mixture density.
        let carrier = Frame::identity(4);
        let proposal = SphereTupleProposal::new(carrier, 4);
        let mut rng = RandomStream::new(17, 0).rng();
        for _ in 0..500 {
            let pts = proposal.draw(None, &mut rng);
            assert_eq!(pts.len(), 4);
            for p in &pts {
                assert_relative_eq!(p.norm(), 1.0, epsilon = 1e-12);
            }
            let log = proposal.log_density(None, &pts);
            assert!(log.is_finite(), "log density {log}");
        }
    }

    #[test]
    fn radial_conditional_normalizes() {
        let radial =
            RadialConditional { r0: 0.7, shapes: vec![1.0, 3.0], scale: 0.9 };
        let (mut acc, h) = (0.0, 1e-4);
        let mut r = 0.7 + h / 2.0;
        while r < 40.0 {
            acc += radial.log_density(r).exp() * h;
            r += h;
        }
        assert_relative_eq!(acc, 1.0, epsilon = 2e-3);
    }

    #[test]
    fn sampled_params_are_valid_and_weighted() {
        let config = TheoremConfig::new(3).with_k(2);
        let proposal = ProposalSpec::default();
        let mut rng = RandomStream::new(5, 0).rng();
        for _ in 0..50 {
            let (param, w) =
                sample_param(TheoremId::Circumscribed, &config, &proposal, &mut rng).unwrap();
            assert!(w.is_finite() && w > 0.0);
            match param {
                SphereParam::Circumscribed(p) => {
                    assert_eq!(p.directions.len(), 3);
                }
                _ => panic!("wrong variant"),
            }
        }
    }

    #[test]
    fn on_sphere_centers_stay_in_ball() {
        let config = TheoremConfig::new(2).with_k(1);
        let proposal = ProposalSpec::default();
        let mut rng = RandomStream::new(9, 0).rng();
        for _ in 0..100 {
            let (param, w) =
                sample_param(TheoremId::OnSphere, &config, &proposal, &mut rng).unwrap();
            assert!(w > 0.0);
            if let SphereParam::OnSphere(p) = param {
                assert!(p.center.norm() <= 1.0 + 1e-12);
            } else {
                panic!("wrong variant");
            }
        }
    }

    #[test]
    fn top_dimensional_has_no_grassmannian_factor() {
        // G(n,n) is a single point; the carrier must be the full space.
        let config = TheoremConfig::new(2);
        let mut rng = RandomStream::new(1, 0).rng();
        let (param, _) =
            sample_param(TheoremId::TopDimensional, &config, &ProposalSpec::default(), &mut rng)
                .unwrap();
        if let SphereParam::Circumscribed(p) = param {
            assert!(p.carrier.same_span(&Frame::identity(2), 1e-12));
        } else {
            panic!("wrong variant");
        }
    }

    #[test]
    fn inconsistent_config_rejected() {
        let config = TheoremConfig::new(3).with_m(3).with_q(1);
        let mut rng = RandomStream::new(1, 0).rng();
        assert!(sample_param(
            TheoremId::PivotedCircle,
            &config,
            &ProposalSpec::default(),
            &mut rng
        )
        .is_err());
    }
}
