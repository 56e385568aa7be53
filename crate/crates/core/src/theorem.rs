//! Identifiers and configurations of the supported change-of-variables
//! formulas, plus the parameter value each right-hand side integrates over.

use serde::{Deserialize, Serialize};

use crate::geometry::{
    AffineFlat, AnchoredParam, CircumscribedParam, Frame, PivotedCircleParam, PointTuple,
    SphereOnSphereParam, Vector,
};
use crate::{Error, Result};

/// The reparametrization formulas handled by this crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremId {
    /// Linear subspace through the origin spanned by `k` points.
    LinearBp,
    /// Affine subspace spanned by `k+1` points.
    AffineBp,
    /// Sphere circumscribed around `k+1` points in `R^n`.
    Circumscribed,
    /// Circumscribed sphere in the top-dimensional case `k = n`.
    TopDimensional,
    /// Sphere through `n` points and the origin.
    Pivoted1,
    /// Sphere through `m <= n` points and the origin.
    Pivoted2,
    /// Sphere through `m` points containing a fixed circle `S(0, r0, Q)`.
    PivotedCircle,
    /// Smallest sphere through `k+1` points centered in a fixed flat.
    Anchored,
    /// Small sphere of `S^n` through `k+1` points on it.
    OnSphere,
    /// Rotationally symmetric form of the on-sphere formula.
    OnSphereSymmetric,
}

impl TheoremId {
    pub const ALL: [TheoremId; 10] = [
        TheoremId::LinearBp,
        TheoremId::AffineBp,
        TheoremId::Circumscribed,
        TheoremId::TopDimensional,
        TheoremId::Pivoted1,
        TheoremId::Pivoted2,
        TheoremId::PivotedCircle,
        TheoremId::Anchored,
        TheoremId::OnSphere,
        TheoremId::OnSphereSymmetric,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TheoremId::LinearBp => "linear-bp",
            TheoremId::AffineBp => "affine-bp",
            TheoremId::Circumscribed => "circumscribed",
            TheoremId::TopDimensional => "top-dimensional",
            TheoremId::Pivoted1 => "pivoted-1",
            TheoremId::Pivoted2 => "pivoted-2",
            TheoremId::PivotedCircle => "pivoted-circle",
            TheoremId::Anchored => "anchored",
            TheoremId::OnSphere => "on-sphere",
            TheoremId::OnSphereSymmetric => "on-sphere-symmetric",
        }
    }

    /// Whether the left-hand side integrates over tuples on a sphere
    /// rather than in Euclidean space.
    pub fn spherical_domain(&self) -> bool {
        matches!(self, TheoremId::OnSphere | TheoremId::OnSphereSymmetric)
    }
}

impl std::fmt::Display for TheoremId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for TheoremId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .iter()
            .copied()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown theorem '{s}'")))
    }
}

/// Dimensions and fixed objects of one theorem instance.
///
/// `n` is the ambient dimension (the sphere dimension for the on-sphere
/// formulas, whose points live in `R^{n+1}`). `k`, `m`, `q`, `r0` are used
/// where the theorem needs them. The optional fixed pivot plane / anchor
/// flat default to canonical axis-aligned choices.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct TheoremConfig {
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r0: Option<f64>,
    #[serde(skip)]
    pub pivot: Option<Frame>,
    #[serde(skip)]
    pub anchor: Option<AffineFlat>,
}

impl TheoremConfig {
    pub fn new(n: usize) -> Self {
        TheoremConfig { n, ..Default::default() }
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    pub fn with_m(mut self, m: usize) -> Self {
        self.m = Some(m);
        self
    }

    pub fn with_q(mut self, q: usize) -> Self {
        self.q = Some(q);
        self
    }

    pub fn with_r0(mut self, r0: f64) -> Self {
        self.r0 = Some(r0);
        self
    }

    pub fn with_pivot(mut self, pivot: Frame) -> Self {
        self.pivot = Some(pivot);
        self
    }

    pub fn with_anchor(mut self, anchor: AffineFlat) -> Self {
        self.anchor = Some(anchor);
        self
    }

    pub fn k(&self) -> usize {
        self.k.unwrap_or(0)
    }

    pub fn m(&self) -> usize {
        self.m.unwrap_or(0)
    }

    pub fn q(&self) -> usize {
        self.q.unwrap_or(0)
    }

    pub fn r0(&self) -> f64 {
        self.r0.unwrap_or(0.0)
    }

    /// Fixed pivot plane `Q`; defaults to the span of the last `q`
    /// coordinate axes.
    pub fn pivot_frame(&self) -> Result<Frame> {
        let q = self.q();
        match &self.pivot {
            Some(f) => {
                if f.dim() != q || f.ambient_dim() != self.n {
                    return Err(Error::invalid("pivot frame dimensions disagree with config"));
                }
                Ok(f.clone())
            }
            None => {
                let full = Frame::identity(self.n);
                Frame::new(full.basis()[self.n - q..].to_vec(), self.n)
            }
        }
    }

    /// Fixed anchor flat `F`; defaults to the span of the first `m`
    /// coordinate axes through the origin.
    pub fn anchor_flat(&self) -> Result<AffineFlat> {
        let m = self.m();
        match &self.anchor {
            Some(f) => {
                if f.dim() != m || f.ambient_dim() != self.n {
                    return Err(Error::invalid("anchor flat dimensions disagree with config"));
                }
                Ok(f.clone())
            }
            None => {
                let full = Frame::identity(self.n);
                let dir = Frame::new(full.basis()[..m].to_vec(), self.n)?;
                AffineFlat::new(dir, Vector::zeros(self.n))
            }
        }
    }

    /// Number of points the left-hand side integrates over.
    pub fn tuple_size(&self, theorem: TheoremId) -> usize {
        match theorem {
            TheoremId::LinearBp => self.k(),
            TheoremId::AffineBp
            | TheoremId::Circumscribed
            | TheoremId::Anchored
            | TheoremId::OnSphere
            | TheoremId::OnSphereSymmetric => self.k() + 1,
            TheoremId::TopDimensional => self.n + 1,
            TheoremId::Pivoted1 => self.n,
            TheoremId::Pivoted2 | TheoremId::PivotedCircle => self.m(),
        }
    }

    /// Dimension of the space the points are embedded in (`n + 1` for the
    /// on-sphere formulas).
    pub fn point_dim(&self, theorem: TheoremId) -> usize {
        if theorem.spherical_domain() {
            self.n + 1
        } else {
            self.n
        }
    }

    /// Checks the dimensional constraints of the theorem.
    pub fn validate(&self, theorem: TheoremId) -> Result<()> {
        let n = self.n;
        if n == 0 {
            return Err(Error::invalid("ambient dimension must be >= 1"));
        }
        match theorem {
            TheoremId::LinearBp | TheoremId::AffineBp | TheoremId::Circumscribed => {
                let k = self.k();
                if k < 1 || k > n {
                    return Err(Error::invalid(format!(
                        "{theorem} requires 1 <= k <= n, got k={k}, n={n}"
                    )));
                }
            }
            TheoremId::TopDimensional | TheoremId::Pivoted1 => {}
            TheoremId::Pivoted2 => {
                let m = self.m();
                if m < 1 || m > n {
                    return Err(Error::invalid(format!(
                        "{theorem} requires 1 <= m <= n, got m={m}, n={n}"
                    )));
                }
            }
            TheoremId::PivotedCircle => {
                let (m, q) = (self.m(), self.q());
                if q >= n {
                    return Err(Error::invalid(format!(
                        "{theorem} requires q < n, got q={q}, n={n}"
                    )));
                }
                if m < 1 || m > n - q {
                    return Err(Error::invalid(format!(
                        "{theorem} requires 1 <= m <= n - q, got m={m}, n={n}, q={q}"
                    )));
                }
                if self.r0() < 0.0 {
                    return Err(Error::invalid("pivot radius r0 must be non-negative"));
                }
            }
            TheoremId::Anchored => {
                let (k, m) = (self.k(), self.m());
                if k > m || m > n {
                    return Err(Error::invalid(format!(
                        "{theorem} requires k <= m <= n, got k={k}, m={m}, n={n}"
                    )));
                }
                if k == 0 && m == n {
                    return Err(Error::invalid(
                        "anchored with k = 0 needs m < n so the unit sphere is non-empty",
                    ));
                }
            }
            TheoremId::OnSphere | TheoremId::OnSphereSymmetric => {
                let k = self.k();
                if k < 1 || k > n {
                    return Err(Error::invalid(format!(
                        "{theorem} requires 1 <= k <= n, got k={k}, n={n}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// One point of a theorem's right-hand-side parameter space.
#[derive(Clone, Debug)]
pub enum SphereParam {
    /// Linear formula: subspace and `k` points inside it (ambient coords).
    Linear { carrier: Frame, points: PointTuple },
    /// Affine formula: subspace, orthogonal offset, `k+1` in-plane points.
    Affine { carrier: Frame, offset: Vector, points: PointTuple },
    Circumscribed(CircumscribedParam),
    Pivoted(PivotedCircleParam),
    Anchored(AnchoredParam),
    OnSphere(SphereOnSphereParam),
    /// Rotationally symmetric on-sphere slice: squared radius `t` and unit
    /// directions in `R^k`.
    SymmetricSlice { t: f64, directions: PointTuple },
}

impl SphereParam {
    /// The point tuple this parameter maps to under the forward map.
    ///
    /// The symmetric slice uses the canonical embedding: directions fill the
    /// first `k` coordinates of `R^{n+1}`, the hull point sits on the last
    /// axis. Rotationally symmetric integrands cannot tell the difference.
    pub fn reconstruct(&self, config: &TheoremConfig) -> Result<PointTuple> {
        match self {
            SphereParam::Linear { points, .. } => Ok(points.clone()),
            SphereParam::Affine { offset, points, .. } => PointTuple::new(
                points.iter().map(|u| u + offset).collect(),
            ),
            SphereParam::Circumscribed(p) => Ok(p.reconstruct()),
            SphereParam::Pivoted(p) => Ok(p.reconstruct()),
            SphereParam::Anchored(p) => Ok(p.reconstruct()),
            SphereParam::OnSphere(p) => Ok(p.reconstruct()),
            SphereParam::SymmetricSlice { t, directions } => {
                let k = config.k();
                let dim = config.n + 1;
                let radius = t.sqrt();
                let height = (1.0 - t).max(0.0).sqrt();
                let pts = directions
                    .iter()
                    .map(|u| {
                        let mut p = Vector::zeros(dim);
                        for i in 0..k {
                            p[i] = radius * u[i];
                        }
                        p[dim - 1] = height;
                        p
                    })
                    .collect();
                PointTuple::new(pts)
            }
        }
    }
}
