//! Points of the ball and sphere, the bracket [x,y], Mobius transformations,
//! weighted measure constants, and a finite-difference hyperbolic Laplacian.
//!
//! The bracket [x,y] = sqrt(1 - 2<x,y> + |x|^2 |y|^2) is the boundary-distance
//! surrogate that governs kernel growth; the Mobius map phi_a is the involutive
//! self-map of the ball exchanging a and 0.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

/// Interior point of the unit ball in R^n.
#[derive(Debug, Clone, PartialEq)]
pub struct BallPoint {
    coords: Vec<f64>,
}

impl BallPoint {
    /// Build an interior point; the Euclidean norm must be < 1.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::Parameter("dimension n must be >= 2".into()));
        }
        let p = Self { coords };
        if p.norm() >= 1.0 {
            return Err(Error::Parameter(
                "ball point norm must be < 1 (interior point)".into(),
            ));
        }
        Ok(p)
    }

    /// The origin of R^n.
    pub fn origin(n: usize) -> Self {
        Self {
            coords: vec![0.0; n],
        }
    }

    /// Coordinates as a slice.
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Ambient dimension n.
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Squared Euclidean norm.
    pub fn norm_sq(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum()
    }

    /// Scale towards the origin; |t| * |x| must stay < 1.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        Self::new(self.coords.iter().map(|c| c * t).collect())
    }
}

/// Unit vector on the sphere S^(n-1), renormalized on construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpherePoint {
    coords: Vec<f64>,
}

impl SpherePoint {
    /// Build a sphere point from a vector that is unit up to rounding.
    ///
    /// Quadrature node generation produces rounding-level deviations, so the
    /// vector is renormalized rather than rejected; inputs that are clearly
    /// not unit vectors are refused.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::Parameter("dimension n must be >= 2".into()));
        }
        let norm: f64 = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !((norm - 1.0).abs() <= 1e-6) {
            return Err(Error::Parameter(format!(
                "sphere point norm must be 1 up to rounding, got {norm}"
            )));
        }
        if (norm - 1.0).abs() <= 4e-15 {
            // already unit to rounding; dividing would perturb the bits,
            // which matters for exact serialization round-trips
            return Ok(Self { coords });
        }
        Ok(Self {
            coords: coords.iter().map(|c| c / norm).collect(),
        })
    }

    /// Normalize an arbitrary nonzero vector onto the sphere.
    pub fn from_direction(coords: &[f64]) -> Result<Self> {
        let norm: f64 = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm < 1e-100 {
            return Err(Error::Parameter(
                "cannot normalize the zero vector to a sphere point".into(),
            ));
        }
        Ok(Self {
            coords: coords.iter().map(|c| c / norm).collect(),
        })
    }

    /// The coordinate axis e_i.
    pub fn axis(n: usize, i: usize) -> Self {
        let mut coords = vec![0.0; n];
        coords[i] = 1.0;
        Self { coords }
    }

    /// Coordinates as a slice.
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Ambient dimension n.
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// View as an interior-adjacent point for bracket computations.
    pub fn scaled(&self, t: f64) -> Result<BallPoint> {
        BallPoint::new(self.coords.iter().map(|c| c * t).collect())
    }
}

/// Normalizing constant and parameters of the weighted measure nu_alpha.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedMeasure {
    /// Weight exponent.
    pub alpha: f64,
    /// Ambient dimension.
    pub n: usize,
    /// V_alpha, so that nu_alpha(B) = 1 in the finite-measure zone.
    pub v_alpha: f64,
}

impl WeightedMeasure {
    /// Measure with weight (1-|x|^2)^alpha normalized by V_alpha.
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Parameter("dimension n must be >= 2".into()));
        }
        Ok(Self {
            alpha,
            n,
            v_alpha: v_alpha(n, alpha),
        })
    }
}

/// The normalizing constant V_alpha: a Gamma-function ratio for alpha > -1
/// and exactly 1 for alpha <= -1.
pub fn v_alpha(n: usize, alpha: f64) -> f64 {
    if alpha > -1.0 {
        let h = n as f64 / 2.0;
        (ln_gamma(h + 1.0) + ln_gamma(alpha + 1.0) - ln_gamma(h + alpha + 1.0)).exp()
    } else {
        1.0
    }
}

/// Euclidean inner product of two coordinate slices.
pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// The bracket [x,y] = sqrt(1 - 2<x,y> + |x|^2 |y|^2).
///
/// Accepts coordinates of ball or sphere points (norms <= 1); the result is
/// bounded below by 1 - |x||y|, hence positive when either point is interior.
pub fn bracket(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Parameter(format!(
            "dimension mismatch in bracket: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    let xx = dot(x, x);
    let yy = dot(y, y);
    if xx > 1.0 + 1e-9 || yy > 1.0 + 1e-9 {
        return Err(Error::Parameter(
            "bracket arguments must have norm <= 1".into(),
        ));
    }
    Ok((1.0 - 2.0 * dot(x, y) + xx * yy).max(0.0).sqrt())
}

/// The Mobius transformation phi_a of the ball: involutive, exchanges a and 0.
///
/// phi_a(x) = (a |x-a|^2 + (1-|a|^2)(a-x)) / (1 - 2<x,a> + |a|^2 |x|^2).
pub fn mobius(a: &BallPoint, x: &BallPoint) -> Result<BallPoint> {
    if a.dim() != x.dim() {
        return Err(Error::Parameter(
            "dimension mismatch in mobius transformation".into(),
        ));
    }
    let n = a.dim();
    let xa = dot(x.coords(), a.coords());
    let aa = a.norm_sq();
    let xx = x.norm_sq();
    let denom = 1.0 - 2.0 * xa + aa * xx;
    if denom < 1e-300 {
        return Err(Error::Domain(
            "mobius denominator degenerate (points too close to the boundary)".into(),
        ));
    }
    let xma_sq: f64 = (0..n)
        .map(|i| (x.coords[i] - a.coords[i]).powi(2))
        .sum();
    let mut out = vec![0.0; n];
    for i in 0..n {
        out[i] = (a.coords[i] * xma_sq + (1.0 - aa) * (a.coords[i] - x.coords[i])) / denom;
    }
    // The image is interior for interior inputs; clamp rounding overshoot.
    let norm: f64 = out.iter().map(|c| c * c).sum::<f64>().sqrt();
    if norm >= 1.0 {
        let s = (1.0 - 1e-15) / norm;
        for c in &mut out {
            *c *= s;
        }
    }
    BallPoint::new(out)
}

/// Central finite-difference estimate of the hyperbolic Laplacian
///
///   Delta_h f(x) = (1-|x|^2)^2 Delta f(x) + 2(n-2)(1-|x|^2) <x, grad f(x)>
///
/// using a second-order stencil of step h in each coordinate.
pub fn hyperbolic_laplacian_fd<F: Fn(&[f64]) -> f64>(
    field: F,
    x: &BallPoint,
    h: f64,
) -> Result<f64> {
    if h <= 0.0 {
        return Err(Error::Parameter("step h must be positive".into()));
    }
    if x.norm() + h >= 1.0 {
        return Err(Error::Domain(
            "finite-difference stencil leaves the ball".into(),
        ));
    }
    let n = x.dim();
    let f0 = field(x.coords());
    let mut lap = 0.0;
    let mut radial = 0.0;
    let mut buf = x.coords().to_vec();
    for i in 0..n {
        let xi = buf[i];
        buf[i] = xi + h;
        let fp = field(&buf);
        buf[i] = xi - h;
        let fm = field(&buf);
        buf[i] = xi;
        lap += (fp - 2.0 * f0 + fm) / (h * h);
        radial += xi * (fp - fm) / (2.0 * h);
    }
    let w = 1.0 - x.norm_sq();
    Ok(w * w * lap + 2.0 * (n as f64 - 2.0) * w * radial)
}
