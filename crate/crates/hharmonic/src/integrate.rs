//! Quadrature over the weighted ball measures nu_alpha and the normalized
//! sphere measure, and the integral operators built on them: the Bergman
//! projections P_beta, the two-weight operator E_{s,t}, and the duality
//! pairings.
//!
//! Sphere rules are deterministic product rules (uniform azimuth times
//! Gauss-Gegenbauer polar factors), so every tolerance in the test surface is
//! reproducible bit for bit. Summation uses pairwise reduction throughout.

use crate::error::{Error, Result};
use crate::expansion::HHarmonicFunction;
use crate::geometry::{bracket, v_alpha, BallPoint, SpherePoint};
use crate::kernels::{apply_dst, eval_kernel, required_degree, KernelSpec, Truncation};
use crate::quad::{gauss_gegenbauer_m11, gauss_jacobi_01, pairwise_sum};
use crate::specfun::zonal_seq;

/// Largest supported sphere exactness degree.
pub const MAX_SPHERE_DEGREE: usize = 128;

/// Quadrature rule on the unit sphere with respect to the normalized surface
/// measure (weights sum to 1).
#[derive(Debug, Clone)]
pub struct SphereRule {
    /// Ambient dimension n (the sphere is S^(n-1)).
    pub n: usize,
    /// Largest polynomial degree integrated exactly.
    pub exact_degree: usize,
    /// Nodes on the sphere.
    pub nodes: Vec<SpherePoint>,
    /// Positive weights summing to 1.
    pub weights: Vec<f64>,
}

impl SphereRule {
    /// Product rule exact for spherical polynomials up to `exact_degree`.
    ///
    /// n = 2 uses a uniform angular grid; n = 3 Gauss-Legendre in the polar
    /// cosine times a uniform azimuth; n >= 4 recursive Gauss-Gegenbauer
    /// polar factors. Exactness is spot-checked at construction against
    /// low-degree zonal harmonics.
    pub fn new(n: usize, exact_degree: usize) -> Result<Self> {
        if !(2..=8).contains(&n) {
            return Err(Error::Parameter("sphere rules support 2 <= n <= 8".into()));
        }
        if exact_degree > MAX_SPHERE_DEGREE {
            return Err(Error::Parameter(format!(
                "requested sphere exactness {exact_degree} exceeds the cap {MAX_SPHERE_DEGREE}"
            )));
        }
        let rule = Self::build(n, exact_degree)?;
        rule.verify()?;
        Ok(rule)
    }

    fn build(n: usize, degree: usize) -> Result<Self> {
        if n == 2 {
            let mut k = degree + 1;
            if k % 2 == 1 {
                k += 1;
            }
            k = k.max(4);
            let w = 1.0 / k as f64;
            let mut nodes = Vec::with_capacity(k);
            for j in 0..k {
                let th = 2.0 * std::f64::consts::PI * j as f64 / k as f64;
                nodes.push(SpherePoint::new(vec![th.cos(), th.sin()])?);
            }
            return Ok(Self {
                n,
                exact_degree: degree,
                nodes,
                weights: vec![w; k],
            });
        }
        let lambda = (n as f64 - 3.0) / 2.0;
        let polar_order = degree / 2 + 1;
        let (ts, vs) = gauss_gegenbauer_m11(polar_order, lambda)?;
        let vtot: f64 = vs.iter().sum();
        let sub = Self::build(n - 1, degree)?;
        let mut nodes = Vec::with_capacity(ts.len() * sub.nodes.len());
        let mut weights = Vec::with_capacity(nodes.capacity());
        for (t, v) in ts.iter().zip(&vs) {
            let s = (1.0 - t * t).max(0.0).sqrt();
            for (omega, w) in sub.nodes.iter().zip(&sub.weights) {
                let mut coords = Vec::with_capacity(n);
                coords.push(*t);
                coords.extend(omega.coords().iter().map(|c| c * s));
                nodes.push(SpherePoint::new(coords)?);
                weights.push(v / vtot * w);
            }
        }
        Ok(Self {
            n,
            exact_degree: degree,
            nodes,
            weights,
        })
    }

    fn verify(&self) -> Result<()> {
        let total: f64 = pairwise_sum(&self.weights);
        if (total - 1.0).abs() > 1e-13 {
            return Err(Error::Convergence(format!(
                "sphere rule weights sum to {total}, expected 1"
            )));
        }
        let probe = SpherePoint::from_direction(
            &(0..self.n).map(|i| 1.0 + i as f64 / 3.0).collect::<Vec<_>>(),
        )?;
        let deg = self.exact_degree.min(8);
        for m in 1..=deg {
            let vals: Vec<f64> = self
                .nodes
                .iter()
                .zip(&self.weights)
                .map(|(z, &w)| {
                    let t = crate::geometry::dot(z.coords(), probe.coords()).clamp(-1.0, 1.0);
                    w * zonal_seq(self.n, t, m)[m]
                })
                .collect();
            let integral = pairwise_sum(&vals);
            if integral.abs() > 1e-10 {
                return Err(Error::Convergence(format!(
                    "sphere rule fails zonal exactness at degree {m}: {integral}"
                )));
            }
        }
        Ok(())
    }

    /// Integrate a function over the sphere.
    pub fn integrate<F: FnMut(&[f64]) -> f64>(&self, mut f: F) -> f64 {
        let vals: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(z, &w)| w * f(z.coords()))
            .collect();
        pairwise_sum(&vals)
    }
}

/// Product rule for the probability measure nu_alpha on the ball:
/// Gauss-Jacobi in u = r^2 with weight (1-u)^alpha u^(n/2-1), times a sphere
/// rule.
#[derive(Debug, Clone)]
pub struct BallRule {
    /// Ambient dimension.
    pub n: usize,
    /// Weight exponent; must exceed -1 for a finite measure.
    pub alpha: f64,
    /// Radial node values r_i in (0,1).
    pub radial_nodes: Vec<f64>,
    /// Radial weights summing to 1.
    pub radial_weights: Vec<f64>,
    /// Angular factor.
    pub sphere: SphereRule,
}

impl BallRule {
    /// Rule with `radial_order` radial nodes and the given sphere exactness.
    pub fn new(n: usize, alpha: f64, radial_order: usize, sphere_degree: usize) -> Result<Self> {
        if !(alpha > -1.0) {
            return Err(Error::Parameter(
                "alpha must exceed -1 for a finite ball measure".into(),
            ));
        }
        let radial = gauss_jacobi_01(radial_order, alpha, n as f64 / 2.0 - 1.0)?;
        let total: f64 = radial.weights.iter().sum();
        Ok(Self {
            n,
            alpha,
            radial_nodes: radial.nodes.iter().map(|&u| u.sqrt()).collect(),
            radial_weights: radial.weights.iter().map(|&w| w / total).collect(),
            sphere: SphereRule::new(n, sphere_degree)?,
        })
    }

    /// Integrate a function against nu_alpha.
    pub fn integrate<F: FnMut(&[f64]) -> f64>(&self, mut f: F) -> f64 {
        self.try_integrate(|x| Ok(f(x))).expect("infallible integrand")
    }

    /// Integrate a fallible integrand against nu_alpha.
    pub fn try_integrate<F: FnMut(&[f64]) -> Result<f64>>(&self, mut f: F) -> Result<f64> {
        let mut vals = Vec::with_capacity(self.radial_nodes.len() * self.sphere.nodes.len());
        let mut buf = vec![0.0; self.n];
        for (&r, &wr) in self.radial_nodes.iter().zip(&self.radial_weights) {
            for (zeta, &ws) in self.sphere.nodes.iter().zip(&self.sphere.weights) {
                for (b, c) in buf.iter_mut().zip(zeta.coords()) {
                    *b = r * c;
                }
                vals.push(wr * ws * f(&buf)?);
            }
        }
        Ok(pairwise_sum(&vals))
    }

    /// Largest radial node (the boundary-nearest shell).
    pub fn max_radius(&self) -> f64 {
        self.radial_nodes.iter().cloned().fold(0.0, f64::max)
    }
}

/// Bergman projection P_beta g(x) = integral of R_beta(x,y) g(y) dnu_beta(y),
/// with the kernel truncated so its tail bound stays below `kernel_tol`.
pub fn project<F: FnMut(&[f64]) -> Result<f64>>(
    beta: f64,
    mut g: F,
    x: &BallPoint,
    rule: &BallRule,
    kernel_tol: f64,
) -> Result<f64> {
    if rule.alpha != beta {
        return Err(Error::Parameter(
            "projection rule must integrate against nu_beta (rule alpha != beta)".into(),
        ));
    }
    let rmax = rule.max_radius();
    let m_max = required_degree(rule.n, beta, x.norm_sq(), rmax * rmax, kernel_tol)?;
    let spec = KernelSpec {
        n: rule.n,
        alpha: beta,
        truncation: Truncation::Degree(m_max),
    };
    rule.try_integrate(|y| {
        let yp = BallPoint::new(y.to_vec())?;
        Ok(eval_kernel(&spec, x, &yp)? * g(y)?)
    })
}

/// The operator E_{s,t} f(x) = (1-|x|^2)^t * integral of
/// f(y) (1-|y|^2)^s / [x,y]^(n+s+t) dnu(y), against the unweighted measure.
pub fn apply_est<F: FnMut(&[f64]) -> Result<f64>>(
    s: f64,
    t: f64,
    mut g: F,
    x: &BallPoint,
    rule: &BallRule,
) -> Result<f64> {
    if rule.alpha != 0.0 {
        return Err(Error::Parameter(
            "E_{s,t} integrates against the unweighted measure (rule alpha != 0)".into(),
        ));
    }
    let n = rule.n as f64;
    let integral = rule.try_integrate(|y| {
        let yy: f64 = y.iter().map(|c| c * c).sum();
        let br = bracket(x.coords(), y)?;
        Ok(g(y)? * (1.0 - yy).powf(s) / br.powf(n + s + t))
    })?;
    Ok((1.0 - x.norm_sq()).powf(t) * integral)
}

/// Duality pairing <f,g>_{alpha,p} = integral of D^t_s f * D^t'_s g
/// dnu_{alpha+pt} with t' = (p-1) t.
pub fn pairing_dual(
    f: &HHarmonicFunction,
    g: &HHarmonicFunction,
    alpha: f64,
    p: f64,
    s: f64,
    t: f64,
    rule: &BallRule,
) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::Parameter(
            "dual pairing requires 1 < p < infinity".into(),
        ));
    }
    if !(alpha + p * t > -1.0) {
        return Err(Error::Parameter("alpha + p*t must exceed -1".into()));
    }
    if (rule.alpha - (alpha + p * t)).abs() > 1e-12 {
        return Err(Error::Parameter(
            "pairing rule must integrate against nu_{alpha+pt}".into(),
        ));
    }
    let tp = (p - 1.0) * t;
    let mut df = apply_dst(s, t, f)?.evaluator();
    let mut dg = apply_dst(s, tp, g)?.evaluator();
    rule.try_integrate(|y| Ok(df.eval(y)? * dg.eval(y)?))
}

/// The B^1/Bloch pairing integral over r*B for each radius in `radii`:
/// integral of D^t_s f(x) g(x) dnu_{alpha+t}(x) over rB. The r -> 1 limit is
/// reported as the sequence itself, never extrapolated.
pub fn pairing_bloch(
    f: &HHarmonicFunction,
    g: &HHarmonicFunction,
    alpha: f64,
    s: f64,
    t: f64,
    radii: &[f64],
    rule: &BallRule,
) -> Result<Vec<(f64, f64)>> {
    if !(alpha + t > -1.0) {
        return Err(Error::Parameter("alpha + t must exceed -1".into()));
    }
    if rule.alpha != 0.0 {
        return Err(Error::Parameter(
            "Bloch pairing scans integrate with an unweighted rule (alpha = 0)".into(),
        ));
    }
    let mut df = apply_dst(s, t, f)?.evaluator();
    let mut ge = g.evaluator();
    let va = v_alpha(rule.n, alpha + t);
    let mut out = Vec::with_capacity(radii.len());
    let mut buf = vec![0.0; rule.n];
    for &r in radii {
        if !(0.0 < r && r < 1.0) {
            return Err(Error::Parameter("pairing radii must lie in (0,1)".into()));
        }
        let val = rule.try_integrate(|z| {
            let zz: f64 = z.iter().map(|c| c * c).sum();
            for (b, c) in buf.iter_mut().zip(z) {
                *b = r * c;
            }
            Ok(df.eval(&buf)? * ge.eval(&buf)? * (1.0 - r * r * zz).powf(alpha + t))
        })?;
        out.push((r, r.powi(rule.n as i32) / va * val));
    }
    Ok(out)
}

/// One-dimensional quadrature of integral_0^1 (1-t)^b / [tx,y]^(1+b+c) dt.
pub fn lint01_integral(b: f64, c: f64, x: &[f64], y: &[f64], order: usize) -> Result<f64> {
    if !(b > -1.0) {
        return Err(Error::Parameter("lemma exponent b must exceed -1".into()));
    }
    let rule = gauss_jacobi_01(order, b, 0.0)?;
    let mut tx = vec![0.0; x.len()];
    let vals: Result<Vec<f64>> = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&t, &w)| {
            for (o, &xi) in tx.iter_mut().zip(x) {
                *o = t * xi;
            }
            Ok(w * bracket(&tx, y)?.powf(-(1.0 + b + c)))
        })
        .collect();
    Ok(pairwise_sum(&vals?))
}

/// The comparison expression of the 1-D bracket integral bound:
/// [x,y]^(-c) for c > 0, 1 + log(1/[x,y]) for c = 0, and 1 for c < 0.
pub fn lint01_bound(c: f64, bracket_xy: f64) -> f64 {
    if c > 0.0 {
        bracket_xy.powf(-c)
    } else if c == 0.0 {
        1.0 + (1.0 / bracket_xy).ln()
    } else {
        1.0
    }
}
