//! Kernel coefficients c_m(alpha) in both parameter regimes, the coefficient
//! multipliers D^t_s, and evaluation of the extended reproducing kernels
//! R_alpha with controlled truncation.
//!
//! For alpha > -1 the reciprocal coefficient is the weighted radial integral
//! of the squared profile, computed by Gauss-Jacobi quadrature in u = r^2; for
//! alpha <= -1 it is the Gamma-ratio closed form chosen to match the Hardy and
//! Mobius-invariant kernels. In both regimes c_0 = 1 and c_m grows like
//! m^(alpha+1).

use crate::error::{Error, Result};
use crate::expansion::HHarmonicFunction;
use crate::geometry::{dot, v_alpha, BallPoint, SpherePoint};
use crate::quad::{gauss_jacobi_01, pairwise_sum};
use crate::specfun::{sigma, sigma_cached, zonal_dim, zonal_seq};
use statrs::function::gamma::ln_gamma;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock, RwLock};

/// Largest degree served by quadrature-mode coefficients (alpha > -1); the
/// rule order 2m+40 becomes impractical beyond this.
pub const MAX_COEFF_DEGREE: usize = 512;

/// Largest degree served by closed-form coefficients (alpha <= -1), which
/// need no quadrature.
pub const MAX_CLOSED_FORM_DEGREE: usize = 4096;

/// Which formula produces the coefficients of a family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoeffMode {
    /// alpha > -1: reciprocal of the weighted L2 integral of S_m.
    BergmanIntegral,
    /// alpha <= -1: Gamma(m)/Gamma(m - alpha - 1), with c_0 = 1.
    ClosedForm,
}

/// Lazily grown table of c_m(alpha) for one (n, alpha).
///
/// Entries are computed once and never recomputed; the table only grows.
#[derive(Debug)]
pub struct CoefficientFamily {
    /// Ambient dimension.
    pub n: usize,
    /// Weight parameter.
    pub alpha: f64,
    /// Formula regime.
    pub mode: CoeffMode,
    cache: Mutex<Vec<f64>>,
}

type Registry = RwLock<HashMap<(usize, u64), Arc<CoefficientFamily>>>;

fn registry() -> &'static Registry {
    static REG: OnceLock<Registry> = OnceLock::new();
    REG.get_or_init(|| RwLock::new(HashMap::new()))
}

/// The process-wide coefficient family for (n, alpha).
pub fn family(n: usize, alpha: f64) -> Result<Arc<CoefficientFamily>> {
    if n < 2 {
        return Err(Error::Parameter("dimension n must be >= 2".into()));
    }
    let key = (n, alpha.to_bits());
    if let Some(f) = registry().read().unwrap().get(&key) {
        return Ok(f.clone());
    }
    let mode = if alpha > -1.0 {
        CoeffMode::BergmanIntegral
    } else {
        CoeffMode::ClosedForm
    };
    let fam = Arc::new(CoefficientFamily {
        n,
        alpha,
        mode,
        cache: Mutex::new(vec![1.0]), // c_0 = 1 in both regimes
    });
    registry()
        .write()
        .unwrap()
        .entry(key)
        .or_insert_with(|| fam.clone());
    Ok(registry().read().unwrap().get(&key).unwrap().clone())
}

impl CoefficientFamily {
    /// Largest degree this family can produce.
    pub fn degree_cap(&self) -> usize {
        match self.mode {
            CoeffMode::BergmanIntegral => MAX_COEFF_DEGREE,
            CoeffMode::ClosedForm => MAX_CLOSED_FORM_DEGREE,
        }
    }

    /// c_m(alpha); positive for all m, c_0 = 1.
    pub fn coeff(&self, m: usize) -> Result<f64> {
        if m > self.degree_cap() {
            return Err(Error::UnsupportedDegree(m));
        }
        let mut cache = self.cache.lock().unwrap();
        if cache.len() <= m {
            let from = cache.len();
            match self.mode {
                CoeffMode::ClosedForm => {
                    for mm in from..=m {
                        cache.push(closed_form_coeff(self.alpha, mm));
                    }
                }
                CoeffMode::BergmanIntegral => {
                    // One rule of order 2m+40 serves every mm <= m; the
                    // integrand contains u^mm, so the order grows with the
                    // requested degree.
                    let rule =
                        gauss_jacobi_01(2 * m + 40, self.alpha, self.n as f64 / 2.0 - 1.0)?;
                    let scale = self.n as f64 / (2.0 * v_alpha(self.n, self.alpha));
                    for mm in from..=m {
                        let mut vals = Vec::with_capacity(rule.nodes.len());
                        for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
                            let s = sigma(self.n, mm, 0, u)?;
                            vals.push(w * u.powi(mm as i32) * s * s);
                        }
                        let recip = scale * pairwise_sum(&vals);
                        cache.push(1.0 / recip);
                    }
                }
            }
        }
        Ok(cache[m])
    }

    /// Coefficients c_0..c_m as a vector.
    pub fn coeffs_up_to(&self, m: usize) -> Result<Vec<f64>> {
        self.coeff(m)?;
        Ok(self.cache.lock().unwrap()[..=m].to_vec())
    }
}

fn closed_form_coeff(alpha: f64, m: usize) -> f64 {
    if m == 0 {
        return 1.0;
    }
    // Gamma(m)/Gamma(m - alpha - 1); the argument m - alpha - 1 >= m since
    // alpha <= -1.
    (ln_gamma(m as f64) - ln_gamma(m as f64 - alpha - 1.0)).exp()
}

/// Coefficient multiplier d_m(s,t) = c_m(s+t)/c_m(s) of the operator D^t_s.
#[derive(Debug, Clone)]
pub struct Multiplier {
    /// Base parameter s.
    pub s: f64,
    /// Order parameter t (differential for t > 0, integral for t < 0).
    pub t: f64,
    fam_s: Arc<CoefficientFamily>,
    fam_st: Arc<CoefficientFamily>,
}

impl Multiplier {
    /// Multiplier family for dimension n and parameters (s, t).
    pub fn new(n: usize, s: f64, t: f64) -> Result<Self> {
        Ok(Self {
            s,
            t,
            fam_s: family(n, s)?,
            fam_st: family(n, s + t)?,
        })
    }

    /// d_m = c_m(s+t)/c_m(s); d_0 = 1 and d_m ~ m^t.
    pub fn d(&self, m: usize) -> Result<f64> {
        Ok(self.fam_st.coeff(m)? / self.fam_s.coeff(m)?)
    }
}

/// Apply D^t_s to an expansion: scale the degree-m block by d_m(s,t).
///
/// Degree structure and poles are preserved; the value at 0 is unchanged.
pub fn apply_dst(s: f64, t: f64, f: &HHarmonicFunction) -> Result<HHarmonicFunction> {
    let mult = Multiplier::new(f.dim(), s, t)?;
    let mut factors = HashMap::new();
    for m in f.degrees() {
        factors.insert(m, mult.d(m)?);
    }
    Ok(f.scale_blocks(|m| factors[&m]))
}

/// Truncation strategy of a kernel evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truncation {
    /// Fixed partial-sum degree.
    Degree(usize),
    /// Degree chosen so the geometric tail bound is below the tolerance.
    Tolerance(f64),
}

/// Evaluation plan for the reproducing kernel R_alpha on dimension n.
#[derive(Debug, Clone)]
pub struct KernelSpec {
    /// Ambient dimension.
    pub n: usize,
    /// Kernel parameter (any real).
    pub alpha: f64,
    /// Truncation strategy.
    pub truncation: Truncation,
}

impl KernelSpec {
    /// Kernel spec with a fixed truncation degree.
    pub fn with_degree(n: usize, alpha: f64, degree: usize) -> Self {
        Self {
            n,
            alpha,
            truncation: Truncation::Degree(degree),
        }
    }

    /// Kernel spec with a tail tolerance.
    pub fn with_tolerance(n: usize, alpha: f64, tol: f64) -> Self {
        Self {
            n,
            alpha,
            truncation: Truncation::Tolerance(tol),
        }
    }
}

/// Degree needed so that the tail bound
/// C * sum_{m>M} m^(alpha+n-1) (|x||y|)^m stays below the tolerance.
///
/// C is estimated from the computed coefficients (max over m <= 64), not from
/// the asymptotic constants, which the theory leaves implicit.
pub fn required_degree(n: usize, alpha: f64, ux: f64, uy: f64, tol: f64) -> Result<usize> {
    if tol <= 0.0 {
        return Err(Error::Parameter("tail tolerance must be positive".into()));
    }
    let rho = (ux * uy).sqrt();
    if rho < 1e-12 {
        return Ok(0);
    }
    let fam = family(n, alpha)?;
    let mut big_c: f64 = f64::MIN_POSITIVE;
    let gamma = alpha + n as f64 - 1.0;
    for m in 1..=64usize {
        let g = fam.coeff(m)?
            * sigma(n, m, 0, ux)?
            * sigma(n, m, 0, uy)?
            * zonal_dim(n, m) as f64
            / (m as f64).powf(gamma);
        big_c = big_c.max(g);
    }
    // walk the bound series once; suffix sums give the smallest adequate M
    let mut terms = Vec::new();
    let cap = fam.degree_cap();
    let mut m = 1usize;
    loop {
        let t = (m as f64).powf(gamma) * rho.powi(m as i32);
        terms.push(t);
        if m > 8 && big_c * t < tol * 1e-3 * (1.0 - rho) {
            break;
        }
        if m > 400_000 {
            return Err(Error::Truncation {
                required_degree: m,
                cap,
                tolerance: tol,
            });
        }
        m += 1;
    }
    // geometric remainder of the un-walked tail
    let mut suffix = terms.last().unwrap() * rho / (1.0 - rho);
    let mut needed = terms.len();
    for i in (0..terms.len()).rev() {
        suffix += terms[i];
        if big_c * suffix >= tol {
            needed = i + 1;
            break;
        }
        needed = i;
    }
    let infeasible = rho > 0.999 || needed > cap;
    if infeasible {
        return Err(Error::Truncation {
            required_degree: needed,
            cap,
            tolerance: tol,
        });
    }
    Ok(needed)
}

/// Evaluate R_alpha(x, y) as the truncated series
/// sum_m c_m(alpha) S_m(|x|) S_m(|y|) Z_m(x, y).
pub fn eval_kernel(spec: &KernelSpec, x: &BallPoint, y: &BallPoint) -> Result<f64> {
    if x.dim() != spec.n || y.dim() != spec.n {
        return Err(Error::Parameter(
            "kernel point dimension does not match the spec".into(),
        ));
    }
    if x.norm() >= 1.0 || y.norm() >= 1.0 {
        return Err(Error::Parameter(
            "kernel arguments must be interior points".into(),
        ));
    }
    let ux = x.norm_sq();
    let uy = y.norm_sq();
    let rx = ux.sqrt();
    let ry = uy.sqrt();
    if rx * ry < 1e-300 {
        return Ok(1.0);
    }
    let fam = family(spec.n, spec.alpha)?;
    let m_max = match spec.truncation {
        Truncation::Degree(m) => {
            if m > fam.degree_cap() {
                return Err(Error::UnsupportedDegree(m));
            }
            m
        }
        Truncation::Tolerance(tol) => required_degree(spec.n, spec.alpha, ux, uy, tol)?,
    };
    let t = (dot(x.coords(), y.coords()) / (rx * ry)).clamp(-1.0, 1.0);
    let zh = zonal_seq(spec.n, t, m_max);
    let mut terms = Vec::with_capacity(m_max + 1);
    let mut rpow = 1.0;
    for m in 0..=m_max {
        let c = fam.coeff(m)?;
        let sx = sigma_cached(spec.n, m, 0, ux)?;
        let sy = sigma_cached(spec.n, m, 0, uy)?;
        // grouping sx*sy first keeps the sum symmetric in (x, y) bit for bit
        terms.push(c * (sx * sy) * zh[m] * rpow);
        rpow *= rx * ry;
    }
    Ok(pairwise_sum(&terms))
}

/// R_alpha(x, .) truncated at degree `m_max`, as an H-harmonic expansion in
/// the second variable: the degree-m block is
/// c_m S_m(|x|) |x|^m * Z_m(., x/|x|).
pub fn kernel_as_function(
    spec: &KernelSpec,
    x: &BallPoint,
    m_max: usize,
) -> Result<HHarmonicFunction> {
    if x.dim() != spec.n {
        return Err(Error::Parameter(
            "kernel anchor dimension does not match the spec".into(),
        ));
    }
    let fam = family(spec.n, spec.alpha)?;
    if m_max > fam.degree_cap() {
        return Err(Error::UnsupportedDegree(m_max));
    }
    let mut f = HHarmonicFunction::new(spec.n)?;
    let r = x.norm();
    if r < 1e-300 {
        return HHarmonicFunction::constant(spec.n, 1.0);
    }
    let pole = SpherePoint::from_direction(x.coords())?;
    let u = x.norm_sq();
    let mut rpow = 1.0;
    for m in 0..=m_max {
        let a = fam.coeff(m)? * sigma_cached(spec.n, m, 0, u)? * rpow;
        if a != 0.0 {
            f.add_zonal_term(m, a, &pole)?;
        }
        rpow *= r;
    }
    Ok(f)
}

/// Rows (m, c_m, c_m / m^(alpha+1)) of the coefficient table; the ratio is
/// undefined at m = 0.
pub fn cm_table(n: usize, alpha: f64, m_max: usize) -> Result<Vec<(usize, f64, Option<f64>)>> {
    let fam = family(n, alpha)?;
    let cs = fam.coeffs_up_to(m_max)?;
    Ok(cs
        .iter()
        .enumerate()
        .map(|(m, &c)| {
            let ratio = if m == 0 {
                None
            } else {
                Some(c / (m as f64).powf(alpha + 1.0))
            };
            (m, c, ratio)
        })
        .collect())
}
