//! Radial profiles S_m, zonal harmonics Z_m, and dimension counts.
//!
//! Zonal harmonics are handled through two routes that cross-check each other:
//! an explicit coefficient form over the monomial basis <x,eta>^(m-2k) |x|^(2k)
//! (exact polynomial algebra, used by the differential operators and tests),
//! and Gegenbauer three-term recurrences (stable at any degree, used by kernel
//! evaluation).

pub mod hyp;

use crate::error::{Error, Result};
use crate::geometry::{dot, BallPoint, SpherePoint};
pub use hyp::{gauss_norm, pochhammer, sigma, sigma_cached, signed_ln_gamma};
use statrs::function::gamma::ln_gamma;
use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

/// dim H_m(R^n), the dimension of degree-m homogeneous harmonic polynomials.
pub fn zonal_dim(n: usize, m: usize) -> u64 {
    if m == 0 {
        return 1;
    }
    if n == 2 {
        return 2;
    }
    binom(n + m - 1, n - 1) - binom(n + m - 3, n - 1)
}

fn binom(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// Coefficients b_k of Z_m(x,eta) = sum_k b_k <x,eta>^(m-2k) |x|^(2k) |eta|^(2k),
/// from the Gegenbauer expansion extended by homogeneity. Cached per (n, m).
pub fn zonal_coeffs(n: usize, m: usize) -> Arc<Vec<f64>> {
    type Cache = RwLock<HashMap<(usize, usize), Arc<Vec<f64>>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(v) = cache.read().unwrap().get(&(n, m)) {
        return v.clone();
    }
    let v = Arc::new(compute_zonal_coeffs(n, m));
    cache.write().unwrap().insert((n, m), v.clone());
    v
}

fn compute_zonal_coeffs(n: usize, m: usize) -> Vec<f64> {
    if m == 0 {
        return vec![1.0];
    }
    let lambda = (n as f64 - 2.0) / 2.0;
    let mut out = Vec::with_capacity(m / 2 + 1);
    for k in 0..=m / 2 {
        // b_k = (-1)^k (lambda+m) Gamma(lambda+m-k) 2^(m-2k)
        //       / (Gamma(lambda+1) k! (m-2k)!)
        // in log form; at lambda = 0 (n = 2) the expression reads
        // m Gamma(m-k) 2^(m-2k) / (k! (m-2k)!), which the same code yields.
        let lg = ln_gamma(lambda + (m - k) as f64) + (m - 2 * k) as f64 * std::f64::consts::LN_2
            - ln_gamma(lambda + 1.0)
            - ln_gamma(k as f64 + 1.0)
            - ln_gamma((m - 2 * k) as f64 + 1.0);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        out.push(sign * (lambda + m as f64) * lg.exp());
    }
    out
}

/// Gegenbauer values C_j^mu(t) for j = 0..=deg by the three-term recurrence.
pub fn gegenbauer_seq(mu: f64, t: f64, deg: usize) -> Vec<f64> {
    let mut v = Vec::with_capacity(deg + 1);
    v.push(1.0);
    if deg == 0 {
        return v;
    }
    v.push(2.0 * mu * t);
    for j in 1..deg {
        let jf = j as f64;
        let next = (2.0 * (jf + mu) * t * v[j] - (jf + 2.0 * mu - 1.0) * v[j - 1]) / (jf + 1.0);
        v.push(next);
    }
    v
}

/// Chebyshev T_j(t) for j = 0..=deg.
pub fn chebyshev_seq(t: f64, deg: usize) -> Vec<f64> {
    let mut v = Vec::with_capacity(deg + 1);
    v.push(1.0);
    if deg == 0 {
        return v;
    }
    v.push(t);
    for j in 1..deg {
        v.push(2.0 * t * v[j] - v[j - 1]);
    }
    v
}

/// Unit-sphere zonal values Zhat_m(t) = Z_m(zeta, eta) with t = <zeta, eta>,
/// for m = 0..=max_m. Zhat_m(1) = dim H_m.
pub fn zonal_seq(n: usize, t: f64, max_m: usize) -> Vec<f64> {
    zonal_deriv_seq(n, 0, t, max_m)
}

/// d-th t-derivative of the unit-sphere zonal, for all degrees m = 0..=max_m.
///
/// Uses d/dt C_m^lambda = 2 lambda C_{m-1}^{lambda+1} iterated, which keeps
/// every evaluation on an upward Gegenbauer recurrence (stable on [-1,1]).
pub fn zonal_deriv_seq(n: usize, d: usize, t: f64, max_m: usize) -> Vec<f64> {
    let mut out = vec![0.0; max_m + 1];
    zonal_deriv_seq_into(n, d, t, max_m, &mut out);
    out
}

/// In-place variant of [`zonal_deriv_seq`] for allocation-free sweeps.
pub fn zonal_deriv_seq_into(n: usize, d: usize, t: f64, max_m: usize, out: &mut Vec<f64>) {
    out.clear();
    out.resize(max_m + 1, 0.0);
    let lambda = (n as f64 - 2.0) / 2.0;
    if d == 0 {
        if n == 2 {
            // Zhat_m = 2 T_m for m >= 1
            out[0] = 1.0;
            if max_m >= 1 {
                let mut prev = 1.0;
                let mut cur = t;
                out[1] = 2.0 * cur;
                for m in 2..=max_m {
                    let next = 2.0 * t * cur - prev;
                    prev = cur;
                    cur = next;
                    out[m] = 2.0 * cur;
                }
            }
        } else {
            let mut prev = 1.0;
            let mut cur = 2.0 * lambda * t;
            out[0] = 1.0;
            if max_m >= 1 {
                out[1] = (lambda + 1.0) / lambda * cur;
                for m in 2..=max_m {
                    let mf = (m - 1) as f64;
                    let next = (2.0 * (mf + lambda) * t * cur - (mf + 2.0 * lambda - 1.0) * prev)
                        / (mf + 1.0);
                    prev = cur;
                    cur = next;
                    out[m] = (lambda + m as f64) / lambda * cur;
                }
            }
        }
        return;
    }
    if max_m < d {
        return;
    }
    // Zhat_m^(d) = (lambda+m) (lambda+1)_{d-1} 2^d C_{m-d}^{lambda+d}
    let fac = pochhammer(lambda + 1.0, d - 1) * (2.0f64).powi(d as i32);
    let mu = lambda + d as f64;
    let mut prev = 1.0;
    let mut cur = 2.0 * mu * t;
    out[d] = (lambda + d as f64) * fac * prev;
    if max_m >= d + 1 {
        out[d + 1] = (lambda + (d + 1) as f64) * fac * cur;
        for m in d + 2..=max_m {
            let jf = (m - d - 1) as f64;
            let next = (2.0 * (jf + mu) * t * cur - (jf + 2.0 * mu - 1.0) * prev) / (jf + 1.0);
            prev = cur;
            cur = next;
            out[m] = (lambda + m as f64) * fac * cur;
        }
    }
}

/// Normalized radial profile S_m of dimension n.
///
/// S_m(r) is the hypergeometric factor making S_m(|x|) f_m(x) hyperbolically
/// harmonic for f_m in H_m, normalized so S_m(1) = 1.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    /// Homogeneity degree m.
    pub m: usize,
    /// Ambient dimension n.
    pub n: usize,
    /// 2F1(m, 1-n/2; m+n/2; 1), the normalization denominator.
    pub norm_const: f64,
}

impl RadialProfile {
    /// Profile of degree m in dimension n >= 2.
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Parameter("dimension n must be >= 2".into()));
        }
        Ok(Self {
            m,
            n,
            norm_const: gauss_norm(n, m),
        })
    }

    /// S_m(r) for r in [0,1].
    pub fn value(&self, r: f64) -> Result<f64> {
        sigma_cached(self.n, self.m, 0, r * r)
    }

    /// d/dr S_m(r) = 2 r sigma_m'(r^2).
    pub fn derivative(&self, r: f64) -> Result<f64> {
        Ok(2.0 * r * sigma_cached(self.n, self.m, 1, r * r)?)
    }
}

/// Zonal harmonic Z_m(., eta) as an exact polynomial in (<x,eta>, |x|^2).
#[derive(Debug, Clone)]
pub struct ZonalPolynomial {
    /// Degree m.
    pub m: usize,
    /// Ambient dimension n.
    pub n: usize,
    /// Pole eta on the sphere.
    pub pole: SpherePoint,
    /// Coefficients b_0..b_{floor(m/2)} over <x,eta>^(m-2k) |x|^(2k).
    pub coeffs: Vec<f64>,
}

impl ZonalPolynomial {
    /// The reproducing kernel of H_m(S) with pole eta, extended by homogeneity.
    pub fn new(n: usize, m: usize, pole: SpherePoint) -> Result<Self> {
        if pole.dim() != n {
            return Err(Error::Parameter(
                "zonal pole dimension does not match n".into(),
            ));
        }
        Ok(Self {
            m,
            n,
            pole,
            coeffs: zonal_coeffs(n, m).as_ref().clone(),
        })
    }

    /// Polynomial evaluation at any point of R^n.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let s = dot(x, self.pole.coords());
        let u = dot(x, x);
        let mut val = 0.0;
        for (k, &b) in self.coeffs.iter().enumerate() {
            val += b * s.powi((self.m - 2 * k) as i32) * u.powi(k as i32);
        }
        val
    }

    /// Exact term-by-term gradient:
    /// grad(<x,eta>^a |x|^(2k)) = a <x,eta>^(a-1) |x|^(2k) eta
    ///                          + 2k <x,eta>^a |x|^(2k-2) x.
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let s = dot(x, self.pole.coords());
        let u = dot(x, x);
        let mut g = vec![0.0; self.n];
        for (k, &b) in self.coeffs.iter().enumerate() {
            let a = self.m - 2 * k;
            if a > 0 {
                let f = b * a as f64 * s.powi(a as i32 - 1) * u.powi(k as i32);
                for i in 0..self.n {
                    g[i] += f * self.pole.coords()[i];
                }
            }
            if k > 0 {
                let f = b * 2.0 * k as f64 * s.powi(a as i32) * u.powi(k as i32 - 1);
                for i in 0..self.n {
                    g[i] += f * x[i];
                }
            }
        }
        g
    }

    /// Evaluation at a ball point.
    pub fn eval_at(&self, x: &BallPoint) -> f64 {
        self.eval(x.coords())
    }
}
