//! Gauss–Jacobi node/weight generation via Golub–Welsch.
//!
//! Rules are produced on [0,1] for the weight (1-u)^a * u^b, which is the
//! form every radial integral in this crate takes after the substitution
//! u = r^2. The symmetric tridiagonal eigenproblem is solved with an
//! implicit-shift QL sweep that accumulates only the first row of the
//! eigenvector matrix, which is all the weights need.

use crate::error::{Error, Result};
use statrs::function::gamma::ln_gamma;

/// Nodes and weights of a positive quadrature rule on [0,1].
#[derive(Debug, Clone)]
pub struct QuadRule {
    /// Nodes in ascending order, strictly inside (0,1).
    pub nodes: Vec<f64>,
    /// Positive weights; their sum equals B(a+1, b+1).
    pub weights: Vec<f64>,
}

impl QuadRule {
    /// Apply the rule to a function of the node variable.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let vals: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&u, &w)| w * f(u))
            .collect();
        pairwise_sum(&vals)
    }
}

/// Gauss–Jacobi rule on [0,1] for the weight (1-u)^a * u^b.
///
/// Exact for polynomial factors of degree <= 2*order - 1. Requires
/// a > -1, b > -1 and order >= 1.
pub fn gauss_jacobi_01(order: usize, a: f64, b: f64) -> Result<QuadRule> {
    if order == 0 {
        return Err(Error::Parameter("quadrature order must be >= 1".into()));
    }
    if !(a > -1.0) || !(b > -1.0) {
        return Err(Error::Parameter(
            "Jacobi weight exponents must exceed -1".into(),
        ));
    }
    // Recurrence coefficients of the monic Jacobi polynomials on [-1,1]
    // with weight (1-x)^a (1+x)^b, in symmetric-tridiagonal form.
    let ab = a + b;
    let n = order;
    let mut diag = vec![0.0f64; n];
    let mut off = vec![0.0f64; n.saturating_sub(1)];
    diag[0] = (b - a) / (ab + 2.0);
    for k in 1..n {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        diag[k] = (b * b - a * a) / (s * (s + 2.0));
        let bk = if k == 1 {
            // (1+ab) cancels; this form avoids 0/0 when ab -> -1.
            4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab))
        } else {
            4.0 * kf * (kf + a) * (kf + b) * (kf + ab) / (s * s * (s + 1.0) * (s - 1.0))
        };
        off[k - 1] = bk.sqrt();
    }
    let mut z = vec![0.0f64; n];
    z[0] = 1.0;
    ql_implicit(&mut diag, &mut off, &mut z)?;

    // mu0 on [-1,1] is 2^(ab+1) B(a+1,b+1); mapping to [0,1] divides the
    // weights by the same power of two, so the beta value is used directly.
    let ln_beta = ln_gamma(a + 1.0) + ln_gamma(b + 1.0) - ln_gamma(ab + 2.0);
    let total = ln_beta.exp();

    let mut pairs: Vec<(f64, f64)> = diag
        .iter()
        .zip(&z)
        .map(|(&x, &zi)| (x, total * zi * zi))
        .collect();
    pairs.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());

    // Symmetric weights: pin the +/- node pairing exactly so that odd
    // integrands cancel at rounding level.
    if a == b {
        for i in 0..n / 2 {
            let t = 0.5 * (pairs[n - 1 - i].0 - pairs[i].0);
            let w = 0.5 * (pairs[n - 1 - i].1 + pairs[i].1);
            pairs[i] = (-t, w);
            pairs[n - 1 - i] = (t, w);
        }
        if n % 2 == 1 {
            pairs[n / 2].0 = 0.0;
        }
    }

    let nodes = pairs.iter().map(|p| 0.5 * (1.0 + p.0)).collect();
    let weights = pairs.iter().map(|p| p.1).collect();
    Ok(QuadRule { nodes, weights })
}

/// Gauss–Legendre nodes/weights on [-1,1] (Jacobi with a = b = 0), used by
/// the sphere product rules.
pub fn gauss_legendre_m11(order: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    gauss_gegenbauer_m11(order, 0.0)
}

/// Gauss rule on [-1,1] for the weight (1-t^2)^lambda.
pub fn gauss_gegenbauer_m11(order: usize, lambda: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let rule = gauss_jacobi_01(order, lambda, lambda)?;
    let nodes = rule.nodes.iter().map(|&u| 2.0 * u - 1.0).collect();
    // du = dx/2 and the weight picks up 2^(2*lambda); fold both in.
    let scale = (2.0f64).powf(2.0 * lambda + 1.0);
    let weights = rule.weights.iter().map(|&w| w * scale).collect();
    Ok((nodes, weights))
}

/// Implicit-shift QL for a symmetric tridiagonal matrix, updating `z` as the
/// first row of the accumulated orthogonal transform (Golub–Welsch).
fn ql_implicit(d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n == 1 {
        return Ok(());
    }
    let mut e = {
        let mut v = e.to_vec();
        v.push(0.0);
        v
    };
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(Error::Convergence(
                    "tridiagonal QL did not converge in 50 sweeps".into(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0f64;
            let mut c = 1.0f64;
            let mut p = 0.0f64;
            let mut deflated = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Deterministic pairwise (tree) summation.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1..=8 => v.iter().sum(),
        n => {
            let mid = n / 2;
            pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use statrs::function::gamma::ln_gamma;

    fn beta(a: f64, b: f64) -> f64 {
        (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp()
    }

    #[test]
    fn legendre_five_point_matches_reference() {
        let (x, w) = gauss_legendre_m11(5).unwrap();
        // Abramowitz & Stegun 25.4.30, 5-point values.
        let xr = [
            -0.906179845938664,
            -0.538469310105683,
            0.0,
            0.538469310105683,
            0.906179845938664,
        ];
        let wr = [
            0.236926885056189,
            0.478628670499366,
            0.568888888888889,
            0.478628670499366,
            0.236926885056189,
        ];
        for i in 0..5 {
            assert_abs_diff_eq!(x[i], xr[i], epsilon = 1e-14);
            assert_abs_diff_eq!(w[i], wr[i], epsilon = 1e-14);
        }
    }

    #[test]
    fn jacobi_total_weight_is_beta_function() {
        for &(a, b) in &[(0.0, 0.0), (-0.5, 0.5), (2.0, 1.5), (-0.999, 0.0), (3.0, -0.9)] {
            let rule = gauss_jacobi_01(24, a, b).unwrap();
            let total: f64 = rule.weights.iter().sum();
            assert_abs_diff_eq!(total, beta(a + 1.0, b + 1.0), epsilon = 1e-13 * total.abs());
        }
    }

    #[test]
    fn jacobi_moments_match_beta_integrals() {
        // integral_0^1 u^k (1-u)^a u^b du = B(a+1, b+k+1)
        let a = 1.25;
        let b = 0.5;
        let rule = gauss_jacobi_01(30, a, b).unwrap();
        for k in 0..20 {
            let val = rule.integrate(|u| u.powi(k));
            let exact = beta(a + 1.0, b + 1.0 + k as f64);
            // rounding is absolute at the scale of the total mass
            assert_abs_diff_eq!(val, exact, epsilon = 1e-13 * beta(a + 1.0, b + 1.0));
        }
    }

    #[test]
    fn high_order_rule_stays_sane() {
        let rule = gauss_jacobi_01(1064, 0.0, 0.5).unwrap();
        assert!(rule.nodes.windows(2).all(|p| p[0] < p[1]));
        assert!(rule.weights.iter().all(|&w| w > 0.0));
        let total: f64 = rule.weights.iter().sum();
        assert_abs_diff_eq!(total, beta(1.0, 1.5), epsilon = 1e-12);
        assert!(rule.nodes[0] > 0.0 && *rule.nodes.last().unwrap() < 1.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(gauss_jacobi_01(0, 0.0, 0.0).is_err());
        assert!(gauss_jacobi_01(4, -1.0, 0.0).is_err());
        assert!(gauss_jacobi_01(4, 0.0, -1.5).is_err());
    }
}
