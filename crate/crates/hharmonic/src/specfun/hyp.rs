//! Evaluation of the normalized radial profiles
//!
//!   sigma_m(u) = 2F1(m, 1-n/2; m+n/2; u) / 2F1(m, 1-n/2; m+n/2; 1)
//!
//! and their u-derivatives of any order. For even n the series terminates and
//! the profile is a polynomial in u. For odd n the direct power series is used
//! away from u = 1 and the integer-excess connection formula (the log form of
//! the Gauss relations, A&S 15.3.10/15.3.11) near u = 1, where the direct
//! series needs too many terms. The profile and all derivatives are smooth on
//! [0,1) and sigma_m(1) = 1 by normalization.

use crate::error::{Error, Result};
use statrs::function::gamma::{digamma, ln_gamma};
use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

/// Hard cap on power-series terms.
pub const SERIES_CAP: usize = 20_000;
/// Relative termination tolerance of the power series.
pub const SERIES_TOL: f64 = 1e-15;

/// ln |Gamma(x)| together with the sign of Gamma(x), for any non-pole x.
pub fn signed_ln_gamma(x: f64) -> (f64, f64) {
    if x > 0.0 {
        (ln_gamma(x), 1.0)
    } else {
        // Reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x).
        let s = (std::f64::consts::PI * x).sin();
        assert!(
            s != 0.0,
            "signed_ln_gamma called at a pole of Gamma: {x}"
        );
        let ln = std::f64::consts::PI.ln() - s.abs().ln() - ln_gamma(1.0 - x);
        (ln, s.signum())
    }
}

/// Rising factorial (x)_k.
pub fn pochhammer(x: f64, k: usize) -> f64 {
    let mut p = 1.0;
    for i in 0..k {
        p *= x + i as f64;
    }
    p
}

/// Normalization value 2F1(m, 1-n/2; m+n/2; 1) by Gauss's summation theorem:
/// Gamma(m+n/2) Gamma(n-1) / (Gamma(n/2) Gamma(m+n-1)).
pub fn gauss_norm(n: usize, m: usize) -> f64 {
    let h = n as f64 / 2.0;
    let mf = m as f64;
    (ln_gamma(mf + h) + ln_gamma(n as f64 - 1.0) - ln_gamma(h) - ln_gamma(mf + n as f64 - 1.0))
        .exp()
}

type SigmaCache = RwLock<HashMap<(u32, u32, u32, u64), f64>>;

fn sigma_cache() -> &'static SigmaCache {
    static CACHE: OnceLock<SigmaCache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// j-th u-derivative of sigma_m at u in [0,1], memoized.
///
/// Values repeat heavily across quadrature shells, so results are kept in a
/// process-wide map (the function is pure; racing inserts are benign).
pub fn sigma_cached(n: usize, m: usize, j: usize, u: f64) -> Result<f64> {
    let key = (n as u32, m as u32, j as u32, u.to_bits());
    if let Some(&v) = sigma_cache().read().unwrap().get(&key) {
        return Ok(v);
    }
    let v = sigma(n, m, j, u)?;
    sigma_cache().write().unwrap().insert(key, v);
    Ok(v)
}

/// j-th u-derivative of the normalized profile sigma_m at u in [0,1].
pub fn sigma(n: usize, m: usize, j: usize, u: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Parameter("dimension n must be >= 2".into()));
    }
    let u = if u > 1.0 && u < 1.0 + 1e-9 { 1.0 } else { u };
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::Domain(format!(
            "radial profile argument u = {u} outside [0,1]"
        )));
    }
    if m == 0 || n == 2 {
        // first series parameter 0, or second parameter 0: the profile is 1
        return Ok(if j == 0 { 1.0 } else { 0.0 });
    }
    if u == 1.0 && j == 0 {
        // S_m(1) = 1 by normalization.
        return Ok(1.0);
    }
    let b0 = 1.0 - n as f64 / 2.0;
    let c0 = m as f64 + n as f64 / 2.0;

    if n % 2 == 0 {
        return Ok(sigma_even(n, m, j, u));
    }

    // prefactor of the derivative: (m)_j (b0)_j / (c0)_j
    let pref = pochhammer(m as f64, j) * pochhammer(b0, j) / pochhammer(c0, j);
    let norm = gauss_norm(n, m);
    let a = m as f64 + j as f64;
    let b = b0 + j as f64;
    let c = c0 + j as f64;
    let excess = n as i64 - 1 - j as i64; // c - a - b

    if u == 1.0 {
        if excess < 1 {
            return Err(Error::Domain(format!(
                "derivative of order {j} of the radial profile diverges at r = 1 for n = {n}"
            )));
        }
        let f1 = (ln_gamma(c) + ln_gamma(excess as f64)
            - ln_gamma(n as f64 / 2.0)
            - ln_gamma(m as f64 + n as f64 - 1.0))
        .exp();
        return Ok(pref * f1 / norm);
    }

    let switch = u_switch(m);
    let f = if u < switch {
        hyp_series(a, b, c, u)?
    } else {
        hyp_near_one(a, b, c, excess, u)?
    };
    Ok(pref * f / norm)
}

/// Below this value of u the direct power series is used; above it the
/// connection formula. The split keeps the series under the term cap while
/// bounding the connection formula's internal term growth by about e^7.
fn u_switch(m: usize) -> f64 {
    (1.0 - 7.0 / (m as f64 + 1.0)).max(0.9)
}

/// Even dimensions: the 2F1 factor is a polynomial of degree n/2 - 1 in u.
fn sigma_even(n: usize, m: usize, j: usize, u: f64) -> f64 {
    let half = n / 2;
    let b0 = 1.0 - n as f64 / 2.0;
    let c0 = m as f64 + n as f64 / 2.0;
    // t_l = (m)_l (b0)_l / ((c0)_l l!)
    let mut t = vec![0.0f64; half];
    t[0] = 1.0;
    for l in 0..half - 1 {
        let lf = l as f64;
        t[l + 1] = t[l] * (m as f64 + lf) * (b0 + lf) / ((c0 + lf) * (lf + 1.0));
    }
    // normalizing by the coefficient sum keeps sigma(1) = 1 to rounding
    let norm: f64 = t.iter().sum();
    let mut val = 0.0;
    let mut upow = 1.0;
    for l in j..half {
        // differentiate term u^l j times: l!/(l-j)! u^(l-j)
        let mut fac = 1.0;
        for i in 0..j {
            fac *= (l - i) as f64;
        }
        val += t[l] * fac * upow;
        upow *= u;
    }
    val / norm
}

/// Plain power series of 2F1(a,b;c;u). For the profile family the terms are
/// single-signed after the first, so the relative stopping rule is safe.
fn hyp_series(a: f64, b: f64, c: f64, u: f64) -> Result<f64> {
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    for l in 0..SERIES_CAP {
        let lf = l as f64;
        term *= (a + lf) * (b + lf) / ((c + lf) * (lf + 1.0)) * u;
        sum += term;
        if term.abs() <= SERIES_TOL * sum.abs() {
            return Ok(sum);
        }
    }
    Err(Error::Convergence(format!(
        "2F1 series did not converge within {SERIES_CAP} terms at u = {u}"
    )))
}

/// 2F1(a,b;c;u) near u = 1 when c - a - b is an integer (`excess`), via the
/// logarithmic connection formula; negative excess is reduced by the Euler
/// transformation first.
fn hyp_near_one(a: f64, b: f64, c: f64, excess: i64, u: f64) -> Result<f64> {
    if excess < 0 {
        let w = 1.0 - u;
        let inner = hyp_log_form(c - a, c - b, c, (-excess) as usize, u)?;
        return Ok(w.powi(excess as i32) * inner);
    }
    hyp_log_form(a, b, c, excess as usize, u)
}

/// A&S 15.3.10/15.3.11: 2F1(a,b;a+b+L;z) expanded around z = 1, L >= 0.
fn hyp_log_form(a: f64, b: f64, c: f64, big_l: usize, u: f64) -> Result<f64> {
    let w = 1.0 - u;
    let lf = big_l as f64;

    // finite branch: Gamma(L)Gamma(c)/(Gamma(a+L)Gamma(b+L)) * sum_{s<L} ...
    let mut branch1 = 0.0;
    if big_l >= 1 {
        let scale = (ln_gamma(lf) + ln_gamma(c) - ln_gamma(a + lf) - ln_gamma(b + lf)).exp();
        let mut coef = 1.0f64; // (a)_s (b)_s / (s! (1-L)_s) w^s
        let mut s1 = 0.0;
        for s in 0..big_l {
            s1 += coef;
            let sf = s as f64;
            if s + 1 < big_l {
                coef *= (a + sf) * (b + sf) / ((sf + 1.0) * (1.0 - lf + sf)) * w;
            }
        }
        branch1 = scale * s1;
    }

    if w == 0.0 {
        if big_l == 0 {
            return Err(Error::Domain(
                "2F1 diverges at u = 1 for zero parameter excess".into(),
            ));
        }
        return Ok(branch1);
    }

    // log branch: -(-1)^L Gamma(c)/(Gamma(a)Gamma(b)) w^L
    //             * sum_s h_s [ln w - psi(s+1) - psi(s+L+1) + psi(a+L+s) + psi(b+L+s)] w^s
    let (ln_ga, sg_a) = signed_ln_gamma(a);
    let (ln_gb, sg_b) = signed_ln_gamma(b);
    let scale2 = (ln_gamma(c) - ln_ga - ln_gb).exp() * sg_a * sg_b;
    let sign = if big_l % 2 == 0 { -1.0 } else { 1.0 };
    let lnw = w.ln();
    let mut h = (-ln_gamma(lf + 1.0)).exp(); // 1/L!
    let mut psi_s1 = digamma(1.0);
    let mut psi_sl1 = digamma(lf + 1.0);
    let mut psi_al = digamma(a + lf);
    let mut psi_bl = digamma(b + lf);
    let mut wpow = 1.0f64;
    let mut s2 = 0.0f64;
    let mut converged = false;
    for s in 0..SERIES_CAP {
        let sf = s as f64;
        let bracket = lnw - psi_s1 - psi_sl1 + psi_al + psi_bl;
        let term = h * wpow * bracket;
        s2 += term;
        if s > 2 && h.abs() * wpow * (1.0 + bracket.abs()) <= 1e-17 * (s2.abs() + 1e-280) {
            converged = true;
            break;
        }
        h *= (a + lf + sf) * (b + lf + sf) / ((sf + 1.0) * (sf + lf + 1.0));
        wpow *= w;
        psi_s1 += 1.0 / (sf + 1.0);
        psi_sl1 += 1.0 / (sf + lf + 1.0);
        psi_al += 1.0 / (a + lf + sf);
        psi_bl += 1.0 / (b + lf + sf);
    }
    if !converged {
        return Err(Error::Convergence(format!(
            "2F1 connection series did not converge within {SERIES_CAP} terms at u = {u}"
        )));
    }
    Ok(branch1 + sign * scale2 * w.powi(big_l as i32) * s2)
}

/// Compare the direct series against the connection formula where both are
/// usable; diagnostic hook for accuracy measurements.
#[doc(hidden)]
pub fn probe_branches(n: usize, m: usize, j: usize, u: f64) -> Option<(f64, f64)> {
    let b0 = 1.0 - n as f64 / 2.0;
    let c0 = m as f64 + n as f64 / 2.0;
    let a = m as f64 + j as f64;
    let b = b0 + j as f64;
    let c = c0 + j as f64;
    let excess = n as i64 - 1 - j as i64;
    if u < u_switch(m) || u >= 1.0 {
        return None;
    }
    let direct = hyp_series(a, b, c, u).ok()?;
    let near = hyp_near_one(a, b, c, excess, u).ok()?;
    Some((near, direct))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn signed_ln_gamma_handles_negative_half_integers() {
        // Gamma(-1/2) = -2 sqrt(pi), Gamma(-3/2) = 4 sqrt(pi)/3
        let (ln, sg) = signed_ln_gamma(-0.5);
        assert_eq!(sg, -1.0);
        assert_abs_diff_eq!(ln.exp(), 2.0 * std::f64::consts::PI.sqrt(), epsilon = 1e-12);
        let (ln, sg) = signed_ln_gamma(-1.5);
        assert_eq!(sg, 1.0);
        assert_abs_diff_eq!(
            ln.exp(),
            4.0 * std::f64::consts::PI.sqrt() / 3.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn sigma_constant_for_n_two() {
        for m in [0usize, 1, 5, 40] {
            for &u in &[0.0, 0.3, 0.9, 1.0] {
                assert_eq!(sigma(2, m, 0, u).unwrap(), 1.0);
                assert_eq!(sigma(2, m, 1, u).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn sigma_matches_n4_closed_form() {
        // n = 4: S_m(r) = ((m+2) - m r^2)/2, so sigma(u) = ((m+2) - m u)/2.
        for m in 1..=20usize {
            for &u in &[0.0, 0.25, 0.64, 0.9991, 1.0] {
                let expect = ((m as f64 + 2.0) - m as f64 * u) / 2.0;
                assert_abs_diff_eq!(sigma(4, m, 0, u).unwrap(), expect, epsilon = 1e-13 * expect);
                assert_abs_diff_eq!(
                    sigma(4, m, 1, u).unwrap(),
                    -(m as f64) / 2.0,
                    epsilon = 1e-13 * m as f64
                );
                assert_eq!(sigma(4, m, 2, u).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn series_and_connection_formula_agree_for_odd_n() {
        // Both branches are valid in the overlap zone; they must agree.
        for &n in &[3usize, 5, 7] {
            for &m in &[1usize, 4, 17, 60, 250] {
                for j in 0..4usize {
                    for &u in &[0.76, 0.85, 0.93] {
                        if u >= u_switch(m) {
                            let b0 = 1.0 - n as f64 / 2.0;
                            let c0 = m as f64 + n as f64 / 2.0;
                            let a = m as f64 + j as f64;
                            let b = b0 + j as f64;
                            let c = c0 + j as f64;
                            let excess = n as i64 - 1 - j as i64;
                            let direct = hyp_series(a, b, c, u).unwrap();
                            let near = hyp_near_one(a, b, c, excess, u).unwrap();
                            assert_abs_diff_eq!(
                                near,
                                direct,
                                epsilon = 1e-10 * direct.abs().max(1e-30)
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn sigma_is_one_at_the_boundary() {
        for &n in &[3usize, 4, 5, 8] {
            for &m in &[1usize, 7, 33, 512] {
                assert_eq!(sigma(n, m, 0, 1.0).unwrap(), 1.0);
            }
        }
    }

    #[test]
    fn sigma_near_boundary_is_accurate_for_odd_n() {
        // sigma'(1) = -m/2 in u for every n, so sigma decreases to 1 as
        // u -> 1; check a one-sided difference quotient at very small 1-u,
        // where only the connection formula can deliver the value.
        for &m in &[5usize, 80, 400] {
            let w = 1e-6;
            let s = sigma(3, m, 0, 1.0 - w).unwrap();
            let slope = (s - 1.0) / w;
            assert_abs_diff_eq!(slope, m as f64 / 2.0, epsilon = 2e-5 * (m as f64).powi(2));
        }
    }

    #[test]
    fn sigma_derivative_is_consistent_with_differences() {
        for &(n, m) in &[(3usize, 6usize), (5, 11), (4, 9), (7, 3)] {
            for &u in &[0.2, 0.6, 0.88] {
                let h = 1e-6;
                let fd = (sigma(n, m, 0, u + h).unwrap() - sigma(n, m, 0, u - h).unwrap())
                    / (2.0 * h);
                let an = sigma(n, m, 1, u).unwrap();
                assert_abs_diff_eq!(fd, an, epsilon = 1e-6 * an.abs().max(1.0));
            }
        }
    }
}
