//! Truncated H-harmonic expansions and their exact differential operators.
//!
//! A function is stored blockwise as f = sum_m S_m(|x|) f_m(x) with f_m a
//! harmonic polynomial of degree m. Every block term is kept in the closed
//! atom basis
//!
//!     sigma_m^(sig)(u) * u^e * G_m^(p,q)(<x,eta>, u) * x^gamma,   u = |x|^2,
//!
//! where G_m(s,u) = sum_k b_k s^(m-2k) u^k is the zonal polynomial of the pole
//! eta in its two natural variables and G^(p,q) are its mixed partials. The
//! basis is closed under d/dx_i, the radial derivative N and the tangential
//! derivatives T_{i,j}, so all operators of the theory are exact coefficient
//! algebra; evaluation goes through Gegenbauer recurrences and stays stable at
//! any block degree.

use crate::error::{Error, Result};
use crate::geometry::{dot, BallPoint, SpherePoint};
use crate::specfun::{sigma_cached, zonal_coeffs, zonal_deriv_seq, zonal_deriv_seq_into};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

/// Largest supported total order of a partial-derivative multi-index.
pub const MAX_PARTIAL_ORDER: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct AtomKey {
    pole: u16,
    #[allow(dead_code)]
    sig: u8,
    p: u8,
    q: u8,
    e: u8,
    gamma: Vec<u8>,
}

impl AtomKey {
    fn zonal(pole: u16, n: usize) -> Self {
        AtomKey {
            pole,
            sig: 0,
            p: 0,
            q: 0,
            e: 0,
            gamma: vec![0; n],
        }
    }

    fn is_plain_zonal(&self) -> bool {
        self.sig == 0 && self.p == 0 && self.q == 0 && self.e == 0
            && self.gamma.iter().all(|&g| g == 0)
    }
}

// small tau-polynomial helpers for the u-derivative ladder
fn poly_acc(dst: &mut Vec<f64>, src: &[f64]) {
    if dst.len() < src.len() {
        dst.resize(src.len(), 0.0);
    }
    for (d, s) in dst.iter_mut().zip(src) {
        *d += s;
    }
}

fn poly_scale(p: &[f64], f: f64) -> Vec<f64> {
    p.iter().map(|c| c * f).collect()
}

fn poly_dtau(p: &[f64]) -> Vec<f64> {
    if p.len() <= 1 {
        return Vec::new();
    }
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| k as f64 * c)
        .collect()
}

fn poly_shift_tau(p: &[f64]) -> Vec<f64> {
    if p.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(p.len() + 1);
    out.push(0.0);
    out.extend_from_slice(p);
    out
}

fn poly_eval(p: &[f64], t: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

#[derive(Debug, Clone, Default)]
struct Block {
    poles: Vec<SpherePoint>,
    terms: BTreeMap<AtomKey, f64>,
}

impl Block {
    fn pole_index(&mut self, eta: &SpherePoint) -> u16 {
        if let Some(i) = self.poles.iter().position(|p| p == eta) {
            return i as u16;
        }
        self.poles.push(eta.clone());
        (self.poles.len() - 1) as u16
    }

    fn add_term(&mut self, key: AtomKey, c: f64) {
        if c == 0.0 {
            return;
        }
        let slot = self.terms.entry(key).or_insert(0.0);
        *slot += c;
        if *slot == 0.0 {
            // keep maps tidy; exact cancellations happen in T-algebra
        }
    }

    fn scaled(&self, f: f64) -> Block {
        Block {
            poles: self.poles.clone(),
            terms: self.terms.iter().map(|(k, &c)| (k.clone(), c * f)).collect(),
        }
    }

    fn merge_from(&mut self, other: &Block) {
        let remap: Vec<u16> = other
            .poles
            .iter()
            .map(|p| self.pole_index(p))
            .collect();
        for (k, &c) in &other.terms {
            let mut key = k.clone();
            key.pole = remap[k.pole as usize];
            self.add_term(key, c);
        }
    }

    fn is_zonal_pure(&self) -> bool {
        self.terms.keys().all(|k| k.is_plain_zonal())
    }

    /// d/dx_i in the atom algebra; `m` is the block degree.
    fn partial(&self, m: usize, i: usize) -> Block {
        let mut out = Block {
            poles: self.poles.clone(),
            terms: BTreeMap::new(),
        };
        for (k, &c) in &self.terms {
            let eta_i = self.poles[k.pole as usize].coords()[i];
            // radial chain: 2 x_i sigma^(sig+1)
            let mut k1 = k.clone();
            k1.sig += 1;
            k1.gamma[i] += 1;
            out.add_term(k1, 2.0 * c);
            if k.e > 0 {
                let mut k2 = k.clone();
                k2.e -= 1;
                k2.gamma[i] += 1;
                out.add_term(k2, 2.0 * k.e as f64 * c);
            }
            if (k.p as usize + 1) + 2 * k.q as usize <= m {
                let mut k3 = k.clone();
                k3.p += 1;
                out.add_term(k3, c * eta_i);
            }
            if k.p as usize + 2 * (k.q as usize + 1) <= m {
                let mut k4 = k.clone();
                k4.q += 1;
                k4.gamma[i] += 1;
                out.add_term(k4, 2.0 * c);
            }
            if k.gamma[i] > 0 {
                let mut k5 = k.clone();
                k5.gamma[i] -= 1;
                out.add_term(k5, c * k.gamma[i] as f64);
            }
        }
        out
    }

    /// N = <x, grad>; exact because every factor is homogeneous.
    fn normal(&self, m: usize) -> Block {
        let mut out = Block {
            poles: self.poles.clone(),
            terms: BTreeMap::new(),
        };
        for (k, &c) in &self.terms {
            let mut k1 = k.clone();
            k1.sig += 1;
            k1.e += 1;
            out.add_term(k1, 2.0 * c);
            let gsum: usize = k.gamma.iter().map(|&g| g as usize).sum();
            let deg = 2.0 * k.e as f64 + (m - k.p as usize - 2 * k.q as usize) as f64
                + gsum as f64;
            out.add_term(k.clone(), c * deg);
        }
        out
    }

    /// T_{i,l} = x_i d_l - x_l d_i; kills every radial factor.
    fn tangential(&self, m: usize, i: usize, l: usize) -> Block {
        let mut out = Block {
            poles: self.poles.clone(),
            terms: BTreeMap::new(),
        };
        for (k, &c) in &self.terms {
            let eta = &self.poles[k.pole as usize];
            if (k.p as usize + 1) + 2 * k.q as usize <= m {
                let mut ka = k.clone();
                ka.p += 1;
                ka.gamma[i] += 1;
                out.add_term(ka, c * eta.coords()[l]);
                let mut kb = k.clone();
                kb.p += 1;
                kb.gamma[l] += 1;
                out.add_term(kb, -c * eta.coords()[i]);
            }
            if k.gamma[l] > 0 {
                let mut kc = k.clone();
                kc.gamma[l] -= 1;
                kc.gamma[i] += 1;
                out.add_term(kc, c * k.gamma[l] as f64);
            }
            if k.gamma[i] > 0 {
                let mut kd = k.clone();
                kd.gamma[i] -= 1;
                kd.gamma[l] += 1;
                out.add_term(kd, -c * k.gamma[i] as f64);
            }
        }
        out
    }

    fn eval(&self, n: usize, m: usize, x: &[f64], u: f64, r: f64) -> Result<f64> {
        if u == 0.0 {
            let mut val = 0.0;
            for (k, &c) in &self.terms {
                if k.e != 0 || k.gamma.iter().any(|&g| g > 0) {
                    continue;
                }
                if k.p as usize + 2 * k.q as usize != m {
                    continue;
                }
                let sig_v = sigma_cached(n, m, k.sig as usize, 0.0)?;
                let bq = zonal_coeffs(n, m)[k.q as usize];
                let mut fac = 1.0;
                for t in 1..=k.p as usize {
                    fac *= t as f64;
                }
                for t in 1..=k.q as usize {
                    fac *= t as f64;
                }
                val += c * sig_v * bq * fac;
            }
            return Ok(val);
        }
        let mut zhat: HashMap<(u16, u8), f64> = HashMap::new();
        let mut val = 0.0;
        for (k, &c) in &self.terms {
            let sig_v = sigma_cached(n, m, k.sig as usize, u)?;
            if sig_v == 0.0 {
                continue;
            }
            let pole = &self.poles[k.pole as usize];
            let t = (dot(x, pole.coords()) / r).clamp(-1.0, 1.0);
            let p = k.p as usize;
            let q = k.q as usize;
            let mpq = m - p - 2 * q;
            // u-derivative ladder of G over Zhat^(p..p+q), with tau-polynomial
            // coefficients: d/du (u^A c(tau) Zhat^(D)) =
            // u^(A-1) [A c Zhat^(D) - (tau/2) c' Zhat^(D) - (tau/2) c Zhat^(D+1)]
            // since du(tau) = -tau/(2u).
            let v = g_ladder(m, p, q);
            let mut g = 0.0;
            for (d, cd) in v.iter().enumerate() {
                let cval = poly_eval(cd, t);
                if cval == 0.0 {
                    continue;
                }
                let dd = (p + d) as u8;
                let z = *zhat.entry((k.pole, dd)).or_insert_with(|| {
                    zonal_deriv_seq(n, (p + d) as usize, t, m)[m]
                });
                g += cval * z;
            }
            g *= r.powi(mpq as i32);
            let mut xg = 1.0;
            for (i, &gi) in k.gamma.iter().enumerate() {
                for _ in 0..gi {
                    xg *= x[i];
                }
            }
            val += c * sig_v * u.powi(k.e as i32) * g * xg;
        }
        Ok(val)
    }
}

/// Finite H-harmonic expansion sum_m S_m(|x|) f_m(x).
#[derive(Debug, Clone)]
pub struct HHarmonicFunction {
    n: usize,
    blocks: BTreeMap<usize, Block>,
}

/// Image of an expansion under normal or partial derivatives; no longer
/// H-harmonic, but still exactly evaluable on the open ball.
#[derive(Debug, Clone)]
pub struct DerivedField {
    n: usize,
    blocks: BTreeMap<usize, Block>,
}

fn eval_blocks(n: usize, blocks: &BTreeMap<usize, Block>, x: &[f64]) -> Result<f64> {
    let u: f64 = dot(x, x);
    if u >= 1.0 {
        return Err(Error::Domain(
            "expansion evaluation requires an interior point".into(),
        ));
    }
    let r = u.sqrt();
    let mut total = 0.0;
    for (&m, block) in blocks {
        total += block.eval(n, m, x, u, r)?;
    }
    Ok(total)
}

impl HHarmonicFunction {
    /// The zero function in dimension n.
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Parameter("dimension n must be >= 2".into()));
        }
        Ok(Self {
            n,
            blocks: BTreeMap::new(),
        })
    }

    /// The constant function c.
    pub fn constant(n: usize, c: f64) -> Result<Self> {
        let mut f = Self::new(n)?;
        f.add_zonal_term(0, c, &SpherePoint::axis(n, 0))?;
        Ok(f)
    }

    /// Add a * Z_m(., eta) to the degree-m block.
    pub fn add_zonal_term(&mut self, m: usize, a: f64, eta: &SpherePoint) -> Result<()> {
        if eta.dim() != self.n {
            return Err(Error::Parameter(
                "pole dimension does not match the expansion".into(),
            ));
        }
        let n = self.n;
        let block = self.blocks.entry(m).or_default();
        let idx = block.pole_index(eta);
        block.add_term(AtomKey::zonal(idx, n), a);
        Ok(())
    }

    /// Ambient dimension.
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Largest degree with a stored block.
    pub fn max_degree(&self) -> usize {
        self.blocks.keys().next_back().copied().unwrap_or(0)
    }

    /// Degrees of the stored blocks.
    pub fn degrees(&self) -> Vec<usize> {
        self.blocks.keys().copied().collect()
    }

    /// True if no nonzero coefficient is stored.
    pub fn is_zero(&self) -> bool {
        self.blocks.values().all(|b| b.terms.values().all(|&c| c == 0.0))
    }

    /// Pointwise evaluation at an interior point.
    pub fn eval(&self, x: &BallPoint) -> Result<f64> {
        eval_blocks(self.n, &self.blocks, x.coords())
    }

    /// Value at the origin (the m = 0 coefficient total).
    pub fn eval_origin(&self) -> Result<f64> {
        eval_blocks(self.n, &self.blocks, &vec![0.0; self.n])
    }

    /// Tangential derivative T_{i,l} = x_i d_l - x_l d_i (0-based, i < l < n);
    /// the result is again H-harmonic with unchanged block degrees.
    pub fn tangential(&self, i: usize, l: usize) -> Result<Self> {
        if !(i < l && l < self.n) {
            return Err(Error::Parameter(
                "tangential indices must satisfy i < l < n".into(),
            ));
        }
        let blocks = self
            .blocks
            .iter()
            .map(|(&m, b)| (m, b.tangential(m, i, l)))
            .collect();
        Ok(Self { n: self.n, blocks })
    }

    /// Composition T_{i_1,l_1} o ... o T_{i_k,l_k}, applied right to left.
    pub fn tangential_chain(&self, ops: &[(usize, usize)]) -> Result<Self> {
        let mut f = self.clone();
        for &(i, l) in ops.iter().rev() {
            f = f.tangential(i, l)?;
        }
        Ok(f)
    }

    /// Spherical Laplacian sum_{i<l} T_{i,l}^2; block-diagonal with
    /// eigenvalue -m(m+n-2) on each degree block.
    pub fn spherical_laplacian(&self) -> Result<Self> {
        let mut out = Self::new(self.n)?;
        for i in 0..self.n {
            for l in i + 1..self.n {
                let tt = self.tangential(i, l)?.tangential(i, l)?;
                out.add_in_place(&tt);
            }
        }
        Ok(out)
    }

    /// Radial derivative N f = <x, grad f> as a derived field.
    pub fn normal(&self) -> DerivedField {
        DerivedField::from_function(self).normal()
    }

    /// k-fold radial derivative N^k f.
    pub fn normal_k(&self, k: usize) -> DerivedField {
        let mut d = DerivedField::from_function(self);
        for _ in 0..k {
            d = d.normal();
        }
        d
    }

    /// Partial derivative for a multi-index kappa (length n, |kappa| <= 6).
    pub fn partial(&self, kappa: &[usize]) -> Result<DerivedField> {
        if kappa.len() != self.n {
            return Err(Error::Parameter(
                "multi-index length must equal the dimension".into(),
            ));
        }
        let order: usize = kappa.iter().sum();
        if order > MAX_PARTIAL_ORDER {
            return Err(Error::Parameter(format!(
                "partial derivative order {order} exceeds the supported cap {MAX_PARTIAL_ORDER}"
            )));
        }
        let mut d = DerivedField::from_function(self);
        for (i, &ki) in kappa.iter().enumerate() {
            for _ in 0..ki {
                d = d.partial_i(i);
            }
        }
        Ok(d)
    }

    /// Exact gradient at a point.
    pub fn gradient(&self, x: &BallPoint) -> Result<Vec<f64>> {
        self.gradient_fields()
            .iter()
            .map(|d| d.eval(x))
            .collect()
    }

    /// The n partial-derivative fields, reusable over many points.
    pub fn gradient_fields(&self) -> Vec<DerivedField> {
        (0..self.n)
            .map(|i| DerivedField::from_function(self).partial_i(i))
            .collect()
    }

    /// Blockwise coefficient scaling (the multiplier operators act here).
    pub fn scale_blocks<F: Fn(usize) -> f64>(&self, factor: F) -> Self {
        let blocks = self
            .blocks
            .iter()
            .map(|(&m, b)| (m, b.scaled(factor(m))))
            .collect();
        Self { n: self.n, blocks }
    }

    /// Add another expansion in place.
    pub fn add_in_place(&mut self, other: &Self) {
        assert_eq!(self.n, other.n, "dimension mismatch in expansion sum");
        for (&m, b) in &other.blocks {
            self.blocks.entry(m).or_default().merge_from(b);
        }
    }

    /// The zonal terms (a, pole) of a degree block, if the block is stored in
    /// pure pole form.
    pub fn zonal_terms(&self, m: usize) -> Option<Vec<(f64, SpherePoint)>> {
        let block = self.blocks.get(&m)?;
        if !block.is_zonal_pure() {
            return None;
        }
        Some(
            block
                .terms
                .iter()
                .map(|(k, &c)| (c, block.poles[k.pole as usize].clone()))
                .collect(),
        )
    }

    /// True when every block is a plain sum of zonal terms.
    pub fn is_zonal_pure(&self) -> bool {
        self.blocks.values().all(|b| b.is_zonal_pure())
    }

    /// Evaluate the harmonic block polynomial f_m alone (no radial factor).
    pub fn eval_block_polynomial(&self, m: usize, x: &[f64]) -> Result<f64> {
        match self.blocks.get(&m) {
            None => Ok(0.0),
            Some(block) => {
                // strip the radial profile by evaluating with sigma == 1:
                // block polynomials have sig == 0 only when zonal-pure; for
                // general blocks sig is still 0 because only N/partial raise it.
                let u = dot(x, x);
                let r = u.sqrt();
                debug_assert!(block.terms.keys().all(|k| k.sig == 0));
                if u == 0.0 {
                    return block.eval(self.n, m, x, 0.0, 0.0);
                }
                block.eval(self.n, m, x, u, r).and_then(|v| {
                    let s = sigma_cached(self.n, m, 0, u)?;
                    Ok(v / s)
                })
            }
        }
    }

    /// Largest absolute coefficient difference against another expansion with
    /// the same structure; infinite if the structures differ.
    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        if self.n != other.n {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        let degrees: std::collections::BTreeSet<usize> = self
            .blocks
            .keys()
            .chain(other.blocks.keys())
            .copied()
            .collect();
        for m in degrees {
            match (self.blocks.get(&m), other.blocks.get(&m)) {
                (Some(a), Some(b)) => {
                    let keys: std::collections::BTreeSet<&AtomKey> =
                        a.terms.keys().chain(b.terms.keys()).collect();
                    for k in keys {
                        let ca = a.terms.get(k).copied().unwrap_or(0.0);
                        let cb = b.terms.get(k).copied().unwrap_or(0.0);
                        worst = worst.max((ca - cb).abs());
                    }
                }
                (Some(a), None) => {
                    for &c in a.terms.values() {
                        worst = worst.max(c.abs());
                    }
                }
                (None, Some(b)) => {
                    for &c in b.terms.values() {
                        worst = worst.max(c.abs());
                    }
                }
                (None, None) => {}
            }
        }
        worst
    }

    /// Largest absolute coefficient.
    pub fn max_coeff_abs(&self) -> f64 {
        self.blocks
            .values()
            .flat_map(|b| b.terms.values())
            .fold(0.0f64, |acc, &c| acc.max(c.abs()))
    }

    /// Serialize to the document form (pole-form blocks only).
    pub fn to_document(&self) -> Result<ExpansionDoc> {
        let mut blocks = Vec::new();
        for (&m, block) in &self.blocks {
            if !block.is_zonal_pure() {
                return Err(Error::Parameter(
                    "only pole-form expansions are serializable".into(),
                ));
            }
            let terms = block
                .terms
                .iter()
                .map(|(k, &c)| TermDoc {
                    a: c,
                    pole: block.poles[k.pole as usize].coords().to_vec(),
                })
                .collect();
            blocks.push(BlockDoc { m, terms });
        }
        Ok(ExpansionDoc { n: self.n, blocks })
    }

    /// Rebuild from the document form.
    pub fn from_document(doc: &ExpansionDoc) -> Result<Self> {
        let mut f = Self::new(doc.n)?;
        for b in &doc.blocks {
            for t in &b.terms {
                f.add_zonal_term(b.m, t.a, &SpherePoint::new(t.pole.clone())?)?;
            }
        }
        Ok(f)
    }

    /// JSON serialization (bit-exact float round-trip).
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(&self.to_document()?)
            .map_err(|e| Error::Parameter(format!("serialization failed: {e}")))
    }

    /// JSON deserialization.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ExpansionDoc = serde_json::from_str(text)
            .map_err(|e| Error::Parameter(format!("deserialization failed: {e}")))?;
        Self::from_document(&doc)
    }
}

impl DerivedField {
    /// View an H-harmonic expansion as a derived field of order zero.
    pub fn from_function(f: &HHarmonicFunction) -> Self {
        Self {
            n: f.n,
            blocks: f.blocks.clone(),
        }
    }

    /// Ambient dimension.
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Pointwise evaluation.
    pub fn eval(&self, x: &BallPoint) -> Result<f64> {
        eval_blocks(self.n, &self.blocks, x.coords())
    }

    /// Value at the origin.
    pub fn eval_origin(&self) -> Result<f64> {
        eval_blocks(self.n, &self.blocks, &vec![0.0; self.n])
    }

    /// Radial derivative N.
    pub fn normal(&self) -> Self {
        let blocks = self
            .blocks
            .iter()
            .map(|(&m, b)| (m, b.normal(m)))
            .collect();
        Self { n: self.n, blocks }
    }

    /// Single partial derivative d/dx_i.
    pub fn partial_i(&self, i: usize) -> Self {
        let blocks = self
            .blocks
            .iter()
            .map(|(&m, b)| (m, b.partial(m, i)))
            .collect();
        Self { n: self.n, blocks }
    }

    /// Tangential derivative T_{i,l} on a derived field.
    pub fn tangential(&self, i: usize, l: usize) -> Result<Self> {
        if !(i < l && l < self.n) {
            return Err(Error::Parameter(
                "tangential indices must satisfy i < l < n".into(),
            ));
        }
        let blocks = self
            .blocks
            .iter()
            .map(|(&m, b)| (m, b.tangential(m, i, l)))
            .collect();
        Ok(Self { n: self.n, blocks })
    }
}

#[derive(Debug, Clone)]
struct FlatTerm {
    m: usize,
    pole: u32,
    p: u8,
    q: u8,
    e: u8,
    gamma: Vec<u8>,
    gamma_total: u32,
    coeff: f64,
    sigma_slot: u32,
    /// tau-polynomial coefficients of the u-derivative ladder (q > 0 only).
    ladder: Option<Vec<Vec<f64>>>,
}

/// The u-derivative ladder of G^(p,q) as tau-polynomial coefficients over
/// the derivative offsets d = 0..=q.
fn g_ladder(m: usize, p: usize, q: usize) -> Vec<Vec<f64>> {
    let mut v: Vec<Vec<f64>> = vec![vec![1.0]];
    for step in 0..q {
        let a = (m as f64 - p as f64) / 2.0 - step as f64;
        let mut next: Vec<Vec<f64>> = vec![Vec::new(); step + 2];
        for (d, cd) in v.iter().enumerate() {
            poly_acc(&mut next[d], &poly_scale(cd, a));
            poly_acc(&mut next[d], &poly_scale(&poly_shift_tau(&poly_dtau(cd)), -0.5));
            poly_acc(&mut next[d + 1], &poly_scale(&poly_shift_tau(cd), -0.5));
        }
        v = next;
    }
    v
}

#[derive(Debug, Clone)]
struct PoleCtx {
    coords: Vec<f64>,
    max_d: usize,
    max_m: usize,
}

/// Flattened evaluator for repeated pointwise evaluation over quadrature
/// grids. Radial profile values are refreshed once per shell (|x| constant
/// along product-rule sphere sweeps) and zonal recurrences run once per
/// (pole, derivative order) per point instead of once per block.
#[derive(Debug, Clone)]
pub struct Evaluator {
    n: usize,
    terms: Vec<FlatTerm>,
    poles: Vec<PoleCtx>,
    sigma_keys: Vec<(usize, u8)>,
    sigma_vals: Vec<f64>,
    current_u: Option<u64>,
    zd: Vec<Vec<Vec<f64>>>,
}

fn build_evaluator(n: usize, blocks: &BTreeMap<usize, Block>) -> Evaluator {
    let mut poles: Vec<PoleCtx> = Vec::new();
    let mut sigma_keys: Vec<(usize, u8)> = Vec::new();
    let mut terms = Vec::new();
    for (&m, block) in blocks {
        for (k, &c) in &block.terms {
            if c == 0.0 {
                continue;
            }
            let coords = block.poles[k.pole as usize].coords();
            let pole_idx = match poles.iter().position(|pc| pc.coords == coords) {
                Some(i) => i,
                None => {
                    poles.push(PoleCtx {
                        coords: coords.to_vec(),
                        max_d: 0,
                        max_m: 0,
                    });
                    poles.len() - 1
                }
            };
            let need_d = k.p as usize + k.q as usize;
            poles[pole_idx].max_d = poles[pole_idx].max_d.max(need_d);
            poles[pole_idx].max_m = poles[pole_idx].max_m.max(m);
            let skey = (m, k.sig);
            let sigma_slot = match sigma_keys.iter().position(|&s| s == skey) {
                Some(i) => i,
                None => {
                    sigma_keys.push(skey);
                    sigma_keys.len() - 1
                }
            };
            terms.push(FlatTerm {
                m,
                pole: pole_idx as u32,
                p: k.p,
                q: k.q,
                e: k.e,
                gamma: k.gamma.clone(),
                gamma_total: k.gamma.iter().map(|&g| g as u32).sum(),
                coeff: c,
                sigma_slot: sigma_slot as u32,
                ladder: if k.q > 0 {
                    Some(g_ladder(m, k.p as usize, k.q as usize))
                } else {
                    None
                },
            });
        }
    }
    let zd = poles
        .iter()
        .map(|pc| vec![Vec::new(); pc.max_d + 1])
        .collect();
    let n_sigma = sigma_keys.len();
    Evaluator {
        n,
        terms,
        poles,
        sigma_keys,
        sigma_vals: vec![0.0; n_sigma],
        current_u: None,
        zd,
    }
}

impl Evaluator {
    /// Evaluate at an interior point given by coordinates.
    pub fn eval(&mut self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n {
            return Err(Error::Parameter("evaluation dimension mismatch".into()));
        }
        let u: f64 = dot(x, x);
        if u >= 1.0 {
            return Err(Error::Domain(
                "expansion evaluation requires an interior point".into(),
            ));
        }
        if self.current_u != Some(u.to_bits()) {
            for (slot, &(m, sig)) in self.sigma_keys.iter().enumerate() {
                self.sigma_vals[slot] = sigma_cached(self.n, m, sig as usize, u)?;
            }
            self.current_u = Some(u.to_bits());
        }
        if u == 0.0 {
            return self.eval_origin_flat();
        }
        let r = u.sqrt();
        for (pi, pc) in self.poles.iter().enumerate() {
            let t = (dot(x, &pc.coords) / r).clamp(-1.0, 1.0);
            for d in 0..=pc.max_d {
                zonal_deriv_seq_into(self.n, d, t, pc.max_m, &mut self.zd[pi][d]);
            }
        }
        let mut total = 0.0;
        for term in &self.terms {
            let sig_v = self.sigma_vals[term.sigma_slot as usize];
            if sig_v == 0.0 {
                continue;
            }
            let p = term.p as usize;
            let q = term.q as usize;
            let pi = term.pole as usize;
            let mpq = term.m - p - 2 * q;
            let g = if q == 0 {
                self.zd[pi][p][term.m] * r.powi(mpq as i32)
            } else {
                let t = (dot(x, &self.poles[pi].coords) / r).clamp(-1.0, 1.0);
                let mut acc = 0.0;
                for (d, cd) in term.ladder.as_ref().unwrap().iter().enumerate() {
                    acc += poly_eval(cd, t) * self.zd[pi][p + d][term.m];
                }
                acc * r.powi(mpq as i32)
            };
            let mut xg = 1.0;
            if term.gamma_total > 0 {
                for (i, &gi) in term.gamma.iter().enumerate() {
                    for _ in 0..gi {
                        xg *= x[i];
                    }
                }
            }
            total += term.coeff * sig_v * u.powi(term.e as i32) * g * xg;
        }
        Ok(total)
    }

    fn eval_origin_flat(&self) -> Result<f64> {
        let mut val = 0.0;
        for term in &self.terms {
            if term.e != 0 || term.gamma_total > 0 {
                continue;
            }
            if term.p as usize + 2 * term.q as usize != term.m {
                continue;
            }
            let sig_v = self.sigma_vals[term.sigma_slot as usize];
            let bq = zonal_coeffs(self.n, term.m)[term.q as usize];
            let mut fac = 1.0;
            for t in 1..=term.p as usize {
                fac *= t as f64;
            }
            for t in 1..=term.q as usize {
                fac *= t as f64;
            }
            val += term.coeff * sig_v * bq * fac;
        }
        Ok(val)
    }
}

impl HHarmonicFunction {
    /// Flattened evaluator for quadrature sweeps.
    pub fn evaluator(&self) -> Evaluator {
        build_evaluator(self.n, &self.blocks)
    }
}

impl DerivedField {
    /// Flattened evaluator for quadrature sweeps.
    pub fn evaluator(&self) -> Evaluator {
        build_evaluator(self.n, &self.blocks)
    }
}

/// JSON document form of an expansion:
/// { "n": int, "blocks": [ { "m": int, "terms": [ {"a": float, "pole": [floats]} ] } ] }
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExpansionDoc {
    /// Ambient dimension.
    pub n: usize,
    /// Degree blocks in ascending order.
    pub blocks: Vec<BlockDoc>,
}

/// One degree block of the document form.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockDoc {
    /// Block degree.
    pub m: usize,
    /// Zonal terms a * Z_m(., pole).
    pub terms: Vec<TermDoc>,
}

/// One zonal term of the document form.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermDoc {
    /// Coefficient.
    pub a: f64,
    /// Pole coordinates (unit vector).
    pub pole: Vec<f64>,
}

/// Reproducible random expansion: degrees 0..=max_degree, one term per degree
/// with coefficient uniform in [-1,1] and pole uniform on the sphere.
pub fn random_function<R: Rng>(
    rng: &mut R,
    n: usize,
    max_degree: usize,
    terms_per_degree: usize,
) -> Result<HHarmonicFunction> {
    let mut f = HHarmonicFunction::new(n)?;
    for m in 0..=max_degree {
        for _ in 0..terms_per_degree.max(1) {
            let a: f64 = rng.gen_range(-1.0..1.0);
            let dir: Vec<f64> = (0..n)
                .map(|_| {
                    // Box-Muller keeps the dependency surface small.
                    let u1: f64 = rng.gen_range(1e-12..1.0);
                    let u2: f64 = rng.gen_range(0.0..1.0);
                    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
                })
                .collect();
            f.add_zonal_term(m, a, &SpherePoint::from_direction(&dir)?)?;
        }
    }
    Ok(f)
}
