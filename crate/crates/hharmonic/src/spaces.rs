//! Bergman-Besov norms in all five characterizations, the exact B^2 inner
//! product, the Bloch seminorm, and norm-equivalence reports.
//!
//! In the Besov zone (alpha <= -1) no norm ever integrates |f|^p against the
//! infinite measure directly; every route passes through derivatives or
//! coefficient multipliers, shifting the weight into the finite zone first.

use crate::error::{Error, Result};
use crate::expansion::HHarmonicFunction;
use crate::geometry::dot;
use crate::integrate::{BallRule, SphereRule};
use crate::kernels::{apply_dst, family};
use crate::quad::pairwise_sum;
use crate::specfun::zonal_seq;
use serde::Serialize;

/// Which of the equivalent norm expressions to evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Characterization {
    /// (integral |f|^p dnu_alpha)^(1/p); Bergman zone only.
    Direct,
    /// ||D^t_s f|| in L^p_{alpha+pt}.
    Dst {
        /// Base parameter of the multiplier.
        s: f64,
        /// Order parameter; needs alpha + p t > -1.
        t: f64,
    },
    /// sum over all order-k tangential chains of ||T^k f|| + |f(0)|.
    Tangential {
        /// Derivative order; needs alpha + p k > -1.
        k: usize,
    },
    /// ||N^k f|| + |f(0)|.
    Normal {
        /// Derivative order; needs alpha + p k > -1.
        k: usize,
    },
    /// sum_{|kappa|=k} ||d^kappa f|| + sum_{|kappa|<=k-1} |d^kappa f(0)|.
    Partial {
        /// Derivative order; needs alpha + p k > -1.
        k: usize,
    },
}

/// Quadrature resolution used by a norm evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    /// Radial Gauss-Jacobi order.
    pub radial_order: usize,
    /// Sphere rule exactness degree.
    pub sphere_degree: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            radial_order: 48,
            sphere_degree: 40,
        }
    }
}

/// A fully specified norm: exponent, weight, characterization, resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct NormSpec {
    /// Integrability exponent, 1 <= p < infinity.
    pub p: f64,
    /// Weight parameter (any real).
    pub alpha: f64,
    /// Norm expression.
    pub kind: Characterization,
    /// Quadrature resolution.
    pub quad: QuadConfig,
}

impl NormSpec {
    /// Spec with default quadrature resolution.
    pub fn new(p: f64, alpha: f64, kind: Characterization) -> Self {
        Self {
            p,
            alpha,
            kind,
            quad: QuadConfig::default(),
        }
    }

    /// Check every parameter inequality; messages name the failed one.
    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.p >= 1.0) || !self.p.is_finite() {
            return Err(Error::Parameter("p must satisfy 1 <= p < infinity".into()));
        }
        match self.kind {
            Characterization::Direct => {
                if !(self.alpha > -1.0) {
                    return Err(Error::Parameter(
                        "alpha must exceed -1 for the direct norm".into(),
                    ));
                }
            }
            Characterization::Dst { t, .. } => {
                if !(self.alpha + self.p * t > -1.0) {
                    return Err(Error::Parameter("alpha + p*t must exceed -1".into()));
                }
            }
            Characterization::Tangential { k } => {
                if !(self.alpha + self.p * k as f64 > -1.0) {
                    return Err(Error::Parameter("alpha + p*k must exceed -1".into()));
                }
                if k > 3 || n > 5 {
                    return Err(Error::Parameter(
                        "tangential norms are limited to k <= 3 and n <= 5".into(),
                    ));
                }
            }
            Characterization::Normal { k } | Characterization::Partial { k } => {
                if !(self.alpha + self.p * k as f64 > -1.0) {
                    return Err(Error::Parameter("alpha + p*k must exceed -1".into()));
                }
            }
        }
        Ok(())
    }

    /// The partial-derivative characterization is equivalent only under
    /// alpha + p(n-1) > -1; violations are flagged, not forbidden.
    pub fn condalpha_satisfied(&self, n: usize) -> bool {
        self.alpha + self.p * (n as f64 - 1.0) > -1.0
    }

    /// Short label for reports.
    pub fn label(&self) -> String {
        match self.kind {
            Characterization::Direct => format!("direct(p={},a={})", self.p, self.alpha),
            Characterization::Dst { s, t } => {
                format!("dst(p={},a={},s={s},t={t})", self.p, self.alpha)
            }
            Characterization::Tangential { k } => {
                format!("tangential(p={},a={},k={k})", self.p, self.alpha)
            }
            Characterization::Normal { k } => {
                format!("normal(p={},a={},k={k})", self.p, self.alpha)
            }
            Characterization::Partial { k } => {
                format!("partial(p={},a={},k={k})", self.p, self.alpha)
            }
        }
    }
}

fn lp_norm(
    ev: &mut crate::expansion::Evaluator,
    p: f64,
    n: usize,
    weight: f64,
    quad: QuadConfig,
) -> Result<f64> {
    let rule = BallRule::new(n, weight, quad.radial_order, quad.sphere_degree)?;
    let integral = rule.try_integrate(|x| Ok(ev.eval(x)?.abs().powf(p)))?;
    Ok(integral.powf(1.0 / p))
}

/// All order-k multi-indices over n variables.
pub fn multi_indices(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 1 {
            let mut v = prefix.clone();
            v.push(k);
            out.push(v);
            return;
        }
        for first in 0..=k {
            prefix.push(first);
            rec(n - 1, k - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, k, &mut Vec::new(), &mut out);
    out
}

fn tangential_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            v.push((i, j));
        }
    }
    v
}

fn chains(pairs: &[(usize, usize)], k: usize) -> Vec<Vec<(usize, usize)>> {
    let mut out: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::with_capacity(out.len() * pairs.len());
        for c in &out {
            for &p in pairs {
                let mut c2 = c.clone();
                c2.push(p);
                next.push(c2);
            }
        }
        out = next;
    }
    out
}

/// Evaluate the chosen norm expression of `f`.
pub fn norm(f: &HHarmonicFunction, spec: &NormSpec) -> Result<f64> {
    let n = f.dim();
    spec.validate(n)?;
    let p = spec.p;
    match spec.kind {
        Characterization::Direct => lp_norm(&mut f.evaluator(), p, n, spec.alpha, spec.quad),
        Characterization::Dst { s, t } => {
            let g = apply_dst(s, t, f)?;
            lp_norm(&mut g.evaluator(), p, n, spec.alpha + p * t, spec.quad)
        }
        Characterization::Tangential { k } => {
            let weight = spec.alpha + p * k as f64;
            let mut total = 0.0;
            for chain in chains(&tangential_pairs(n), k) {
                let tf = f.tangential_chain(&chain)?;
                total += lp_norm(&mut tf.evaluator(), p, n, weight, spec.quad)?;
            }
            Ok(total + f.eval_origin()?.abs())
        }
        Characterization::Normal { k } => {
            let weight = spec.alpha + p * k as f64;
            let nf = f.normal_k(k);
            let val = lp_norm(&mut nf.evaluator(), p, n, weight, spec.quad)?;
            Ok(val + f.eval_origin()?.abs())
        }
        Characterization::Partial { k } => {
            let weight = spec.alpha + p * k as f64;
            let mut total = 0.0;
            for kappa in multi_indices(n, k) {
                let df = f.partial(&kappa)?;
                total += lp_norm(&mut df.evaluator(), p, n, weight, spec.quad)?;
            }
            for kk in 0..k {
                for kappa in multi_indices(n, kk) {
                    total += f.partial(&kappa)?.eval_origin()?.abs();
                }
            }
            Ok(total)
        }
    }
}

/// Exact B^2_alpha inner product via the coefficient formula
/// <f,g> = sum_m c_m(alpha)^(-1) <f_m, g_m>_{L^2(S)}, defined for every real
/// alpha through the extended coefficients.
pub fn inner_product_b2(
    f: &HHarmonicFunction,
    g: &HHarmonicFunction,
    alpha: f64,
) -> Result<f64> {
    if f.dim() != g.dim() {
        return Err(Error::Parameter(
            "inner product requires matching dimensions".into(),
        ));
    }
    let n = f.dim();
    let fam = family(n, alpha)?;
    let mut terms = Vec::new();
    let g_degrees: std::collections::BTreeSet<usize> = g.degrees().into_iter().collect();
    for m in f.degrees() {
        if !g_degrees.contains(&m) {
            continue;
        }
        let ip = match (f.zonal_terms(m), g.zonal_terms(m)) {
            (Some(ft), Some(gt)) => {
                // <Z_m(.,eta), Z_m(.,xi)> = Z_m(eta, xi)
                let mut acc = Vec::with_capacity(ft.len() * gt.len());
                for (a, eta) in &ft {
                    for (b, xi) in &gt {
                        let t = dot(eta.coords(), xi.coords()).clamp(-1.0, 1.0);
                        acc.push(a * b * zonal_seq(n, t, m)[m]);
                    }
                }
                pairwise_sum(&acc)
            }
            _ => {
                // general blocks: the product of two degree-m block
                // polynomials is a degree-2m spherical polynomial, so a rule
                // of that exactness integrates it exactly
                let rule = SphereRule::new(n, (2 * m).max(2))?;
                let vals: Result<Vec<f64>> = rule
                    .nodes
                    .iter()
                    .zip(&rule.weights)
                    .map(|(z, &w)| {
                        Ok(w * f.eval_block_polynomial(m, z.coords())?
                            * g.eval_block_polynomial(m, z.coords())?)
                    })
                    .collect();
                pairwise_sum(&vals?)
            }
        };
        terms.push(ip / fam.coeff(m)?);
    }
    Ok(pairwise_sum(&terms))
}

/// Radial-shell grid for the Bloch seminorm.
#[derive(Debug, Clone)]
pub struct BlochGrid {
    /// Shell radii in (0,1).
    pub radii: Vec<f64>,
    /// Sphere rule exactness controlling the node count per shell.
    pub sphere_degree: usize,
}

impl Default for BlochGrid {
    fn default() -> Self {
        Self {
            radii: vec![0.1, 0.3, 0.5, 0.7, 0.8, 0.9, 0.95, 0.99],
            sphere_degree: 20,
        }
    }
}

/// sup over the grid of (1-|x|^2) |grad f(x)|, the Bloch-space seminorm.
pub fn bloch_seminorm(f: &HHarmonicFunction, grid: &BlochGrid) -> Result<f64> {
    let n = f.dim();
    let sphere = SphereRule::new(n, grid.sphere_degree)?;
    let mut evals: Vec<_> = f.gradient_fields().iter().map(|d| d.evaluator()).collect();
    let mut best: f64 = 0.0;
    let mut buf = vec![0.0; n];
    for &r in &grid.radii {
        if !(0.0 < r && r < 1.0) {
            return Err(Error::Parameter("bloch grid radii must lie in (0,1)".into()));
        }
        for zeta in &sphere.nodes {
            for (b, c) in buf.iter_mut().zip(zeta.coords()) {
                *b = r * c;
            }
            let mut gsq = 0.0;
            for ev in &mut evals {
                let v = ev.eval(&buf)?;
                gsq += v * v;
            }
            best = best.max((1.0 - r * r) * gsq.sqrt());
        }
    }
    Ok(best)
}

/// One pairwise-ratio observation of the equivalence table.
#[derive(Debug, Clone, Serialize)]
pub struct RatioRow {
    /// Family member identifier.
    pub function_id: String,
    /// Label of the numerator spec.
    pub spec_i: String,
    /// Label of the denominator spec.
    pub spec_j: String,
    /// norm_i / norm_j.
    pub ratio: f64,
}

/// Min/max/spread of the ratio for one spec pair over the family.
#[derive(Debug, Clone, Serialize)]
pub struct PairSummary {
    /// "spec_i / spec_j".
    pub pair: String,
    /// Smallest ratio over the family.
    pub min: f64,
    /// Largest ratio over the family.
    pub max: f64,
    /// max/min; the quantity the equivalence theorems bound.
    pub spread: f64,
}

/// Norms, pairwise ratios, and per-pair summaries over a function family.
#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    /// Spec labels in input order.
    pub specs: Vec<String>,
    /// Norm values: one row per function, one column per spec.
    pub norms: Vec<Vec<f64>>,
    /// All pairwise ratios.
    pub rows: Vec<RatioRow>,
    /// Min/max/spread per spec pair.
    pub summaries: Vec<PairSummary>,
    /// Members whose norm vanished while the function is nonzero.
    pub anomalies: Vec<String>,
}

/// Evaluate every spec on every family member and tabulate pairwise ratios.
pub fn equivalence_report(
    family: &[(String, HHarmonicFunction)],
    specs: &[NormSpec],
) -> Result<EquivalenceReport> {
    if family.is_empty() || specs.is_empty() {
        return Err(Error::Parameter(
            "equivalence report needs a nonempty family and spec list".into(),
        ));
    }
    let labels: Vec<String> = specs.iter().map(|s| s.label()).collect();
    let mut norms = Vec::with_capacity(family.len());
    let mut anomalies = Vec::new();
    for (id, f) in family {
        let mut row = Vec::with_capacity(specs.len());
        for spec in specs {
            let v = norm(f, spec)?;
            if v == 0.0 && !f.is_zero() {
                anomalies.push(format!("{id}: zero {} norm on a nonzero function", spec.label()));
            }
            row.push(v);
        }
        norms.push(row);
    }
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for i in 0..specs.len() {
        for j in 0..specs.len() {
            if i == j {
                continue;
            }
            let mut min = f64::INFINITY;
            let mut max = 0.0f64;
            for (fi, (id, _)) in family.iter().enumerate() {
                let ratio = norms[fi][i] / norms[fi][j];
                min = min.min(ratio);
                max = max.max(ratio);
                rows.push(RatioRow {
                    function_id: id.clone(),
                    spec_i: labels[i].clone(),
                    spec_j: labels[j].clone(),
                    ratio,
                });
            }
            summaries.push(PairSummary {
                pair: format!("{} / {}", labels[i], labels[j]),
                min,
                max,
                spread: max / min,
            });
        }
    }
    Ok(EquivalenceReport {
        specs: labels,
        norms,
        rows,
        summaries,
        anomalies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expansion::random_function;
    use crate::geometry::SpherePoint;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_norms_are_the_absolute_value() {
        let f = HHarmonicFunction::constant(3, -2.0).unwrap();
        let direct = NormSpec::new(2.0, 0.5, Characterization::Direct);
        assert_abs_diff_eq!(norm(&f, &direct).unwrap(), 2.0, epsilon = 1e-10);
        // tangential derivatives of a constant vanish, leaving only |f(0)|
        let tang = NormSpec::new(2.0, 0.5, Characterization::Tangential { k: 1 });
        assert_abs_diff_eq!(norm(&f, &tang).unwrap(), 2.0, epsilon = 1e-10);
        let nrm = NormSpec::new(1.0, 0.5, Characterization::Normal { k: 2 });
        assert_abs_diff_eq!(norm(&f, &nrm).unwrap(), 2.0, epsilon = 1e-10);
    }

    #[test]
    fn invalid_parameters_name_the_inequality() {
        let f = HHarmonicFunction::constant(3, 1.0).unwrap();
        let bad = NormSpec::new(2.0, -1.5, Characterization::Direct);
        match norm(&f, &bad) {
            Err(Error::Parameter(msg)) => assert!(msg.contains("alpha must exceed -1")),
            other => panic!("expected parameter error, got {other:?}"),
        }
        let bad2 = NormSpec::new(2.0, -3.0, Characterization::Dst { s: 0.0, t: 0.5 });
        match norm(&f, &bad2) {
            Err(Error::Parameter(msg)) => assert!(msg.contains("alpha + p*t")),
            other => panic!("expected parameter error, got {other:?}"),
        }
    }

    #[test]
    fn dst_with_zero_order_equals_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = random_function(&mut rng, 3, 5, 1).unwrap();
        let a = norm(&f, &NormSpec::new(2.0, 0.5, Characterization::Direct)).unwrap();
        let b = norm(
            &f,
            &NormSpec::new(2.0, 0.5, Characterization::Dst { s: 1.0, t: 0.0 }),
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn inner_product_orthogonality_and_diagonal() {
        let n = 3;
        let mut f = HHarmonicFunction::new(n).unwrap();
        f.add_zonal_term(2, 1.0, &SpherePoint::axis(n, 0)).unwrap();
        let mut g = HHarmonicFunction::new(n).unwrap();
        g.add_zonal_term(3, 1.0, &SpherePoint::axis(n, 0)).unwrap();
        // disjoint degrees are exactly orthogonal
        assert_eq!(inner_product_b2(&f, &g, 0.0).unwrap(), 0.0);
        // constant against itself: c_0 = 1
        let c = HHarmonicFunction::constant(n, 3.0).unwrap();
        assert_abs_diff_eq!(inner_product_b2(&c, &c, 2.0).unwrap(), 9.0, epsilon = 1e-13);
    }

    #[test]
    fn direct_norm_squared_matches_inner_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f = random_function(&mut rng, 3, 6, 1).unwrap();
        let alpha = 0.5;
        let spec = NormSpec {
            p: 2.0,
            alpha,
            kind: Characterization::Direct,
            quad: QuadConfig {
                radial_order: 60,
                sphere_degree: 28,
            },
        };
        let nv = norm(&f, &spec).unwrap();
        let ip = inner_product_b2(&f, &f, alpha).unwrap();
        assert_abs_diff_eq!(nv * nv, ip, epsilon = 1e-8 * ip.abs());
    }

    #[test]
    fn bloch_seminorm_of_constant_vanishes() {
        let c = HHarmonicFunction::constant(4, 5.0).unwrap();
        assert_eq!(bloch_seminorm(&c, &BlochGrid::default()).unwrap(), 0.0);
    }

    #[test]
    fn equivalence_report_on_constants_is_unit() {
        let fam = vec![("const".to_string(), HHarmonicFunction::constant(3, 1.0).unwrap())];
        let specs = vec![
            NormSpec::new(2.0, 0.0, Characterization::Direct),
            NormSpec::new(2.0, 0.0, Characterization::Tangential { k: 1 }),
        ];
        let rep = equivalence_report(&fam, &specs).unwrap();
        for row in &rep.rows {
            assert_abs_diff_eq!(row.ratio, 1.0, epsilon = 1e-9);
        }
        assert!(rep.anomalies.is_empty());
    }

    #[test]
    fn norm_axioms_hold_discretely() {
        // homogeneity and the triangle inequality are inherited from the
        // weighted discrete sums
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let f = random_function(&mut rng, 3, 4, 1).unwrap();
        let g = random_function(&mut rng, 3, 4, 1).unwrap();
        let spec = NormSpec::new(1.5, 0.0, Characterization::Direct);
        let nf = norm(&f, &spec).unwrap();
        let fs = f.scale_blocks(|_| -2.5);
        assert_abs_diff_eq!(norm(&fs, &spec).unwrap(), 2.5 * nf, epsilon = 1e-9 * nf);
        let mut sum = f.clone();
        sum.add_in_place(&g);
        let ns = norm(&sum, &spec).unwrap();
        assert!(ns <= nf + norm(&g, &spec).unwrap() + 1e-10);
    }
}
