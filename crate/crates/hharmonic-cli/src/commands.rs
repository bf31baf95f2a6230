//! The five verification commands. Each returns the rendered output
//! document(s); writing and exit codes live in main.

use crate::config::ExperimentConfig;
use crate::output::{csv_document, fmt_float, json_document, Provenance};
use hharmonic::error::{Error, Result};
use hharmonic::expansion::random_function;
use hharmonic::geometry::{bracket, v_alpha, BallPoint};
use hharmonic::integrate::{lint01_bound, lint01_integral, pairing_bloch, project, BallRule};
use hharmonic::kernels::{apply_dst, cm_table, kernel_as_function, KernelSpec};
use hharmonic::spaces::{
    bloch_seminorm, equivalence_report, inner_product_b2, norm, BlochGrid, Characterization,
    NormSpec, QuadConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

fn span_quad(cfg: &ExperimentConfig) -> QuadConfig {
    QuadConfig {
        radial_order: cfg.radial_order,
        sphere_degree: cfg.sphere_degree,
    }
}

fn need_seed(cfg: &ExperimentConfig) -> Result<u64> {
    cfg.seed.ok_or_else(|| {
        Error::Parameter("a seed is mandatory for randomized experiments (--seed)".into())
    })
}

fn random_ball_point<R: Rng>(rng: &mut R, n: usize, rmax: f64) -> BallPoint {
    loop {
        let coords: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm: f64 = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm < 1.0 && norm > 1e-3 {
            let scale = rmax.min(0.999) / 1.0;
            return BallPoint::new(coords.iter().map(|c| c * scale).collect()).unwrap();
        }
    }
}

/// c_m(alpha) table: CSV columns (m, c_m, c_m / m^(alpha+1)).
pub fn cmd_cm_table(cfg: &ExperimentConfig) -> Result<String> {
    let prov = Provenance::new(cfg.sha256(), "cm-table");
    let rows = cm_table(cfg.n, cfg.alpha, cfg.max_degree)?;
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|(m, c, ratio)| {
            vec![
                m.to_string(),
                fmt_float(*c),
                ratio.map(fmt_float).unwrap_or_default(),
            ]
        })
        .collect();
    Ok(csv_document(&prov, &["m", "c_m", "c_m_over_m_alpha_plus_1"], &body))
}

#[derive(Serialize)]
struct ScanRow {
    r: f64,
    theta: f64,
    bracket: f64,
    value: f64,
    normalized: f64,
}

#[derive(Serialize)]
struct ScanGrowth {
    theta: f64,
    r_low: f64,
    r_high: f64,
    growth: f64,
}

#[derive(Serialize)]
struct ScanFamily {
    family: String,
    order: f64,
    exponent: f64,
    log_variant: bool,
    rows: Vec<ScanRow>,
    growth: Vec<ScanGrowth>,
}

#[derive(Serialize)]
struct KernelScanDoc {
    n: usize,
    alpha: f64,
    s: f64,
    t: f64,
    max_degree: usize,
    scans: Vec<ScanFamily>,
}

fn scan_family<F>(cfg: &ExperimentConfig, family: &str, order: f64, exponent: f64, log_variant: bool, mut value_at: F) -> Result<ScanFamily>
where
    F: FnMut(f64, f64) -> Result<f64>,
{
    let mut rows = Vec::new();
    for &theta in &cfg.theta_values {
        for &r in &cfg.r_values {
            if !(0.0 < r && r < 1.0) {
                return Err(Error::Parameter("scan radii must lie in (0,1)".into()));
            }
            let x = scan_x(cfg.n, r);
            let y = scan_y(cfg.n, r, theta);
            let br = bracket(x.coords(), y.coords())?;
            let value = value_at(r, theta)?;
            let mut normalized = value.abs() * br.powf(exponent);
            if log_variant {
                normalized /= 1.0 + (1.0 / (1.0 - r * r)).ln();
            }
            rows.push(ScanRow {
                r,
                theta,
                bracket: br,
                value,
                normalized,
            });
        }
    }
    let mut growth = Vec::new();
    for &theta in &cfg.theta_values {
        let of_theta: Vec<&ScanRow> = rows.iter().filter(|w| w.theta == theta).collect();
        if of_theta.len() >= 2 {
            let lo = of_theta
                .iter()
                .min_by(|a, b| a.r.partial_cmp(&b.r).unwrap())
                .unwrap();
            let hi = of_theta
                .iter()
                .max_by(|a, b| a.r.partial_cmp(&b.r).unwrap())
                .unwrap();
            growth.push(ScanGrowth {
                theta,
                r_low: lo.r,
                r_high: hi.r,
                growth: hi.normalized / lo.normalized,
            });
        }
    }
    Ok(ScanFamily {
        family: family.to_string(),
        order,
        exponent,
        log_variant,
        rows,
        growth,
    })
}

fn scan_x(n: usize, r: f64) -> BallPoint {
    let mut c = vec![0.0; n];
    c[0] = r;
    BallPoint::new(c).unwrap()
}

fn scan_y(n: usize, r: f64, theta: f64) -> BallPoint {
    let mut c = vec![0.0; n];
    c[0] = r * theta.cos();
    c[1] = r * theta.sin();
    BallPoint::new(c).unwrap()
}

/// Boundary growth scans of D^t_s R_alpha, partial derivatives, and normal
/// derivatives of the kernel, with the sharpness control row.
pub fn cmd_kernel_scan(cfg: &ExperimentConfig) -> Result<String> {
    let prov = Provenance::new(cfg.sha256(), "kernel-scan");
    let n = cfg.n;
    let nf = n as f64;
    let spec = KernelSpec::with_degree(n, cfg.alpha, cfg.max_degree);
    let mut scans = Vec::new();

    // kernel_as_function anchored at y; derivatives fall on the free variable
    let kf = |r: f64, theta: f64| kernel_as_function(&spec, &scan_y(n, r, theta), cfg.max_degree);

    // D^t_s R_alpha, bounded by [x,y]^-(n+alpha+t) when that exponent is positive
    let dst_exp = nf + cfg.alpha + cfg.t;
    scans.push(scan_family(cfg, "dst", cfg.t, dst_exp, false, |r, theta| {
        let f = apply_dst(cfg.s, cfg.t, &kf(r, theta)?)?;
        f.eval(&scan_x(n, r))
    })?);

    // sharpness probe: same values, exponent deliberately raised by one
    scans.push(scan_family(
        cfg,
        "dst_sharpness",
        cfg.t,
        dst_exp + 1.0,
        false,
        |r, theta| {
            let f = apply_dst(cfg.s, cfg.t, &kf(r, theta)?)?;
            f.eval(&scan_x(n, r))
        },
    )?);

    // partial derivatives d^kappa with kappa = order * e_1
    for order in 1..n {
        let log_variant = order == n - 1;
        let exponent = nf + cfg.alpha + if log_variant { nf - 1.0 } else { order as f64 };
        let mut kappa = vec![0usize; n];
        kappa[0] = order;
        scans.push(scan_family(
            cfg,
            "partial",
            order as f64,
            exponent,
            log_variant,
            |r, theta| {
                let d = kf(r, theta)?.partial(&kappa)?;
                d.eval(&scan_x(n, r))
            },
        )?);
    }

    // normal derivatives N^k
    for order in 1..n {
        let log_variant = order == n - 1;
        let exponent = nf + cfg.alpha + if log_variant { nf - 1.0 } else { order as f64 };
        scans.push(scan_family(
            cfg,
            "normal",
            order as f64,
            exponent,
            log_variant,
            |r, theta| {
                let d = kf(r, theta)?.normal_k(order);
                d.eval(&scan_x(n, r))
            },
        )?);
    }

    let doc = KernelScanDoc {
        n,
        alpha: cfg.alpha,
        s: cfg.s,
        t: cfg.t,
        max_degree: cfg.max_degree,
        scans,
    };
    Ok(json_document(&prov, &doc))
}

#[derive(Serialize)]
struct PreconditionDoc {
    inequality: String,
    lhs: f64,
    rhs: f64,
    satisfied: bool,
}

#[derive(Serialize)]
struct ExactRouteRow {
    alpha: f64,
    x_norm: f64,
    f_value: f64,
    residual: f64,
}

#[derive(Serialize)]
struct QuadRouteRow {
    x_norm: f64,
    f_value: f64,
    projected: f64,
    rel_residual: f64,
}

#[derive(Serialize)]
struct ReproduceDoc {
    n: usize,
    p: f64,
    beta: f64,
    precondition: PreconditionDoc,
    exact_route: Vec<ExactRouteRow>,
    exact_route_max_residual: f64,
    quadrature_route: Vec<QuadRouteRow>,
    quadrature_route_max_rel: f64,
    besov_alpha: f64,
    besov_t: f64,
    besov_route: Vec<QuadRouteRow>,
    besov_route_max_rel: f64,
    bloch_pairing_sequence: Vec<(f64, f64)>,
}

/// Reproducing-formula checks: the exact coefficient route, the quadrature
/// projection route, the Besov-zone multiplier route, and the three-point
/// Bloch pairing sequence.
pub fn cmd_reproduce_check(cfg: &ExperimentConfig) -> Result<String> {
    let prov = Provenance::new(cfg.sha256(), "reproduce-check");
    let seed = need_seed(cfg)?;
    let n = cfg.n;
    let beta = cfg.beta;
    let lhs = cfg.alpha + 1.0;
    let rhs = cfg.p * (beta + 1.0);
    let satisfied = lhs < rhs && beta > -1.0;
    let precondition = PreconditionDoc {
        inequality: "alpha+1 < p*(beta+1)".into(),
        lhs,
        rhs,
        satisfied,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // exact coefficient route, extended kernels included
    let deg = cfg.max_degree.min(10);
    let f = random_function(&mut rng, n, deg, 1)?;
    let mut exact_rows = Vec::new();
    let mut exact_max: f64 = 0.0;
    for alpha in [-(n as f64), -1.0, 0.0, 2.0] {
        let spec = KernelSpec::with_degree(n, alpha, deg);
        for _ in 0..5 {
            let x = random_ball_point(&mut rng, n, 0.9);
            let kx = kernel_as_function(&spec, &x, deg)?;
            let fx = f.eval(&x)?;
            let ip = inner_product_b2(&f, &kx, alpha)?;
            let residual = (ip - fx).abs() / (1.0 + fx.abs());
            exact_max = exact_max.max(residual);
            exact_rows.push(ExactRouteRow {
                alpha,
                x_norm: x.norm(),
                f_value: fx,
                residual,
            });
        }
    }

    let mut quad_rows = Vec::new();
    let mut quad_max: f64 = 0.0;
    let mut besov_rows = Vec::new();
    let mut besov_max: f64 = 0.0;
    let besov_alpha = if cfg.alpha <= -1.0 { cfg.alpha } else { -(n as f64) };
    let besov_t = 1.0 - besov_alpha;
    if satisfied {
        // quadrature route: P_beta f = f for finite expansions
        let g = random_function(&mut rng, n, deg.min(5), 1)?;
        let rule = BallRule::new(n, beta, cfg.radial_order, cfg.sphere_degree)?;
        for _ in 0..6 {
            let x = random_ball_point(&mut rng, n, 0.7);
            let fx = g.eval(&x)?;
            let pf = project(
                beta,
                |y| g.eval(&BallPoint::new(y.to_vec())?),
                &x,
                &rule,
                cfg.kernel_tol,
            )?;
            let rel = (pf - fx).abs() / (1.0 + fx.abs());
            quad_max = quad_max.max(rel);
            quad_rows.push(QuadRouteRow {
                x_norm: x.norm(),
                f_value: fx,
                projected: pf,
                rel_residual: rel,
            });
        }

        // Besov-zone route: P_beta applied to the multiplier preimage
        // g = (V_beta / V_{beta+t}) (1-|y|^2)^t D^t_beta f reproduces f.
        let h = random_function(&mut rng, n, deg.min(5), 1)?;
        let dh = apply_dst(beta, besov_t, &h)?;
        let vr = v_alpha(n, beta) / v_alpha(n, beta + besov_t);
        for _ in 0..4 {
            let x = random_ball_point(&mut rng, n, 0.7);
            let fx = h.eval(&x)?;
            let pf = project(
                beta,
                |y| {
                    let yy: f64 = y.iter().map(|c| c * c).sum();
                    Ok(vr * (1.0 - yy).powf(besov_t)
                        * dh.eval(&BallPoint::new(y.to_vec())?)?)
                },
                &x,
                &rule,
                cfg.kernel_tol,
            )?;
            let rel = (pf - fx).abs() / (1.0 + fx.abs());
            besov_max = besov_max.max(rel);
            besov_rows.push(QuadRouteRow {
                x_norm: x.norm(),
                f_value: fx,
                projected: pf,
                rel_residual: rel,
            });
        }
    }

    // three-point Bloch pairing sequence (never extrapolated)
    let f1 = random_function(&mut rng, n, 4, 1)?;
    let g1 = random_function(&mut rng, n, 4, 1)?;
    let rule0 = BallRule::new(n, 0.0, cfg.radial_order, cfg.sphere_degree)?;
    let pairing = pairing_bloch(&f1, &g1, cfg.alpha.max(-0.5), 0.0, 1.0, &[0.9, 0.95, 0.99], &rule0)?;

    let doc = ReproduceDoc {
        n,
        p: cfg.p,
        beta,
        precondition,
        exact_route: exact_rows,
        exact_route_max_residual: exact_max,
        quadrature_route: quad_rows,
        quadrature_route_max_rel: quad_max,
        besov_alpha,
        besov_t,
        besov_route: besov_rows,
        besov_route_max_rel: besov_max,
        bloch_pairing_sequence: pairing,
    };
    Ok(json_document(&prov, &doc))
}

#[derive(Serialize)]
struct InclusionProbe {
    p: f64,
    alpha: f64,
    q: f64,
    beta: f64,
    inclusion_direction: bool,
    norm_ratios: Vec<f64>,
    trend_last_over_first: f64,
}

#[derive(Serialize)]
struct NormEquivSummary {
    specs: Vec<String>,
    summaries: Vec<hharmonic::spaces::PairSummary>,
    anomalies: Vec<String>,
    iso_ratios: Vec<f64>,
    iso_spread: f64,
    bloch_values: Vec<f64>,
    inclusion: InclusionProbe,
}

/// Norm-equivalence table over the kernel-slice family, plus the isomorphism
/// and inclusion probes. Returns (CSV rows, JSON summary).
pub fn cmd_norm_equiv(cfg: &ExperimentConfig) -> Result<(String, String)> {
    let prov = Provenance::new(cfg.sha256(), "norm-equiv");
    let n = cfg.n;
    let quad = span_quad(cfg);
    let spec_kernel = KernelSpec::with_degree(n, cfg.alpha, cfg.family_degree);
    let mut family = Vec::new();
    for (j, &r) in cfg.family_radii.iter().enumerate() {
        let mut c = vec![0.0; n];
        c[0] = r;
        let anchor = BallPoint::new(c)?;
        family.push((
            format!("slice_{j}"),
            kernel_as_function(&spec_kernel, &anchor, cfg.family_degree)?,
        ));
    }

    let mut specs = Vec::new();
    if cfg.alpha > -1.0 {
        specs.push(NormSpec {
            p: cfg.p,
            alpha: cfg.alpha,
            kind: Characterization::Direct,
            quad,
        });
    }
    specs.push(NormSpec {
        p: cfg.p,
        alpha: cfg.alpha,
        kind: Characterization::Dst { s: cfg.s, t: cfg.t },
        quad,
    });
    specs.push(NormSpec {
        p: cfg.p,
        alpha: cfg.alpha,
        kind: Characterization::Tangential { k: cfg.k },
        quad,
    });
    specs.push(NormSpec {
        p: cfg.p,
        alpha: cfg.alpha,
        kind: Characterization::Normal { k: cfg.k },
        quad,
    });
    specs.push(NormSpec {
        p: cfg.p,
        alpha: cfg.alpha,
        kind: Characterization::Partial { k: cfg.k },
        quad,
    });
    for s in &specs {
        s.validate(n)?;
    }
    let report = equivalence_report(&family, &specs)?;

    // isomorphism probe: D^t_s maps B^p_alpha onto B^p_{alpha+pt}; compare a
    // tangential norm of the image against a multiplier norm of the preimage.
    let t_iso = if cfg.t != 0.0 { cfg.t } else { 1.0 };
    let image_spec = NormSpec {
        p: cfg.p,
        alpha: cfg.alpha + cfg.p * t_iso,
        kind: Characterization::Tangential { k: 1 },
        quad,
    };
    let pre_spec = NormSpec {
        p: cfg.p,
        alpha: cfg.alpha,
        kind: Characterization::Dst { s: cfg.s, t: t_iso },
        quad,
    };
    let mut iso_ratios = Vec::new();
    for (_, f) in &family {
        let img = apply_dst(cfg.s, t_iso, f)?;
        iso_ratios.push(norm(&img, &image_spec)? / norm(f, &pre_spec)?);
    }
    let iso_spread = iso_ratios.iter().cloned().fold(f64::MIN, f64::max)
        / iso_ratios.iter().cloned().fold(f64::MAX, f64::min);

    // Bloch seminorm of the family members (duality-side diagnostic)
    let mut bloch_values = Vec::new();
    for (_, f) in &family {
        bloch_values.push(bloch_seminorm(f, &BlochGrid::default())?);
    }

    // inclusion probe between (p, alpha) and (incl_q, incl_beta)
    let t_a = pick_t(cfg.alpha, cfg.p);
    let t_b = pick_t(cfg.incl_beta, cfg.incl_q);
    let side_a = NormSpec {
        p: cfg.p,
        alpha: cfg.alpha,
        kind: Characterization::Dst { s: cfg.s, t: t_a },
        quad,
    };
    let side_b = NormSpec {
        p: cfg.incl_q,
        alpha: cfg.incl_beta,
        kind: Characterization::Dst { s: cfg.s, t: t_b },
        quad,
    };
    let mut norm_ratios = Vec::new();
    for (_, f) in &family {
        norm_ratios.push(norm(f, &side_b)? / norm(f, &side_a)?);
    }
    let inclusion_direction = if cfg.incl_q >= cfg.p {
        (cfg.alpha + n as f64) / cfg.p <= (cfg.incl_beta + n as f64) / cfg.incl_q
    } else {
        (cfg.alpha + 1.0) / cfg.p < (cfg.incl_beta + 1.0) / cfg.incl_q
    };
    let trend = norm_ratios.last().unwrap() / norm_ratios.first().unwrap();

    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.function_id.clone(),
                r.spec_i.clone(),
                r.spec_j.clone(),
                fmt_float(r.ratio),
            ]
        })
        .collect();
    let csv = csv_document(&prov, &["function_id", "spec_i", "spec_j", "ratio"], &rows);
    let summary = NormEquivSummary {
        specs: report.specs.clone(),
        summaries: report.summaries,
        anomalies: report.anomalies,
        iso_ratios,
        iso_spread,
        bloch_values,
        inclusion: InclusionProbe {
            p: cfg.p,
            alpha: cfg.alpha,
            q: cfg.incl_q,
            beta: cfg.incl_beta,
            inclusion_direction,
            norm_ratios,
            trend_last_over_first: trend,
        },
    };
    Ok((csv, json_document(&prov, &summary)))
}

/// Smallest convenient multiplier order putting alpha + p t into the Bergman
/// zone with margin.
fn pick_t(alpha: f64, p: f64) -> f64 {
    if alpha > -0.5 {
        0.0
    } else {
        ((-1.0 - alpha) / p + 0.5).max(0.0)
    }
}

#[derive(Serialize)]
struct Lint01Row {
    b: f64,
    c: f64,
    sup_ratio: f64,
    sup_ratio_refined: f64,
    drift: f64,
}

#[derive(Serialize)]
struct EstimateDoc {
    ltxy_samples: usize,
    ltxy_violations: usize,
    lint01: Vec<Lint01Row>,
}

/// Empirical-sup scans of the bracket contraction inequality and the 1-D
/// bracket integral bound.
pub fn cmd_estimate_scan(cfg: &ExperimentConfig) -> Result<String> {
    let prov = Provenance::new(cfg.sha256(), "estimate-scan");
    let seed = need_seed(cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = cfg.n;

    let mut violations = 0usize;
    for _ in 0..cfg.samples {
        let x = random_ball_point(&mut rng, n, 0.999);
        let y = random_ball_point(&mut rng, n, 0.999);
        let t: f64 = rng.gen_range(0.0..=1.0);
        let tx: Vec<f64> = x.coords().iter().map(|c| c * t).collect();
        let lhs = bracket(&tx, y.coords())?;
        let rhs = bracket(x.coords(), y.coords())? / 2.0;
        if lhs < rhs {
            violations += 1;
        }
    }

    let mut lint01 = Vec::new();
    for (b, c) in [(0.0, 1.0), (0.5, 0.0), (1.0, -0.5)] {
        let mut sup = 0.0f64;
        let mut sup2 = 0.0f64;
        for _ in 0..200 {
            let x = random_ball_point(&mut rng, n, 0.995);
            let y = random_ball_point(&mut rng, n, 0.995);
            let br = bracket(x.coords(), y.coords())?;
            let bound = lint01_bound(c, br);
            let v1 = lint01_integral(b, c, x.coords(), y.coords(), 120)? / bound;
            let v2 = lint01_integral(b, c, x.coords(), y.coords(), 240)? / bound;
            sup = sup.max(v1);
            sup2 = sup2.max(v2);
        }
        lint01.push(Lint01Row {
            b,
            c,
            sup_ratio: sup,
            sup_ratio_refined: sup2,
            drift: (sup2 - sup).abs() / sup2,
        });
    }

    let doc = EstimateDoc {
        ltxy_samples: cfg.samples,
        ltxy_violations: violations,
        lint01,
    };
    Ok(json_document(&prov, &doc))
}

