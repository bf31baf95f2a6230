//! Experiment configuration: a single JSON file plus flag overrides, with
//! flags winning over file values. The effective configuration is hashed into
//! every output for regression-baseline integrity.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::PathBuf;

/// Full experiment configuration; every command reads the subset it needs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Ambient dimension n.
    pub n: usize,
    /// Weight / kernel parameter alpha.
    pub alpha: f64,
    /// Integrability exponent p.
    pub p: f64,
    /// Multiplier base parameter s.
    pub s: f64,
    /// Multiplier order parameter t.
    pub t: f64,
    /// Derivative order k.
    pub k: usize,
    /// Series/kernel truncation degree M.
    pub max_degree: usize,
    /// RNG seed; mandatory for randomized experiments.
    pub seed: Option<u64>,
    /// Radial quadrature order.
    pub radial_order: usize,
    /// Sphere rule exactness degree.
    pub sphere_degree: usize,
    /// Kernel tail tolerance for tolerance-mode truncation.
    pub kernel_tol: f64,
    /// Radial grid of boundary scans.
    pub r_values: Vec<f64>,
    /// Angular grid of boundary scans.
    pub theta_values: Vec<f64>,
    /// Anchor radii of the kernel-slice family.
    pub family_radii: Vec<f64>,
    /// Truncation degree of the family members.
    pub family_degree: usize,
    /// Projection parameter beta of reproduce-check.
    pub beta: f64,
    /// Sample count for inequality scans.
    pub samples: usize,
    /// Second space (q, beta_incl) of the inclusion probe.
    pub incl_q: f64,
    /// Weight of the inclusion-probe target space.
    pub incl_beta: f64,
    /// Output path; stdout when absent.
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: 3,
            alpha: 0.0,
            p: 2.0,
            s: 0.0,
            t: 0.0,
            k: 1,
            max_degree: 512,
            seed: None,
            radial_order: 48,
            sphere_degree: 40,
            kernel_tol: 1e-10,
            r_values: vec![0.90, 0.95, 0.98],
            theta_values: vec![0.0, 0.1, 0.5],
            family_radii: (0..10).map(|j| j as f64 / 10.0).collect(),
            family_degree: 24,
            beta: 2.0,
            samples: 100_000,
            incl_q: 2.0,
            incl_beta: 1.0,
            out: None,
        }
    }
}

/// Flag-level overrides (every flag optional; present flags win).
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// Ambient dimension n.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Weight / kernel parameter alpha.
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Integrability exponent p.
    #[arg(long, global = true)]
    pub p: Option<f64>,
    /// Multiplier base parameter s.
    #[arg(long, global = true)]
    pub s: Option<f64>,
    /// Multiplier order parameter t.
    #[arg(long, global = true)]
    pub t: Option<f64>,
    /// Derivative order k.
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Series/kernel truncation degree M.
    #[arg(long, global = true)]
    pub max_degree: Option<usize>,
    /// RNG seed (mandatory for randomized experiments).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Radial quadrature order.
    #[arg(long, global = true)]
    pub radial_order: Option<usize>,
    /// Sphere rule exactness degree.
    #[arg(long, global = true)]
    pub sphere_degree: Option<usize>,
    /// Projection parameter beta.
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    /// Sample count for inequality scans.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Output path (stdout when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Apply flag overrides on top of the file configuration.
    pub fn with_overrides(mut self, o: &Overrides) -> Self {
        macro_rules! take {
            ($field:ident) => {
                if let Some(v) = &o.$field {
                    self.$field = v.clone();
                }
            };
        }
        take!(n);
        take!(alpha);
        take!(p);
        take!(s);
        take!(t);
        take!(k);
        take!(max_degree);
        take!(radial_order);
        take!(sphere_degree);
        take!(beta);
        take!(samples);
        if o.seed.is_some() {
            self.seed = o.seed;
        }
        if o.out.is_some() {
            self.out = o.out.clone();
        }
        self
    }

    /// SHA-256 of the canonical JSON form of the effective configuration.
    /// The output path does not influence the data, so it is excluded.
    pub fn sha256(&self) -> String {
        let mut c = self.clone();
        c.out = None;
        let canon = serde_json::to_string(&c).expect("config serializes");
        let mut h = Sha256::new();
        h.update(canon.as_bytes());
        hex_string(&h.finalize())
    }
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
