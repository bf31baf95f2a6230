//! Batch verification driver for the hharmonic library.
//!
//! Subcommands expose the verification experiments: coefficient tables,
//! kernel boundary-growth scans, reproducing-formula checks, norm-equivalence
//! reports, and inequality scans. Configuration comes from a JSON file plus
//! flag overrides (flags win); identical configurations produce byte-identical
//! outputs.
//!
//! Exit codes: 0 success, 2 parameter error, 3 convergence/truncation error.

mod commands;
mod config;
mod output;

use clap::{Parser, Subcommand};
use config::{ExperimentConfig, Overrides};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "hharmonic", version, about = "Bergman-Besov verification experiments on the hyperbolic ball")]
struct Cli {
    /// JSON configuration file; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(flatten)]
    overrides: Overrides,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coefficient table c_m(alpha) with the m^(alpha+1) ratio column (CSV).
    CmTable,
    /// Kernel derivative growth scans along boundary-approaching grids (JSON).
    KernelScan,
    /// Reproducing-formula residuals: exact, quadrature, Besov routes (JSON).
    ReproduceCheck,
    /// Norm-equivalence ratios over a kernel-slice family (CSV + JSON summary).
    NormEquiv,
    /// Inequality scans: bracket contraction and 1-D integral bound (JSON).
    EstimateScan,
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, String> {
    let base = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
            serde_json::from_str(&text)
                .map_err(|e| format!("invalid config {}: {e}", path.display()))?
        }
        None => ExperimentConfig::default(),
    };
    Ok(base.with_overrides(&cli.overrides))
}

fn run(cli: &Cli) -> Result<(), MainError> {
    let cfg = load_config(cli).map_err(MainError::Config)?;
    match cli.command {
        Command::CmTable => {
            let doc = commands::cmd_cm_table(&cfg)?;
            output::emit(cfg.out.as_deref(), &doc)?;
        }
        Command::KernelScan => {
            let doc = commands::cmd_kernel_scan(&cfg)?;
            output::emit(cfg.out.as_deref(), &doc)?;
        }
        Command::ReproduceCheck => {
            let doc = commands::cmd_reproduce_check(&cfg)?;
            output::emit(cfg.out.as_deref(), &doc)?;
        }
        Command::NormEquiv => {
            let (csv, summary) = commands::cmd_norm_equiv(&cfg)?;
            output::emit(cfg.out.as_deref(), &csv)?;
            match cfg.out.as_deref() {
                Some(p) => {
                    let mut sp = p.to_path_buf();
                    sp.set_extension("summary.json");
                    output::emit(Some(&sp), &summary)?;
                }
                None => output::emit(None, &summary)?,
            }
        }
        Command::EstimateScan => {
            let doc = commands::cmd_estimate_scan(&cfg)?;
            output::emit(cfg.out.as_deref(), &doc)?;
        }
    }
    Ok(())
}

enum MainError {
    Config(String),
    Lib(hharmonic::Error),
    Io(std::io::Error),
}

impl From<hharmonic::Error> for MainError {
    fn from(e: hharmonic::Error) -> Self {
        MainError::Lib(e)
    }
}

impl From<std::io::Error> for MainError {
    fn from(e: std::io::Error) -> Self {
        MainError::Io(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(MainError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(MainError::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(MainError::Io(e)) => {
            eprintln!("io error: {e}");
            ExitCode::from(1)
        }
    }
}
