//! `hmd`: evaluate the hyperbolic gamma function, run verification suites
//! and export R/L matrices as JSON.
//!
//! Exit codes: 0 success, 1 failed check or numerical error, 2 usage error.

mod config;
mod export;
mod report;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hmd_core::funspace::DEFAULT_SEED;
use hmd_core::hypgamma::{gamma, GammaConfig, GammaMethod};
use num_complex::Complex64;
use serde_json::json;
use thiserror::Error;

use config::{OutputFormat, SessionConfig};
use export::{ExportInputs, ExportKind};
use suites::{Suite, SuiteInputs};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] hmd_core::error::Error),
    #[error("check failed")]
    CheckFailed,
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "hmd",
    version,
    about = "Hyperbolic gamma function, modular double operators and R-matrices"
)]
#[command(allow_negative_numbers = true)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Real part of b.
    #[arg(long, global = true, default_value_t = 0.8)]
    b_re: f64,
    /// Imaginary part of b.
    #[arg(long, global = true, default_value_t = 0.0)]
    b_im: f64,
    /// Pass threshold applied to every residual, in (1e-14, 1e-2).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for sampled parameters and points.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SpectralArgs {
    #[arg(long, default_value_t = 0.37)]
    u_re: f64,
    #[arg(long, default_value_t = 0.0)]
    u_im: f64,
    /// Representation label; each suite has its own default.
    #[arg(long)]
    g_re: Option<f64>,
    #[arg(long, requires = "g_re")]
    g_im: Option<f64>,
}

impl SpectralArgs {
    fn u(&self) -> Complex64 {
        Complex64::new(self.u_re, self.u_im)
    }

    fn g(&self) -> Option<Complex64> {
        self.g_re.map(|re| Complex64::new(re, self.g_im.unwrap_or(0.0)))
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate γ(z; b).
    Gamma {
        #[arg(long, default_value_t = 0.0, conflicts_with = "z_eta")]
        z_re: f64,
        #[arg(long, default_value_t = 0.0, conflicts_with = "z_eta")]
        z_im: f64,
        /// Use z = -η = (b + 1/b)/2 exactly.
        #[arg(long)]
        z_eta: bool,
    },
    /// Run a verification suite; exits 1 if any residual misses its threshold.
    Check {
        #[arg(value_enum)]
        suite: Suite,
        #[command(flatten)]
        spectral: SpectralArgs,
    },
    /// Export a matrix as JSON.
    Export {
        #[arg(value_enum)]
        kind: ExportKind,
        #[command(flatten)]
        spectral: SpectralArgs,
        /// Point at which `l-matrix-sampled` evaluates its entries.
        #[arg(long, default_value_t = 0.13)]
        z_re: f64,
        #[arg(long, default_value_t = 0.05)]
        z_im: f64,
        /// Spin label of the first space of `r-dense`.
        #[arg(long, default_value_t = 1)]
        n: u32,
        /// Labels of the second space of `r-dense`.
        #[arg(long, default_value_t = 1)]
        np: u32,
        #[arg(long, default_value_t = 0)]
        mp: u32,
        /// Rescale so the leading entry is 1.
        #[arg(long)]
        projective: bool,
    },
}

fn cmd_gamma(z: Complex64, cfg: &SessionConfig) -> Result<(), CliError> {
    let p = &cfg.param;
    let base = GammaConfig::new(p);
    let integral = gamma(z, p, &base.with_method(GammaMethod::Integral))?;
    let product = gamma(z, p, &base.with_method(GammaMethod::Product)).ok();
    let text = match cfg.format {
        OutputFormat::Json => {
            let mut doc = json!({"re": integral.re, "im": integral.im, "method": "integral"});
            if let Some(v) = product {
                doc["product"] = json!({"re": v.re, "im": v.im});
            }
            format!("{doc}\n")
        }
        OutputFormat::Human => {
            let mut s = format!(
                "gamma({}{:+}i) = {:.15e}{:+.15e}i  [integral]\n",
                z.re, z.im, integral.re, integral.im
            );
            if let Some(v) = product {
                s += &format!(
                    "{:>w$} = {:.15e}{:+.15e}i  [product]\n",
                    "",
                    v.re,
                    v.im,
                    w = s.find(" = ").unwrap_or(0)
                );
            }
            s
        }
    };
    cfg.emit(&text)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let g = &cli.global;
    let cfg = SessionConfig::new(Complex64::new(g.b_re, g.b_im), g.tol, g.seed, g.json, g.out.clone())?;
    match cli.command {
        Command::Gamma { z_re, z_im, z_eta } => {
            let z = if z_eta {
                -cfg.param.eta()
            } else {
                Complex64::new(z_re, z_im)
            };
            cmd_gamma(z, &cfg)
        }
        Command::Check { suite, spectral } => {
            let report = suites::run(
                suite,
                SuiteInputs {
                    u: spectral.u(),
                    g: spectral.g(),
                },
                &cfg,
            )?;
            cfg.emit(&report.render(&cfg))?;
            if report.passes() {
                Ok(())
            } else {
                Err(CliError::CheckFailed)
            }
        }
        Command::Export {
            kind,
            spectral,
            z_re,
            z_im,
            n,
            np,
            mp,
            projective,
        } => {
            let inputs = ExportInputs {
                u: spectral.u(),
                g: spectral.g(),
                z: Complex64::new(z_re, z_im),
                n,
                np,
                mp,
                projective,
            };
            cfg.emit(&export::export(kind, inputs, &cfg)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::CheckFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
