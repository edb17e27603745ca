use std::fs;
use std::io::Write;
use std::path::PathBuf;

use hmd_core::hypgamma::ModularParam;
use num_complex::Complex64;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Human,
    Json,
}

/// Validated settings shared by every subcommand.
#[derive(Debug, Clone)]
pub struct SessionConfig {
    pub param: ModularParam,
    /// Tolerance override; `None` keeps each check's own threshold.
    pub tol: Option<f64>,
    pub seed: u64,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

impl SessionConfig {
    pub fn new(b: Complex64, tol: Option<f64>, seed: u64, json: bool, out: Option<PathBuf>) -> Result<Self, CliError> {
        if !(b.re > 0.0) {
            return Err(CliError::Usage(format!("Re b must be positive, got {}", b.re)));
        }
        if let Some(t) = tol {
            if !(t > 1e-14 && t < 1e-2) {
                return Err(CliError::Usage(format!("--tol must lie in (1e-14, 1e-2), got {t:e}")));
            }
        }
        let param = ModularParam::new(b).map_err(|e| CliError::Usage(e.to_string()))?;
        let format = if json { OutputFormat::Json } else { OutputFormat::Human };
        Ok(Self {
            param,
            tol,
            seed,
            format,
            out,
        })
    }

    pub fn b(&self) -> Complex64 {
        self.param.b()
    }

    /// Writes `text` to `--out` when given, otherwise to stdout.
    pub fn emit(&self, text: &str) -> Result<(), CliError> {
        match &self.out {
            Some(path) => fs::write(path, text)?,
            None => std::io::stdout().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}
