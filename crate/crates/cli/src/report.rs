use num_complex::Complex64;
use serde_json::{json, Value};

use crate::config::{OutputFormat, SessionConfig};

/// Bumped whenever a suite changes what it measures.
pub const SUITE_VERSION: u32 = 1;

pub fn pair(z: Complex64) -> Value {
    json!([z.re, z.im])
}

/// One measured residual and the threshold it must stay below.
#[derive(Debug, Clone)]
pub struct Row {
    pub label: String,
    pub residual: f64,
    pub tol: f64,
}

impl Row {
    pub fn new(label: impl Into<String>, residual: f64, tol: f64) -> Self {
        Self {
            label: label.into(),
            residual,
            tol,
        }
    }

    /// NaN residuals fail.
    pub fn passes(&self) -> bool {
        self.residual < self.tol
    }
}

pub struct CheckReport {
    pub suite: String,
    pub rows: Vec<Row>,
}

impl CheckReport {
    pub fn passes(&self) -> bool {
        self.rows.iter().all(Row::passes)
    }

    /// The failing row with the largest residual relative to its threshold.
    pub fn worst(&self) -> Option<&Row> {
        let key = |r: &Row| {
            if r.residual.is_nan() {
                f64::INFINITY
            } else {
                r.residual / r.tol
            }
        };
        self.rows
            .iter()
            .filter(|r| !r.passes())
            .max_by(|a, b| key(a).total_cmp(&key(b)))
    }

    pub fn render(&self, cfg: &SessionConfig) -> String {
        match cfg.format {
            OutputFormat::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| json!({"label": r.label, "residual": r.residual, "tol": r.tol, "pass": r.passes()}))
                    .collect();
                let worst = self.worst().map(|r| r.label.clone());
                let doc = json!({
                    "suite": self.suite,
                    "version": SUITE_VERSION,
                    "b": pair(cfg.b()),
                    "tol": cfg.tol,
                    "seed": cfg.seed,
                    "pass": self.passes(),
                    "worst": worst,
                    "rows": rows,
                });
                format!("{}\n", serde_json::to_string_pretty(&doc).expect("report serializes"))
            }
            OutputFormat::Human => {
                let b = cfg.b();
                let tol = cfg.tol.map_or("per check".to_string(), |t| format!("{t:e}"));
                let mut out = format!(
                    "suite {} v{SUITE_VERSION}  b = {}{:+}i  tol {tol}  seed {}\n",
                    self.suite, b.re, b.im, cfg.seed
                );
                let width = self.rows.iter().map(|r| r.label.len()).max().unwrap_or(0);
                for r in &self.rows {
                    let tag = if r.passes() { "ok  " } else { "FAIL" };
                    out += &format!("  {tag} {:<width$}  {:.3e}  < {:.0e}\n", r.label, r.residual, r.tol);
                }
                match self.worst() {
                    None => out += "PASS\n",
                    Some(r) => {
                        out += &format!(
                            "FAIL: worst offender {} ({:.3e} >= {:.0e})\n",
                            r.label, r.residual, r.tol
                        )
                    }
                }
                out
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(rows: Vec<Row>) -> CheckReport {
        CheckReport {
            suite: "t".into(),
            rows,
        }
    }

    #[test]
    fn worst_offender_is_the_largest_relative_miss() {
        let r = report(vec![
            Row::new("a", 1e-3, 1e-6),
            Row::new("b", 1e-2, 1.0),
            Row::new("c", 1e-4, 1e-9),
        ]);
        assert!(!r.passes());
        assert_eq!(r.worst().unwrap().label, "c");
    }

    #[test]
    fn nan_residual_fails() {
        let r = report(vec![Row::new("ok", 0.0, 1e-9), Row::new("nan", f64::NAN, 1e-9)]);
        assert!(!r.passes());
        assert_eq!(r.worst().unwrap().label, "nan");
        assert!(report(vec![Row::new("ok", 0.0, 1e-9)]).worst().is_none());
    }
}
