use clap::ValueEnum;
use hmd_core::dense::DenseCMatrix;
use hmd_core::rmatrix::{l_fundamental, r_dense, sample_functions, seven_vertex};
use hmd_core::sklyanin::g_nm;
use num_complex::Complex64;
use serde_json::json;

use crate::config::SessionConfig;
use crate::report::pair;
use crate::CliError;

const FLUSH_RELATIVE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExportKind {
    SevenVertex,
    RDense,
    LMatrixSampled,
}

#[derive(Debug, Clone, Copy)]
pub struct ExportInputs {
    pub u: Complex64,
    pub g: Option<Complex64>,
    pub z: Complex64,
    pub n: u32,
    pub np: u32,
    pub mp: u32,
    pub projective: bool,
}

/// Builds the requested matrix and serializes it with its parameters.
pub fn export(kind: ExportKind, a: ExportInputs, cfg: &SessionConfig) -> Result<String, CliError> {
    let p = &cfg.param;
    let (m, g, normalization) = match kind {
        ExportKind::SevenVertex => (seven_vertex(a.u, p)?, g_nm(1, 0, p), "raw"),
        ExportKind::RDense => {
            let r = r_dense(a.u, a.n, (a.np, a.mp), p)?;
            if a.projective {
                (r.normalized, g_nm(a.n, 0, p), "projective")
            } else {
                (r.phi, g_nm(a.n, 0, p), "raw")
            }
        }
        ExportKind::LMatrixSampled => {
            let g = a.g.unwrap_or(Complex64::new(0.3, 0.0));
            let f = sample_functions(1, cfg.seed, p).remove(0);
            let l = l_fundamental(a.u, g, p)?;
            let eval = |w: Complex64| f.eval(w);
            let m = DenseCMatrix::from_fn(2, 2, |i, j| l.apply_entry(i, j, &eval, a.z, p));
            (m, g, "raw")
        }
    };
    // Components at roundoff level relative to the largest entry are written
    // as exact zeros so structural zeros survive serialization.
    let floor = FLUSH_RELATIVE * m.max_abs();
    let flush = |x: f64| if x.abs() < floor { 0.0 } else { x };
    let entries: Vec<_> = m
        .row_major()
        .into_iter()
        .map(|z| pair(Complex64::new(flush(z.re), flush(z.im))))
        .collect();
    let doc = json!({
        "rows": m.rows(),
        "cols": m.cols(),
        "b": pair(p.b()),
        "u": pair(a.u),
        "g": pair(g),
        "entries": entries,
        "normalization": normalization,
    });
    Ok(format!("{}\n", serde_json::to_string(&doc).expect("matrix serializes")))
}
