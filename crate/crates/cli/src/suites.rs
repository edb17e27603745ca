use std::f64::consts::PI;

use clap::ValueEnum;
use hmd_core::cx::{c, rel_diff, ONE};
use hmd_core::dense::DenseCMatrix;
use hmd_core::error::Error;
use hmd_core::funspace::SampleBox;
use hmd_core::hypgamma::{gamma_integral, gamma_product, GammaConfig, ModularParam};
use hmd_core::intertwiner::{check_intertwining, check_inversion, gaussian, numeric_points, pinch_label};
use hmd_core::rmatrix::{
    check_rll, check_s_permutation, check_unitarity, check_ybe, compare_exact, compare_projective, l_from_generators,
    l_fundamental, r_dense, r_finite, sample_functions, seven_vertex, v_symmetry_gap, RapidityQuad,
};
use hmd_core::sklyanin::{
    casimirs, check_cross_relations, generators, relation_residuals, spanning_family, Half, RepLabel,
};
use hmd_core::weights::{
    check_beta_integral, check_star_triangle, rho, weight_w, weight_wbar, BalancedSextet, RhoForm, StarTriangleParams,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::SessionConfig;
use crate::report::{CheckReport, Row};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Gamma,
    Weights,
    StarTriangle,
    BetaIntegral,
    Algebra,
    Cross,
    Casimir,
    Intertwine,
    Inversion,
    Lax,
    Ybe,
    Rll,
    Unitarity,
    Factorization,
}

/// Spectral parameter and representation label used by the operator suites.
#[derive(Debug, Clone, Copy)]
pub struct SuiteInputs {
    pub u: Complex64,
    pub g: Option<Complex64>,
}

type Rows = Result<Vec<Row>, CliError>;

pub fn run(suite: Suite, inputs: SuiteInputs, cfg: &SessionConfig) -> Result<CheckReport, CliError> {
    let p = &cfg.param;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let rows = match suite {
        Suite::Gamma => gamma_suite(p, &mut rng),
        Suite::Weights => weights_suite(p, &mut rng),
        Suite::StarTriangle => star_triangle_suite(p, &mut rng),
        Suite::BetaIntegral => beta_suite(p, &mut rng),
        Suite::Algebra => algebra_suite(p, inputs.g.unwrap_or(c(0.3, 0.0)), cfg.seed),
        Suite::Cross => cross_suite(p, inputs.g.unwrap_or(c(0.3, 0.0)), cfg.seed),
        Suite::Casimir => casimir_suite(p, inputs.g.unwrap_or(c(0.3, 0.0)), cfg.seed),
        Suite::Intertwine => intertwine_suite(p, cfg.seed),
        Suite::Inversion => inversion_suite(p, inputs.g.unwrap_or(c(0.17, 0.0))),
        Suite::Lax => lax_suite(p, inputs, cfg.seed),
        Suite::Ybe => ybe_suite(p, &mut rng),
        Suite::Rll => rll_suite(p, inputs, cfg.seed),
        Suite::Unitarity => unitarity_suite(p, &mut rng),
        Suite::Factorization => factorization_suite(p, inputs, &mut rng, cfg.seed),
    }?;
    let rows = match cfg.tol {
        Some(t) => rows.into_iter().map(|r| Row { tol: t, ..r }).collect(),
        None => rows,
    };
    let suite = suite
        .to_possible_value()
        .expect("suites are named")
        .get_name()
        .to_string();
    Ok(CheckReport { suite, rows })
}

/// Exact Laurent division loses digits once `b` leaves the real axis.
fn division_tol(p: &ModularParam) -> f64 {
    if p.b().im == 0.0 {
        1e-12
    } else {
        1e-8
    }
}

fn gamma_suite(p: &ModularParam, rng: &mut ChaCha8Rng) -> Rows {
    // Keep z + b and z + 1/b inside the strip as well.
    let reach = p.b().re.min(p.b_inv().re);
    let mut worst = [0.0f64; 5];
    let product_ok = gamma_product(c(0.5 * p.q_sum().re, 0.0), p, 1e-13).is_ok();
    for _ in 0..20 {
        let z = c(
            rng.random_range(0.05 * reach..0.95 * reach),
            rng.random_range(-1.0..1.0),
        );
        let g = gamma_integral(z, p, 1e-13)?;
        for (slot, period) in [(0, p.b()), (1, p.b_inv())] {
            let shifted = gamma_integral(z + period, p, 1e-13)?;
            worst[slot] = worst[slot].max(rel_diff(shifted, 2.0 * (PI * period * z).sin() * g));
        }
        worst[2] = worst[2].max(rel_diff(g * gamma_integral(p.q_sum() - z, p, 1e-13)?, ONE));
        worst[3] = worst[3].max(rel_diff(g, gamma_integral(z, &p.swapped(), 1e-13)?));
        if product_ok {
            worst[4] = worst[4].max(rel_diff(g, gamma_product(z, p, 1e-15)?));
        }
    }
    let mut rows = vec![
        Row::new("shift by b", worst[0], 1e-9),
        Row::new("shift by 1/b", worst[1], 1e-9),
        Row::new("reflection", worst[2], 1e-9),
        Row::new("b <-> 1/b", worst[3], 1e-9),
    ];
    if product_ok {
        rows.push(Row::new("integral vs product", worst[4], 1e-7));
    }
    Ok(rows)
}

fn weights_suite(p: &ModularParam, rng: &mut ChaCha8Rng) -> Rows {
    let cfg = GammaConfig::new(p);
    let eta = p.eta().re;
    let mut worst = [0.0f64; 4];
    for _ in 0..5 {
        let a = c(rng.random_range(0.8 * eta..-0.8 * eta), 0.0);
        let x = c(rng.random_range(-0.5..0.5), 0.0);
        let y = c(rng.random_range(-0.5..0.5), 0.0);
        let w = weight_w(a, x, y, p, &cfg)?;
        worst[0] = worst[0].max(rel_diff(w, weight_w(a, y, x, p, &cfg)?));
        worst[1] = worst[1].max(rel_diff(w * weight_w(-a, x, y, p, &cfg)?, ONE));
        let abar = c(-a.norm(), 0.0);
        worst[2] = worst[2].max(rel_diff(
            weight_wbar(abar, x, y, p, &cfg)?,
            weight_w(p.eta() - abar, x, y, p, &cfg)?,
        ));
        let z = x + c(0.05, 0.0);
        worst[3] = worst[3].max(rel_diff(
            rho(z, p, RhoForm::Gamma, &cfg)?,
            rho(z, p, RhoForm::Trig, &cfg)?,
        ));
    }
    Ok(vec![
        Row::new("W symmetric in x, y", worst[0], 1e-10),
        Row::new("W(a) W(-a) = 1", worst[1], 1e-10),
        Row::new("crossing Wbar(a) = W(eta - a)", worst[2], 1e-10),
        Row::new("rho gamma vs trig form", worst[3], 1e-10),
    ])
}

fn star_triangle_suite(p: &ModularParam, rng: &mut ChaCha8Rng) -> Rows {
    (0..3)
        .map(|k| {
            let s = StarTriangleParams::sample(rng, p);
            Ok(Row::new(
                format!("parameter set {k}"),
                check_star_triangle(&s, p, 1e-9)?,
                1e-6,
            ))
        })
        .collect()
}

fn beta_suite(p: &ModularParam, rng: &mut ChaCha8Rng) -> Rows {
    (0..5)
        .map(|k| {
            let s = BalancedSextet::sample(rng, p, (0.05, 0.6))?;
            Ok(Row::new(format!("sextet {k}"), check_beta_integral(&s, p, 1e-9)?, 1e-6))
        })
        .collect()
}

fn algebra_suite(p: &ModularParam, g: Complex64, seed: u64) -> Rows {
    let pts = SampleBox::default().with_seed(seed).points(p)?;
    let mut rows = Vec::new();
    for (name, half) in [("plain", Half::Plain), ("tilde", Half::Tilde)] {
        let gs = generators(RepLabel::generic(g), p, half)?;
        let res = relation_residuals(&gs, &spanning_family(half), &pts, division_tol(p))?;
        for (k, r) in res.into_iter().enumerate() {
            rows.push(Row::new(format!("{name} relation {}", k + 1), r, 1e-10));
        }
    }
    Ok(rows)
}

fn cross_suite(p: &ModularParam, g: Complex64, seed: u64) -> Rows {
    let pts = SampleBox::default().with_seed(seed).points(p)?;
    let plain = generators(RepLabel::generic(g), p, Half::Plain)?;
    let tilde = generators(RepLabel::generic(g), p, Half::Tilde)?;
    let r = check_cross_relations(&plain, &tilde, &pts, division_tol(p))?;
    Ok(vec![Row::new("cross (anti)commutators", r, 1e-10)])
}

fn casimir_suite(p: &ModularParam, g: Complex64, seed: u64) -> Rows {
    let pts = SampleBox::default().with_seed(seed).points(p)?;
    let mut rows = Vec::new();
    for (name, half) in [("plain", Half::Plain), ("tilde", Half::Tilde)] {
        let gs = generators(RepLabel::generic(g), p, half)?;
        let r = match casimirs(&gs, &pts, division_tol(p)) {
            Ok(cas) => cas.residual,
            Err(Error::ScalarMismatch { spread }) => spread,
            Err(e) => return Err(e.into()),
        };
        rows.push(Row::new(format!("{name} Casimirs"), r, 1e-10));
    }
    Ok(rows)
}

fn intertwine_suite(p: &ModularParam, seed: u64) -> Rows {
    let pts = SampleBox::default().with_seed(seed).points(p)?;
    [(1, 0), (0, 1), (2, 0), (1, 1)]
        .into_iter()
        .map(|(n, m)| {
            Ok(Row::new(
                format!("label ({n},{m})"),
                check_intertwining(n, m, p, &pts)?,
                1e-9,
            ))
        })
        .collect()
}

fn inversion_suite(p: &ModularParam, g: Complex64) -> Rows {
    let pts = numeric_points();
    let generic = check_inversion(g, &gaussian, &pts[..2], p, 1e-5)?;
    let lattice = match check_inversion(pinch_label(1, 0, p), &gaussian, &pts, p, 1e-5) {
        Err(Error::ExpectedViolation { .. }) => 0.0,
        _ => f64::INFINITY,
    };
    Ok(vec![
        Row::new("M(g) M(-g) = 1 at generic g", generic, 1e-5),
        Row::new("lattice point reported as violation", lattice, 1e-5),
    ])
}

fn lax_suite(p: &ModularParam, inputs: SuiteInputs, seed: u64) -> Rows {
    let g = inputs.g.unwrap_or(c(0.3, 0.0));
    let funcs = sample_functions(12, seed, p);
    let pts = SampleBox::default().with_seed(seed).points(p)?;
    let lax = l_fundamental(inputs.u, g, p)?;
    let gen = l_from_generators(inputs.u - p.eta(), g, p)?;
    Ok(vec![Row::new(
        "factorized Lax vs generator form",
        compare_exact(&lax, &gen, &funcs, &pts, p)?,
        1e-10,
    )])
}

fn random_pairs(rng: &mut ChaCha8Rng, count: usize) -> Vec<(Complex64, Complex64)> {
    (0..count)
        .map(|_| (c(rng.random_range(-0.6..0.6), 0.0), c(rng.random_range(-0.6..0.6), 0.0)))
        .collect()
}

fn ybe_suite(p: &ModularParam, rng: &mut ChaCha8Rng) -> Rows {
    random_pairs(rng, 5)
        .into_iter()
        .map(|(u, v)| {
            let r = check_ybe(
                &seven_vertex(u - v, p)?,
                &seven_vertex(u, p)?,
                &seven_vertex(v, p)?,
                (2, 2, 2),
            )?;
            Ok(Row::new(format!("7-vertex u={:.4} v={:.4}", u.re, v.re), r, 1e-12))
        })
        .collect()
}

fn rll_suite(p: &ModularParam, inputs: SuiteInputs, seed: u64) -> Rows {
    let funcs = sample_functions(4, seed, p);
    let pts = SampleBox::default().with_seed(seed).with_count(16).points(p)?;
    let (u, v) = (inputs.u, c(0.17, 0.0));
    let shift = 0.5 * p.b_inv();
    let labels = match inputs.g {
        Some(g) => vec![g],
        None => vec![c(0.3, 0.0), c(0.45, 0.0)],
    };
    let mut rows = Vec::new();
    for g in labels {
        let la = l_fundamental(u - shift, g, p)?;
        let lb = l_fundamental(v - shift, g, p)?;
        let r = check_rll(&seven_vertex(u - v, p)?, &la, &lb, &funcs, &pts, p)?;
        rows.push(Row::new(format!("RLL g={:.3}{:+.3}i", g.re, g.im), r, 1e-9));
    }
    let quad = RapidityQuad {
        u1: c(0.11, 0.02),
        u2: c(-0.07, 0.0),
        v1: c(0.05, 0.0),
        v2: c(0.13, 0.0),
    };
    let f = |z1: Complex64, z2: Complex64| (-(z1 * z1) + 0.3 * z2).exp() * (z1 * z2 + 0.2).cos();
    let spts = [(c(0.13, 0.05), c(-0.2, 0.03)), (c(0.31, -0.04), c(0.07, 0.1))];
    let s = check_s_permutation(quad, &f, &spts, p, &GammaConfig::new(p))?;
    rows.push(Row::new("S-permutation", s, 1e-10));
    Ok(rows)
}

fn spin_one_pair(u: Complex64, p: &ModularParam) -> Result<(DenseCMatrix, DenseCMatrix), CliError> {
    let ra = r_dense(u, 2, (1, 0), p)?.phi;
    let rb = r_dense(-u, 1, (2, 0), p)?.phi;
    let rm = &(&DenseCMatrix::swap_permutation(2, 3) * &rb) * &DenseCMatrix::swap_permutation(3, 2);
    Ok((ra, rm))
}

fn unitarity_suite(p: &ModularParam, rng: &mut ChaCha8Rng) -> Rows {
    let mut rows = Vec::new();
    for (u, _) in random_pairs(rng, 5) {
        let fit = check_unitarity(&seven_vertex(u, p)?, &seven_vertex(-u, p)?)?;
        rows.push(Row::new(format!("7-vertex u={:.4}", u.re), fit.residual, 1e-12));
    }
    let (ra, rm) = spin_one_pair(c(0.27, 0.0), p)?;
    rows.push(Row::new(
        "spin-1 x spin-1/2 u=0.27",
        check_unitarity(&ra, &rm)?.residual,
        1e-10,
    ));
    Ok(rows)
}

fn factorization_suite(p: &ModularParam, inputs: SuiteInputs, rng: &mut ChaCha8Rng, seed: u64) -> Rows {
    let g = inputs.g.unwrap_or(c(0.3, 0.0));
    let funcs = sample_functions(12, seed, p);
    let pts = SampleBox::default().with_seed(seed).points(p)?;
    let reduced = r_finite(inputs.u, 1, g, p)?;
    let lax = l_fundamental(inputs.u - 0.5 * p.b_inv(), g, p)?;
    let fit = compare_projective(&reduced, &lax, &funcs, &pts, p)?;
    let vsym = (1..=4).map(|n| v_symmetry_gap(inputs.u, n, p)).fold(0.0f64, f64::max);
    let mut rows = vec![
        Row::new("n=1 reduces to shifted Lax", fit.residual, 1e-10),
        Row::new("n=1 ratio equals -1/2", (fit.ratio + 0.5).norm(), 1e-10),
        Row::new("V(u,-z) = V(u,z) C for n<=4", vsym, 1e-13),
    ];
    for (u, v) in random_pairs(rng, 3) {
        let r12 = r_dense(u - v, 2, (1, 0), p)?.phi;
        let r13 = r_dense(u, 2, (1, 0), p)?.phi;
        let r23 = r_dense(v, 1, (1, 0), p)?.phi;
        rows.push(Row::new(
            format!("spin-1 YBE u={:.4} v={:.4}", u.re, v.re),
            check_ybe(&r12, &r13, &r23, (3, 2, 2))?,
            1e-10,
        ));
    }
    Ok(rows)
}
