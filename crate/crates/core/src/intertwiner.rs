//! The intertwining operator `M(g)` between the representations with labels
//! `g` and `−g`: its integral form, the finite-difference form at lattice
//! labels, contiguous relations, inversion and the finite-dimensional
//! kernel.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Mutex;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::cx::{I, ONE, ZERO};
use crate::error::{Error, Result};
use crate::funspace::{poly_eval, shift_amount, DiffOp, Rational, TrigPoly};
use crate::hypgamma::{gamma, gamma_residue, GammaConfig, ModularParam};
use crate::quadrature::{integrate_decaying_floor, Contour};
use crate::sklyanin::{generators, mixed_family, Half, RepLabel, ALL_GENERATORS};
use crate::weights::rho_trig;

/// Offset used for the symmetric limit at pinch labels, where the integral
/// form is `0 · ∞`.
pub const PINCH_OFFSET: f64 = 1e-5;

/// Test-function values below this are treated as zero inside integrands.
const NEGLIGIBLE: f64 = 1e-60;

/// Pole families enumerated up to this many steps in each period.
const POLE_DEPTH: u32 = 8;

/// Even test function for the integral form.
pub type TestFn<'a> = &'a (dyn Fn(Complex64) -> Complex64 + Sync);

/// How `M(g)` is represented.
#[derive(Debug, Clone, PartialEq)]
pub enum MOperator {
    /// Integral form, valid for any label away from the pinch lattice.
    Integral(Complex64),
    /// Finite-difference form at `g = nb/2 + m/(2b)`.
    Factorized { n: u32, m: u32, op: DiffOp },
}

impl MOperator {
    pub fn factorized(n: u32, m: u32, p: &ModularParam) -> Self {
        Self::Factorized {
            n,
            m,
            op: m_factorized(n, m, p),
        }
    }

    pub fn label(&self, p: &ModularParam) -> Complex64 {
        match self {
            Self::Integral(g) => *g,
            Self::Factorized { n, m, .. } => pinch_label(*n, *m, p),
        }
    }
}

/// `nb/2 + m/(2b)`.
pub fn pinch_label(n: u32, m: u32, p: &ModularParam) -> Complex64 {
    0.5 * (p.b() * n as f64 + p.b_inv() * m as f64)
}

/// The lattice point `(n, m)` with `g = nb/2 + m/(2b)`, if any.
pub fn pinch_site(g: Complex64, p: &ModularParam) -> Option<(u32, u32)> {
    for n in 0..=POLE_DEPTH {
        for m in 0..=POLE_DEPTH {
            if (g - pinch_label(n, m, p)).norm() < 1e-7 {
                return Some((n, m));
            }
        }
    }
    None
}

/// `−i/sin(2πi x z) · sin((x/2)∂_z) = −(1/(2 sin(2πixz)))(T₊ − T₋)` for one half.
fn elementary_factor(half: Half) -> DiffOp {
    let den = half.sine();
    let mut op = DiffOp::term(
        half.step(1),
        Rational {
            num: TrigPoly::constant(-0.5 * ONE),
            den: den.clone(),
        },
    );
    op.add_term(
        half.step(-1),
        Rational {
            num: TrigPoly::constant(0.5 * ONE),
            den,
        },
    );
    op
}

/// `M(nb/2 + m/(2b))` as a product of `n + m` elementary factors.
pub fn m_factorized(n: u32, m: u32, p: &ModularParam) -> DiffOp {
    let mut op = DiffOp::identity();
    let fb = elementary_factor(Half::Plain);
    let fbi = elementary_factor(Half::Tilde);
    for _ in 0..m {
        op = fbi.compose(&op, p);
    }
    for _ in 0..n {
        op = fb.compose(&op, p);
    }
    op
}

/// Coefficients `β_l(z)`, `l = 1..n+1`, of `M(nb/2) = Σ_l β_l T^{n+2−2l}`,
/// where `T` is the half-step shift `z → z + ib/2`.
pub fn m_shift_coeffs(n: u32, p: &ModularParam) -> Vec<Rational> {
    let op = m_factorized(n, 0, p);
    (1..=n as i32 + 1)
        .map(|l| {
            op.coefficient((n as i32 + 2 - 2 * l, 0))
                .cloned()
                .unwrap_or_else(|| Rational::poly(TrigPoly::zero()))
        })
        .collect()
}

/// Records the first error raised inside an integrand.
struct ErrorSlot(RefCell<Option<Error>>);

impl ErrorSlot {
    fn new() -> Self {
        Self(RefCell::new(None))
    }

    fn unwrap_or_record(&self, r: Result<Complex64>) -> Complex64 {
        r.unwrap_or_else(|e| {
            self.0.borrow_mut().get_or_insert(e);
            ZERO
        })
    }

    fn finish(self) -> Result<()> {
        self.0.into_inner().map_or(Ok(()), Err)
    }
}

/// `γ(−g ± iz ± ix)` with the two `+ix` factors first.
fn kernel_gammas(
    g: Complex64,
    z: Complex64,
    x: Complex64,
    p: &ModularParam,
    cfg: &GammaConfig,
) -> Result<[Complex64; 4]> {
    Ok([
        gamma(-g + I * z + I * x, p, cfg)?,
        gamma(-g - I * z + I * x, p, cfg)?,
        gamma(-g + I * z - I * x, p, cfg)?,
        gamma(-g - I * z - I * x, p, cfg)?,
    ])
}

/// Upper-family poles `x = i(N − g) ∓ z` and lower-family poles
/// `x = −i(N − g) ± z`, each tagged with the factor index and `(n, m)`.
struct KernelPole {
    x: Complex64,
    factor: usize,
    site: (u32, u32),
}

fn kernel_poles(g: Complex64, z: Complex64, p: &ModularParam) -> Vec<KernelPole> {
    let mut out = Vec::new();
    for n in 0..=POLE_DEPTH {
        for m in 0..=POLE_DEPTH {
            let big_n = p.b() * n as f64 + p.b_inv() * m as f64;
            let up = I * (big_n - g);
            out.push(KernelPole {
                x: up - z,
                factor: 0,
                site: (n, m),
            });
            out.push(KernelPole {
                x: up + z,
                factor: 1,
                site: (n, m),
            });
            out.push(KernelPole {
                x: -up + z,
                factor: 2,
                site: (n, m),
            });
            out.push(KernelPole {
                x: -up - z,
                factor: 3,
                site: (n, m),
            });
        }
    }
    out
}

/// Height of the integration line. When the two families are separated by
/// a horizontal line, the middle of that gap; otherwise the middle of the
/// widest gap between pole heights inside `[−2, 2]`.
fn line_height(poles: &[KernelPole]) -> f64 {
    let lowest_upper = poles
        .iter()
        .filter(|q| q.factor < 2)
        .map(|q| q.x.im)
        .fold(f64::INFINITY, f64::min);
    let highest_lower = poles
        .iter()
        .filter(|q| q.factor >= 2)
        .map(|q| q.x.im)
        .fold(f64::NEG_INFINITY, f64::max);
    if highest_lower < lowest_upper {
        return 0.5 * (highest_lower + lowest_upper);
    }
    let mut hs: Vec<f64> = poles.iter().map(|q| q.x.im).filter(|h| h.abs() < 2.0).collect();
    hs.push(-2.0);
    hs.push(2.0);
    hs.sort_by(f64::total_cmp);
    let (mut best, mut width) = (0.0, -1.0);
    for w in hs.windows(2) {
        if w[1] - w[0] > width {
            width = w[1] - w[0];
            best = 0.5 * (w[0] + w[1]);
        }
    }
    best
}

/// `γ(−g±iz±ix) / γ(±2ix)`, using `1/(γ(2ix)γ(−2ix)) = 4 sinh(2πbx) sinh(2πx/b)`.
fn kernel(g: Complex64, z: Complex64, x: Complex64, p: &ModularParam, cfg: &GammaConfig) -> Result<Complex64> {
    let gs = kernel_gammas(g, z, x, p, cfg)?;
    Ok(2.0 * rho_trig(x, p) * gs.iter().product::<Complex64>())
}

/// `[M(g)Φ](z)` by quadrature along a horizontal line plus the residues of
/// the poles that the line leaves on the wrong side.
fn m_apply_line(g: Complex64, phi: TestFn, z: Complex64, p: &ModularParam, tol: f64, floor: f64) -> Result<Complex64> {
    let cfg = GammaConfig::new(p).with_tol((tol * 1e-3).max(1e-14));
    let poles = kernel_poles(g, z, p);
    let c = line_height(&poles);
    let slot = ErrorSlot::new();
    let integrand = |x: Complex64| {
        let f = phi(x);
        // The kernel grows at most exponentially; skip it where Φ has died.
        if f.norm() < NEGLIGIBLE {
            return ZERO;
        }
        slot.unwrap_or_record(kernel(g, z, x, p, &cfg).map(|k| k * f))
    };
    let line = integrate_decaying_floor(integrand, &Contour::shifted(c), tol, floor);
    slot.finish()?;
    let mut total = line?.value;
    for q in &poles {
        let upper = q.factor < 2;
        let wrong_side = if upper { q.x.im < c } else { q.x.im > c };
        if !wrong_side {
            continue;
        }
        // Residue in x: dw/dx = ±i for the factor that is singular.
        let jac = if upper { I } else { -I };
        let mut rest = 2.0 * rho_trig(q.x, p) * phi(q.x);
        let gs = kernel_gammas_except(g, z, q.x, q.factor, p, &cfg)?;
        rest *= gs;
        let res = gamma_residue(q.site.0, q.site.1, p) / jac * rest;
        total += if upper { 2.0 * PI * I * res } else { -2.0 * PI * I * res };
    }
    let norm = gamma(-2.0 * g, p, &cfg)?;
    Ok(0.5 * total / norm)
}

fn kernel_gammas_except(
    g: Complex64,
    z: Complex64,
    x: Complex64,
    skip: usize,
    p: &ModularParam,
    cfg: &GammaConfig,
) -> Result<Complex64> {
    let args = [
        -g + I * z + I * x,
        -g - I * z + I * x,
        -g + I * z - I * x,
        -g - I * z - I * x,
    ];
    let mut out = ONE;
    for (k, a) in args.iter().enumerate() {
        if k != skip {
            out *= gamma(*a, p, cfg)?;
        }
    }
    Ok(out)
}

/// `[M(g)Φ](z) = (1/2)∫ γ(−g±iz±ix)/(γ(±2ix)γ(−2g)) Φ(x) dx` for even,
/// rapidly decaying `Φ`. At pinch labels `g = nb/2 + m/(2b)` the value is
/// the symmetric limit over `g ± PINCH_OFFSET`.
pub fn m_apply_numeric(g: Complex64, phi: TestFn, z: Complex64, p: &ModularParam, tol: f64) -> Result<Complex64> {
    m_apply_with_floor(g, phi, z, p, tol, 0.0)
}

/// As [`m_apply_numeric`], accepting an absolute quadrature error `floor`.
fn m_apply_with_floor(
    g: Complex64,
    phi: TestFn,
    z: Complex64,
    p: &ModularParam,
    tol: f64,
    floor: f64,
) -> Result<Complex64> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::Domain(format!("tolerance {tol} outside (0, 1)")));
    }
    if pinch_site(g, p).is_some() {
        let up = m_apply_line(g + PINCH_OFFSET, phi, z, p, tol, floor)?;
        let down = m_apply_line(g - PINCH_OFFSET, phi, z, p, tol, floor)?;
        return Ok(0.5 * (up + down));
    }
    m_apply_line(g, phi, z, p, tol, floor)
}

/// Evaluation points for the numeric checks; away from the zeros of
/// `sin(2πibz)` and `sin(2πiz/b)`.
pub fn numeric_points() -> Vec<Complex64> {
    vec![
        Complex64::new(0.13, 0.0),
        Complex64::new(-0.31, 0.02),
        Complex64::new(0.27, -0.04),
        Complex64::new(0.45, 0.01),
    ]
}

/// The Gaussian `e^{−x²}`.
pub fn gaussian(x: Complex64) -> Complex64 {
    (-x * x).exp()
}

/// Residual of `F ∘ M(g) = M(g + x/2)` on `Φ` at the given points, where
/// `F` is the elementary factor of the chosen half (`x = b` or `1/b`).
pub fn check_contiguous_numeric(
    g: Complex64,
    half: Half,
    phi: TestFn,
    points: &[Complex64],
    p: &ModularParam,
    tol: f64,
) -> Result<f64> {
    let op = elementary_factor(half);
    let step = 0.5 * half.period(p);
    let rows = points
        .par_iter()
        .map(|&z| -> Result<(Complex64, Complex64)> {
            let mut lhs = ZERO;
            for (s, r) in op.terms() {
                let shifted = z + shift_amount(*s, p);
                lhs += r.eval(z, p) * m_apply_numeric(g, phi, shifted, p, tol)?;
            }
            Ok((lhs, m_apply_numeric(g + step, phi, z, p, tol)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(residual_of(&rows))
}

/// `max|a − b| / max(1, |a|, |b|)` over pairs.
fn residual_of(rows: &[(Complex64, Complex64)]) -> f64 {
    let mut diff = 0.0f64;
    let mut scale = 1.0f64;
    for (a, b) in rows {
        diff = diff.max((a - b).norm());
        scale = scale.max(a.norm()).max(b.norm());
    }
    diff / scale
}

/// Residual of `F ∘ M(nb/2 + m/(2b)) = M` with one more factor, on
/// polynomials from the mixed family.
pub fn check_contiguous_factorized(n: u32, m: u32, half: Half, p: &ModularParam, points: &[Complex64]) -> Result<f64> {
    let lhs = elementary_factor(half).compose(&m_factorized(n, m, p), p);
    let rhs = match half {
        Half::Plain => m_factorized(n + 1, m, p),
        Half::Tilde => m_factorized(n, m + 1, p),
    };
    operator_gap(&lhs, &rhs, &mixed_family(), points, p)
}

/// Sampled gap between two operators applied pointwise to polynomials.
fn operator_gap(
    lhs: &DiffOp,
    rhs: &DiffOp,
    family: &[TrigPoly],
    points: &[Complex64],
    p: &ModularParam,
) -> Result<f64> {
    // Normalised by the summed term sizes: the operators are sums of large
    // terms that cancel, so the result alone would understate rounding.
    let magnitude = |op: &DiffOp, f: &TrigPoly, z: Complex64| -> f64 {
        op.terms()
            .map(|(s, r)| (r.eval(z, p) * poly_eval(f, z + shift_amount(*s, p), p)).norm())
            .sum()
    };
    let mut worst = 0.0f64;
    for f in family {
        let fe = |w: Complex64| poly_eval(f, w, p);
        for &z in points {
            let gap = (lhs.apply_fn(&fe, z, p) - rhs.apply_fn(&fe, z, p)).norm();
            let scale = magnitude(lhs, f, z).max(magnitude(rhs, f, z)).max(1.0);
            worst = worst.max(gap / scale);
        }
    }
    Ok(worst)
}

/// Factorized against integral form of `M(nb/2 + m/(2b))` on `Φ`.
pub fn check_factorized_vs_integral(
    n: u32,
    m: u32,
    phi: TestFn,
    points: &[Complex64],
    p: &ModularParam,
    tol: f64,
) -> Result<f64> {
    let op = m_factorized(n, m, p);
    let g = pinch_label(n, m, p);
    let rows = points
        .par_iter()
        .map(|&z| Ok((op.apply_fn(&|w| phi(w), z, p), m_apply_numeric(g, phi, z, p, tol)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(residual_of(&rows))
}

/// Largest sampled residual of `M(g) X(g) − X(−g) M(g)` over the eight
/// generators of both halves, at the label `g = nb/2 + m/(2b)`.
pub fn check_intertwining(n: u32, m: u32, p: &ModularParam, points: &[Complex64]) -> Result<f64> {
    let g = pinch_label(n, m, p);
    let mop = m_factorized(n, m, p);
    let mut worst = 0.0f64;
    for half in [Half::Plain, Half::Tilde] {
        let plus = generators(RepLabel::generic(g), p, half)?;
        let minus = generators(RepLabel::generic(-g), p, half)?;
        for x in ALL_GENERATORS {
            let lhs = mop.compose(plus.get(x), p);
            let rhs = minus.get(x).compose(&mop, p);
            worst = worst.max(operator_gap(&lhs, &rhs, &mixed_family(), points, p)?);
        }
    }
    Ok(worst)
}

/// Residual of `M(−g) M(g) Φ = Φ` at the given points. Lattice labels,
/// where `M(g)` has a kernel, are reported as `ExpectedViolation`.
pub fn check_inversion(g: Complex64, phi: TestFn, points: &[Complex64], p: &ModularParam, tol: f64) -> Result<f64> {
    if let Some((n, m)) = pinch_site(g, p).filter(|s| *s != (0, 0)) {
        return Err(Error::ExpectedViolation { n, m });
    }
    if let Some((n, m)) = pinch_site(-g, p).filter(|s| *s != (0, 0)) {
        return Err(Error::ExpectedViolation { n, m });
    }
    let inner_tol = (tol * 1e-1).max(1e-12);
    // The outer quadratures for different z share most of their nodes.
    let cache: Mutex<HashMap<(u64, u64), Complex64>> = Mutex::new(HashMap::new());
    let inner = |x: Complex64| -> Complex64 {
        let key = (x.re.to_bits(), x.im.to_bits());
        if let Some(v) = cache.lock().expect("cache lock").get(&key) {
            return *v;
        }
        // Φ is normalised to O(1), so an absolute floor keeps the far tails cheap.
        let v =
            m_apply_with_floor(g, phi, x, p, inner_tol, 1e-3 * inner_tol).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
        cache.lock().expect("cache lock").insert(key, v);
        v
    };
    let rows = points
        .par_iter()
        .map(|&z| Ok((m_apply_numeric(-g, &inner, z, p, tol)?, phi(z))))
        .collect::<Result<Vec<_>>>()?;
    if rows.iter().any(|(a, _)| !a.re.is_finite() || !a.im.is_finite()) {
        return Err(Error::NonConvergence("inner M evaluation failed".into()));
    }
    Ok(residual_of(&rows))
}

/// Basis `{cos(2πijbz) cos(2πilz/b)}`, `j ≤ n`, `l ≤ m`, of the
/// `(n+1)(m+1)`-dimensional representation at `g_{n,m}`.
pub fn representation_basis(n: u32, m: u32) -> Vec<TrigPoly> {
    let mut out = Vec::new();
    for j in 0..=n as i32 {
        for l in 0..=m as i32 {
            // cos(2πijbz) = (t^j + t^{-j})/2
            let half = ONE * 0.5;
            out.push(&Half::Plain.sym(j).scale(half) * &Half::Tilde.sym(l).scale(half));
        }
    }
    out
}

/// The generating function `γ(g_{n,m} ± ix ± iz)` as a polynomial in `z`,
/// from its finite trigonometric product form.
pub fn generating_function(n: u32, m: u32, x: Complex64, p: &ModularParam) -> TrigPoly {
    let (b, bi) = (p.b(), p.b_inv());
    let mut out = TrigPoly::one();
    // 2 sin(B + A) · 2 sin(B − A) = 2 cos 2A − 2 cos 2B, with 2A = ±2πi·x·(b or 1/b).
    let pair = |period: Complex64, shift: Complex64, half: Half| -> TrigPoly {
        let two_cos_2a = 2.0 * (2.0 * PI * period * I * x).cos();
        let ph = (2.0 * PI * I * period * shift).exp();
        // 2 cos 2B with B = π·period·(iz + shift): x^{-1} e^{2πi·period·shift} + x e^{−2πi·period·shift}
        &TrigPoly::constant(two_cos_2a) - &(&half.mono(-1, ph) + &half.mono(1, ONE / ph))
    };
    for r in 0..n {
        let c = 0.5 * b * (n as f64 - 1.0 - 2.0 * r as f64) + 0.5 * bi * (m as f64 + 1.0);
        out = &out * &pair(b, c, Half::Plain);
    }
    for s in 0..m {
        let c = 0.5 * bi * (m as f64 - 1.0 - 2.0 * s as f64) - 0.5 * b * (n as f64 - 1.0);
        out = &out * &pair(bi, c, Half::Tilde);
    }
    out
}

/// Checks the finite-dimensional kernel at `g_{n,m}`: the generating
/// function lies in the span of [`representation_basis`] for each sampled
/// `x`, and `M(g_{n,m}) = m_factorized(n+1, m+1)` annihilates that span.
pub fn kernel_basis(n: u32, m: u32, p: &ModularParam, xs: &[Complex64], tol: f64) -> Result<Vec<TrigPoly>> {
    let basis = representation_basis(n, m);
    let mop = m_factorized(n + 1, m + 1, p);
    for v in &basis {
        let img = mop.apply(v, p, 1e-8)?;
        if img.max_coeff() > tol {
            return Err(Error::SpanFailure {
                residual: img.max_coeff(),
            });
        }
    }
    for &x in xs {
        let gf = generating_function(n, m, x, p);
        match crate::funspace::coords_in_basis(&gf, &basis, tol) {
            Ok(_) => {}
            Err(Error::NotInvariant { residual }) => return Err(Error::SpanFailure { residual }),
            Err(e) => return Err(e),
        }
    }
    Ok(basis)
}
