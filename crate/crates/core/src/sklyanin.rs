//! Finite-difference realisation of the degenerate Sklyanin algebra and its
//! tilde copy (`b → 1/b`), with relation, Casimir and Verma-module checks.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::cx::{I, ONE};
use crate::error::{Error, Result};
use crate::funspace::{coords_in_basis, func_equal_sampled, poly_eval, DiffOp, Rational, Shift, TrigPoly};
use crate::hypgamma::ModularParam;

/// Relative remainder tolerated when dividing by `sin(2πibz)`; cancellations
/// grow with `|Im b²|`, so this is looser than the output accuracy.
const DIVISION_TOL: f64 = 1e-8;

/// Representation label `g`, optionally tagged with the lattice point
/// `g_{n,m} = (b/2)(n+1) + (1/(2b))(m+1)` of a finite-dimensional irrep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepLabel {
    pub g: Complex64,
    pub lattice: Option<(u32, u32)>,
}

impl RepLabel {
    pub fn generic(g: Complex64) -> Self {
        Self { g, lattice: None }
    }

    pub fn lattice(n: u32, m: u32, p: &ModularParam) -> Self {
        Self {
            g: g_nm(n, m, p),
            lattice: Some((n, m)),
        }
    }

    /// `(n+1)(m+1)` for lattice labels.
    pub fn dimension(&self) -> Option<usize> {
        self.lattice.map(|(n, m)| (n as usize + 1) * (m as usize + 1))
    }
}

/// `g_{n,m} = (b/2)(n+1) + (1/(2b))(m+1)`.
pub fn g_nm(n: u32, m: u32, p: &ModularParam) -> Complex64 {
    0.5 * p.b() * (n + 1) as f64 + 0.5 * p.b_inv() * (m + 1) as f64
}

/// Which half of the modular double.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Half {
    Plain,
    Tilde,
}

impl Half {
    /// The period the half is built from: `b` or `1/b`.
    pub fn period(self, p: &ModularParam) -> Complex64 {
        match self {
            Half::Plain => p.b(),
            Half::Tilde => p.b_inv(),
        }
    }

    /// Monomial `x^k` with `x = t` or `x = s`.
    pub fn mono(self, k: i32, c: Complex64) -> TrigPoly {
        match self {
            Half::Plain => TrigPoly::monomial(k, 0, c),
            Half::Tilde => TrigPoly::monomial(0, k, c),
        }
    }

    /// Elementary shift `±1` in the direction of this half.
    pub fn step(self, sign: i32) -> Shift {
        match self {
            Half::Plain => (sign, 0),
            Half::Tilde => (0, sign),
        }
    }

    /// `sin(2πi x z)` for the period of this half.
    pub fn sine(self) -> TrigPoly {
        match self {
            Half::Plain => TrigPoly::sin_b(),
            Half::Tilde => TrigPoly::sin_binv(),
        }
    }

    /// `x^k + x^{-k}`.
    pub fn sym(self, k: i32) -> TrigPoly {
        &self.mono(k, ONE) + &self.mono(-k, ONE)
    }
}

/// The four generators of one half at a given label.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSet {
    pub a: DiffOp,
    pub b: DiffOp,
    pub c: DiffOp,
    pub d: DiffOp,
    pub half: Half,
    pub label: RepLabel,
    pub param: ModularParam,
}

impl GeneratorSet {
    /// `πx²` with `x` the period of this half.
    pub fn kappa(&self) -> Complex64 {
        let x = self.half.period(&self.param);
        PI * x * x
    }

    pub fn get(&self, which: Generator) -> &DiffOp {
        match which {
            Generator::A => &self.a,
            Generator::B => &self.b,
            Generator::C => &self.c,
            Generator::D => &self.d,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    A,
    B,
    C,
    D,
}

pub const ALL_GENERATORS: [Generator; 4] = [Generator::A, Generator::B, Generator::C, Generator::D];

/// `(1/sin(2πixz)) · (up·T₊ − down·T₋)`.
fn two_shift(half: Half, up: TrigPoly, down: TrigPoly) -> DiffOp {
    let den = half.sine();
    let mut op = DiffOp::term(
        half.step(1),
        Rational {
            num: up,
            den: den.clone(),
        },
    );
    op.add_term(half.step(-1), Rational { num: -&down, den });
    op
}

/// Builds the generators of the given half at label `g`.
pub fn generators(label: RepLabel, p: &ModularParam, half: Half) -> Result<GeneratorSet> {
    let x = half.period(p);
    let kappa = PI * x * x;
    let sk = kappa.sin();
    if sk.norm() < 1e-10 {
        return Err(Error::DegenerateParam(format!("sin(π x²) = 0 for x = {x}")));
    }
    let g = label.g;
    let mono = |k: i32, c: Complex64| half.mono(k, c);
    let a =
        two_shift(half, mono(1, ONE), mono(-1, ONE)).scale(0.5 * I * (0.5 * I * kappa).exp() * (-PI * I * x * g).exp());
    let c = two_shift(half, mono(0, ONE), mono(0, ONE)).scale(ONE / (2.0 * sk));
    let d = two_shift(half, mono(-1, ONE), mono(1, ONE))
        .scale(-0.5 * I * (-0.5 * I * kappa).exp() * (PI * I * x * g).exp());
    let phi = PI * (2.0 * x * g - x * x);
    let (ep, em) = ((I * phi).exp(), (-I * phi).exp());
    let cos_plus = &mono(-2, 0.5 * ep) + &mono(2, 0.5 * em);
    let cos_minus = &mono(2, 0.5 * ep) + &mono(-2, 0.5 * em);
    let b = c
        .scale(-0.5 * kappa.cos())
        .plus(&two_shift(half, cos_plus, cos_minus).scale(-ONE / (4.0 * sk)));
    Ok(GeneratorSet {
        a,
        b,
        c,
        d,
        half,
        label,
        param: *p,
    })
}

/// Lazily applies products of generators to a fixed polynomial.
struct Applier<'a> {
    gs: &'a GeneratorSet,
    tol: f64,
}

impl Applier<'_> {
    /// `X₁ X₂ … X_k f` (rightmost applied first).
    fn word(&self, word: &[&DiffOp], f: &TrigPoly) -> Result<TrigPoly> {
        let mut v = f.clone();
        for op in word.iter().rev() {
            v = op.apply(&v, &self.gs.param, self.tol)?;
        }
        Ok(v)
    }
}

fn lin(terms: &[(Complex64, &TrigPoly)]) -> TrigPoly {
    let mut out = TrigPoly::zero();
    for (c, pl) in terms {
        out = &out + &pl.scale(*c);
    }
    out
}

/// Normalised sampled distance between two polynomials.
fn sampled_gap(lhs: &TrigPoly, rhs: &TrigPoly, points: &[Complex64], p: &ModularParam) -> f64 {
    let f = |z: Complex64| poly_eval(lhs, z, p);
    let g = |z: Complex64| poly_eval(rhs, z, p);
    func_equal_sampled(&f, &g, points, f64::INFINITY).max_residual
}

/// Default spanning family `{x^j + x^{-j}}_{j=0..6}` of one half.
pub fn spanning_family(half: Half) -> Vec<TrigPoly> {
    (0..=6).map(|j| half.sym(j)).collect()
}

/// Residuals of the six defining relations, each maximised over `family`.
pub fn relation_residuals(gs: &GeneratorSet, family: &[TrigPoly], points: &[Complex64], tol: f64) -> Result<[f64; 6]> {
    let ap = Applier { gs, tol };
    let k = gs.kappa();
    let e = (I * k).exp();
    let (a, b, c, d) = (&gs.a, &gs.b, &gs.c, &gs.d);
    let p = &gs.param;
    let mut worst = [0.0f64; 6];
    for f in family {
        let ca = ap.word(&[c, a], f)?;
        let ac = ap.word(&[a, c], f)?;
        let dc = ap.word(&[d, c], f)?;
        let cd = ap.word(&[c, d], f)?;
        let ad = ap.word(&[a, d], f)?;
        let da = ap.word(&[d, a], f)?;
        let cc = ap.word(&[c, c], f)?;
        let bc = ap.word(&[b, c], f)?;
        let cb = ap.word(&[c, b], f)?;
        let aa = ap.word(&[a, a], f)?;
        let dd = ap.word(&[d, d], f)?;
        let ab = ap.word(&[a, b], f)?;
        let ba = ap.word(&[b, a], f)?;
        let db = ap.word(&[d, b], f)?;
        let bd = ap.word(&[b, d], f)?;
        let rhs56 = lin(&[(0.5 * I * (2.0 * k).sin(), &ca), (-0.5 * I * (2.0 * k).sin(), &dc)]);
        let sk = k.sin();
        let pairs = [
            (ca.clone(), ac.scale(e)),
            (dc.clone(), cd.scale(e)),
            (&ad - &da, cc.scale(-2.0 * I * sk * sk * sk)),
            (&bc - &cb, (&aa - &dd).scale(ONE / (2.0 * I * sk))),
            (lin(&[(ONE, &ab), (-e, &ba)]), rhs56.clone()),
            (lin(&[(e, &db), (-ONE, &bd)]), rhs56),
        ];
        // Relations 3-6 subtract words of comparable size; normalise by the
        // largest word so rounding in the cancellation is not over-weighted.
        let words = [
            &ca, &ac, &dc, &cd, &ad, &da, &cc, &bc, &cb, &aa, &dd, &ab, &ba, &db, &bd,
        ];
        let mut scale = 1.0f64;
        for &z in points {
            for w in words {
                scale = scale.max(poly_eval(w, z, p).norm());
            }
        }
        for (slot, (lhs, rhs)) in worst.iter_mut().zip(pairs.iter()) {
            let gap = points.iter().fold(0.0f64, |m, &z| {
                m.max((poly_eval(lhs, z, p) - poly_eval(rhs, z, p)).norm())
            });
            *slot = slot.max(gap / scale);
        }
    }
    Ok(worst)
}

/// Largest sampled residual of the six defining relations.
pub fn check_algebra(gs: &GeneratorSet, points: &[Complex64], tol: f64) -> Result<f64> {
    let family = spanning_family(gs.half);
    Ok(relation_residuals(gs, &family, points, tol)?
        .into_iter()
        .fold(0.0, f64::max))
}

/// Products `(t^j + t^{-j})(s^l + s^{-l})`, `0 ≤ j, l ≤ 3`.
pub fn mixed_family() -> Vec<TrigPoly> {
    let mut out = Vec::new();
    for j in 0..=3 {
        for l in 0..=3 {
            out.push(&Half::Plain.sym(j) * &Half::Tilde.sym(l));
        }
    }
    out
}

/// Largest sampled residual of the cross relations between the halves:
/// `{A, D}` anticommute with `{B̃, C̃}`, `{B, C}` anticommute with `{Ã, D̃}`,
/// `{A, D}` commute with `{Ã, D̃}` and `{B, C}` commute with `{B̃, C̃}`.
pub fn check_cross_relations(
    plain: &GeneratorSet,
    tilde: &GeneratorSet,
    points: &[Complex64],
    tol: f64,
) -> Result<f64> {
    if plain.label.g != tilde.label.g || plain.param != tilde.param {
        return Err(Error::Domain(
            "cross relations need the same label and parameter".into(),
        ));
    }
    let p = &plain.param;
    let ap = Applier { gs: plain, tol };
    let mut worst = 0.0f64;
    use Generator::*;
    for f in mixed_family() {
        for x in ALL_GENERATORS {
            for y in ALL_GENERATORS {
                let diagonal_x = matches!(x, A | D);
                let diagonal_y = matches!(y, A | D);
                let sign = if diagonal_x == diagonal_y { -ONE } else { ONE };
                let (ox, oy) = (plain.get(x), tilde.get(y));
                let xy = ap.word(&[ox, oy], &f)?;
                let yx = ap.word(&[oy, ox], &f)?;
                let zero = TrigPoly::zero();
                worst = worst.max(
                    sampled_gap(&lin(&[(ONE, &xy), (sign, &yx)]), &zero, points, p) / xy_scale(&xy, &yx, points, p),
                );
            }
        }
    }
    Ok(worst)
}

fn xy_scale(a: &TrigPoly, b: &TrigPoly, points: &[Complex64], p: &ModularParam) -> f64 {
    let mut s = 1.0f64;
    for &z in points {
        s = s.max(poly_eval(a, z, p).norm()).max(poly_eval(b, z, p).norm());
    }
    s
}

/// Casimir operators and their expected scalar values.
#[derive(Debug, Clone, PartialEq)]
pub struct Casimirs {
    pub k0: DiffOp,
    pub k1: DiffOp,
    pub k0_expected: Complex64,
    pub k1_expected: Complex64,
    /// Sampled residual of `K_i f − value_i f` over the spanning family.
    pub residual: f64,
}

/// Composes the two Casimirs and checks that they act as the scalars
/// `e^{iπx²}` and `cos(2πxg)/(2 sin²πx²)`.
pub fn casimirs(gs: &GeneratorSet, points: &[Complex64], tol: f64) -> Result<Casimirs> {
    let p = &gs.param;
    let k = gs.kappa();
    let e = (I * k).exp();
    let sk = k.sin();
    let x = gs.half.period(p);
    let (a, b, c, d) = (&gs.a, &gs.b, &gs.c, &gs.d);
    let k0 = a.compose(d, p).scale(e).minus(&c.compose(c, p).scale(sk * sk));
    let k1 = a
        .compose(a, p)
        .scale((-I * k).exp() / (4.0 * sk * sk))
        .plus(&d.compose(d, p).scale(e / (4.0 * sk * sk)))
        .minus(&b.compose(c, p))
        .minus(&c.compose(c, p).scale(0.5 * k.cos()));
    let k0_expected = e;
    let k1_expected = (2.0 * PI * x * gs.label.g).cos() / (2.0 * sk * sk);
    let mut residual = 0.0f64;
    for f in spanning_family(gs.half) {
        let v0 = k0.apply(&f, p, 1e-10)?;
        let v1 = k1.apply(&f, p, 1e-10)?;
        residual = residual.max(sampled_gap(&v0, &f.scale(k0_expected), points, p));
        residual = residual.max(sampled_gap(&v1, &f.scale(k1_expected), points, p));
    }
    if residual >= tol {
        return Err(Error::ScalarMismatch { spread: residual });
    }
    Ok(Casimirs {
        k0,
        k1,
        k0_expected,
        k1_expected,
        residual,
    })
}

/// `|k⟩ = B^k · 1` for `k = 0..=k_max` (plain half).
pub fn verma_vectors(g: Complex64, p: &ModularParam, k_max: usize) -> Result<Vec<TrigPoly>> {
    if k_max > 12 {
        return Err(Error::Domain(format!("k_max = {k_max} exceeds 12")));
    }
    let gs = generators(RepLabel::generic(g), p, Half::Plain)?;
    let mut out = vec![TrigPoly::one()];
    for _ in 0..k_max {
        let next = gs.b.apply(out.last().expect("non-empty"), p, DIVISION_TOL)?;
        out.push(next);
    }
    Ok(out)
}

/// Checks that `v` only contains `t^j` with `|j| ≤ k`, `j ≡ k (mod 2)`,
/// and that the top harmonic `t^{±k}` is present. Exact on coefficients.
pub fn has_verma_support(v: &TrigPoly, k: usize) -> bool {
    let k = k as i32;
    let pattern = v
        .terms()
        .all(|((j, l), _)| l == 0 && j.abs() <= k && (j - k).rem_euclid(2) == 0);
    pattern && v.coeff(k, 0) != Complex64::new(0.0, 0.0)
}

/// Expansion coefficients of `A|k⟩`, `D|k⟩` (over `|k−2l⟩`) and `C|k⟩`
/// (over `|k−1−2l⟩`).
#[derive(Debug, Clone, PartialEq)]
pub struct VermaCoeffs {
    pub a: Vec<Complex64>,
    pub d: Vec<Complex64>,
    pub c: Vec<Complex64>,
}

pub fn verma_coeffs(g: Complex64, p: &ModularParam, k: usize) -> Result<VermaCoeffs> {
    let vs = verma_vectors(g, p, k)?;
    let gs = generators(RepLabel::generic(g), p, Half::Plain)?;
    let solve = |op: &DiffOp, top: Option<usize>| -> Result<Vec<Complex64>> {
        let Some(top) = top else { return Ok(Vec::new()) };
        let image = op.apply(&vs[k], p, DIVISION_TOL)?;
        let basis: Vec<TrigPoly> = (0..=top / 2).map(|l| vs[top - 2 * l].clone()).collect();
        Ok(coords_in_basis(&image, &basis, 1e-8)?.iter().copied().collect())
    };
    Ok(VermaCoeffs {
        a: solve(&gs.a, Some(k))?,
        d: solve(&gs.d, Some(k))?,
        c: solve(&gs.c, k.checked_sub(1))?,
    })
}

/// Whether `|n+1⟩` lies in `span{|0⟩, …, |n⟩}` at label `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanReport {
    pub is_invariant: bool,
    /// Least-squares coefficients of `|n+1⟩` over `|0⟩, …, |n⟩`.
    pub expansion: Vec<Complex64>,
    /// Residual of that expansion relative to the size of `|n⟩`.
    pub residual: f64,
    /// `|n+1⟩` is identically zero (relative to `|n⟩`).
    pub vanishes: bool,
    /// Largest coefficient of `C|n+1⟩` relative to the size of `|n⟩`.
    pub c_image: f64,
}

impl SpanReport {
    pub fn c_nonzero(&self) -> bool {
        self.c_image > 1e-8
    }
}

pub fn span_test(g: Complex64, n: usize, p: &ModularParam, tol: f64) -> Result<SpanReport> {
    let vs = verma_vectors(g, p, n + 1)?;
    let target = &vs[n + 1];
    let basis = &vs[..=n];
    let scale = vs[n].max_coeff().max(1e-300);
    let gs = generators(RepLabel::generic(g), p, Half::Plain)?;
    let c_image = gs.c.apply(target, p, DIVISION_TOL)?.max_coeff() / scale;
    let x = coords_in_basis(target, basis, f64::INFINITY)?;
    let mut recon = TrigPoly::zero();
    for (v, c) in basis.iter().zip(x.iter()) {
        recon = &recon + &v.scale(*c);
    }
    let residual = (&recon - target).max_coeff() / scale.max(target.max_coeff());
    Ok(SpanReport {
        is_invariant: residual < tol,
        expansion: x.iter().copied().collect(),
        residual,
        vanishes: target.max_coeff() <= 1e-10 * scale,
        c_image,
    })
}

/// At `g = (n+1)b/2` the top harmonic of `|n+1⟩` cancels and `|n+1⟩` falls
/// back into the span of the lower vectors.
pub fn finite_dim_detect(n: usize, p: &ModularParam, tol: f64) -> Result<SpanReport> {
    let g = 0.5 * p.b() * (n + 1) as f64;
    let report = span_test(g, n, p, tol)?;
    if !report.is_invariant {
        return Err(Error::SpanFailure {
            residual: report.residual,
        });
    }
    Ok(report)
}
