//! Exact arithmetic on Laurent polynomials in `t = e^{2πbz}`, `s = e^{2πz/b}`
//! and on finite-difference operators whose coefficients are ratios of such
//! polynomials.
//!
//! A shift `(a, c)` stands for `z → z + i(a·b/2 + c/(2b))`. It multiplies
//! the monomial `t^j s^l` by `e^{iπ a j b²} (−1)^{cj + al} e^{iπ c l / b²}`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cx::{I, ONE, ZERO};
use crate::dense::DenseCMatrix;
use crate::error::{Error, Result};
use crate::hypgamma::ModularParam;

/// Shift of `z` in units of `(ib/2, i/(2b))`.
pub type Shift = (i32, i32);

/// Imaginary displacement of a shift.
pub fn shift_amount(s: Shift, p: &ModularParam) -> Complex64 {
    I * (0.5 * s.0 as f64 * p.b() + 0.5 * s.1 as f64 * p.b_inv())
}

/// Laurent polynomial `Σ c_{jl} t^j s^l`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrigPoly {
    coeffs: BTreeMap<(i32, i32), Complex64>,
}

impl TrigPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Complex64) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn one() -> Self {
        Self::constant(ONE)
    }

    pub fn monomial(j: i32, l: i32, c: Complex64) -> Self {
        let mut p = Self::zero();
        p.add_term(j, l, c);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ((i32, i32), Complex64)>) -> Self {
        let mut p = Self::zero();
        for ((j, l), c) in terms {
            p.add_term(j, l, c);
        }
        p
    }

    /// `t^j + t^{-j}` (just `2` when `j = 0`).
    pub fn t_sym(j: i32) -> Self {
        Self::from_terms([((j, 0), ONE), ((-j, 0), ONE)])
    }

    /// `s^l + s^{-l}`.
    pub fn s_sym(l: i32) -> Self {
        Self::from_terms([((0, l), ONE), ((0, -l), ONE)])
    }

    /// `sin(2πibz) = i(t − 1/t)/2`.
    pub fn sin_b() -> Self {
        Self::from_terms([((1, 0), 0.5 * I), ((-1, 0), -0.5 * I)])
    }

    /// `sin(2πiz/b) = i(s − 1/s)/2`.
    pub fn sin_binv() -> Self {
        Self::from_terms([((0, 1), 0.5 * I), ((0, -1), -0.5 * I)])
    }

    pub fn add_term(&mut self, j: i32, l: i32, c: Complex64) {
        if c == ZERO {
            return;
        }
        let e = self.coeffs.entry((j, l)).or_insert(ZERO);
        *e += c;
        if *e == ZERO {
            self.coeffs.remove(&(j, l));
        }
    }

    pub fn coeff(&self, j: i32, l: i32) -> Complex64 {
        self.coeffs.get(&(j, l)).copied().unwrap_or(ZERO)
    }

    pub fn terms(&self) -> impl Iterator<Item = ((i32, i32), Complex64)> + '_ {
        self.coeffs.iter().map(|(k, v)| (*k, *v))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.values().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// Removes coefficients with modulus at most `cut`.
    pub fn pruned(mut self, cut: f64) -> Self {
        self.coeffs.retain(|_, c| c.norm() > cut);
        self
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_terms(self.terms().map(|(k, v)| (k, v * c)))
    }

    /// Invariance under `z → -z`, i.e. `c_{jl} = c_{-j,-l}`.
    pub fn is_even(&self, tol: f64) -> bool {
        let cut = tol * self.max_coeff().max(1e-300);
        self.terms().all(|((j, l), c)| (c - self.coeff(-j, -l)).norm() <= cut)
    }

    /// Componentwise equality up to `tol` relative to the larger polynomial.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let scale = self.max_coeff().max(other.max_coeff());
        (self - other).max_coeff() <= tol * scale
    }

    fn bounds(&self) -> Option<(i32, i32, i32, i32)> {
        let mut it = self.coeffs.keys();
        let &(j0, l0) = it.next()?;
        let mut b = (j0, j0, l0, l0);
        for &(j, l) in self.coeffs.keys() {
            b.0 = b.0.min(j);
            b.1 = b.1.max(j);
            b.2 = b.2.min(l);
            b.3 = b.3.max(l);
        }
        Some(b)
    }
}

impl Add for &TrigPoly {
    type Output = TrigPoly;
    fn add(self, rhs: &TrigPoly) -> TrigPoly {
        let mut out = self.clone();
        for ((j, l), c) in rhs.terms() {
            out.add_term(j, l, c);
        }
        out
    }
}

impl Sub for &TrigPoly {
    type Output = TrigPoly;
    fn sub(self, rhs: &TrigPoly) -> TrigPoly {
        let mut out = self.clone();
        for ((j, l), c) in rhs.terms() {
            out.add_term(j, l, -c);
        }
        out
    }
}

impl Mul for &TrigPoly {
    type Output = TrigPoly;
    fn mul(self, rhs: &TrigPoly) -> TrigPoly {
        let mut out = TrigPoly::zero();
        for ((j1, l1), c1) in self.terms() {
            for ((j2, l2), c2) in rhs.terms() {
                out.add_term(j1 + j2, l1 + l2, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &TrigPoly {
    type Output = TrigPoly;
    fn neg(self) -> TrigPoly {
        self.scale(-ONE)
    }
}

/// Value at `z`.
pub fn poly_eval(pl: &TrigPoly, z: Complex64, p: &ModularParam) -> Complex64 {
    let kb = 2.0 * PI * z * p.b();
    let kbi = 2.0 * PI * z * p.b_inv();
    pl.terms()
        .map(|((j, l), c)| c * (kb * j as f64 + kbi * l as f64).exp())
        .sum()
}

/// Phase picked up by `t^j s^l` under the shift `s`.
pub fn shift_phase(j: i32, l: i32, s: Shift, p: &ModularParam) -> Complex64 {
    let b2 = p.b() * p.b();
    let (a, c) = s;
    let sign = if (c * j + a * l).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let arg = I * PI * (b2 * (a * j) as f64 + (c * l) as f64 / b2);
    sign * arg.exp()
}

/// The polynomial `pl(z + shift)`.
pub fn poly_shift(pl: &TrigPoly, s: Shift, p: &ModularParam) -> TrigPoly {
    if s == (0, 0) {
        return pl.clone();
    }
    TrigPoly::from_terms(pl.terms().map(|((j, l), c)| ((j, l), c * shift_phase(j, l, s, p))))
}

/// Exact Laurent division by lexicographic leading-term elimination.
///
/// Remainder terms with modulus at most `tol · max|num|` are discarded; a
/// larger remainder means the quotient is not a Laurent polynomial.
pub fn poly_div_exact(num: &TrigPoly, den: &TrigPoly, tol: f64) -> Result<TrigPoly> {
    let (&(lj, ll), &lc) = den
        .coeffs
        .last_key_value()
        .ok_or_else(|| Error::Domain("division by the zero polynomial".into()))?;
    let scale = num.max_coeff();
    if scale == 0.0 {
        return Ok(TrigPoly::zero());
    }
    if den.len() == 1 {
        return Ok(TrigPoly::from_terms(
            num.terms().map(|((j, l), c)| ((j - lj, l - ll), c / lc)),
        ));
    }
    let cut = tol * scale;
    let (nj0, nj1, nl0, nl1) = num.bounds().expect("non-zero numerator");
    let (dj0, dj1, dl0, dl1) = den.bounds().expect("non-zero denominator");
    let (qj0, qj1, ql0, ql1) = (nj0 - dj0, nj1 - dj1, nl0 - dl0, nl1 - dl1);
    let mut rem = num.coeffs.clone();
    let mut quot = TrigPoly::zero();
    while let Some((&(rj, rl), &rc)) = rem.last_key_value() {
        if rc.norm() <= cut {
            rem.remove(&(rj, rl));
            continue;
        }
        let (qj, ql) = (rj - lj, rl - ll);
        if qj < qj0 || qj > qj1 || ql < ql0 || ql > ql1 {
            let remainder = rem.values().fold(0.0f64, |m, c| m.max(c.norm())) / scale;
            return Err(Error::NotDivisible { remainder });
        }
        let m = rc / lc;
        quot.add_term(qj, ql, m);
        for ((dj, dl), dc) in den.terms() {
            let key = (dj + qj, dl + ql);
            *rem.entry(key).or_insert(ZERO) -= m * dc;
        }
        rem.remove(&(rj, rl));
    }
    Ok(quot)
}

/// Quotient `num/den` of two Laurent polynomials.
#[derive(Debug, Clone, PartialEq)]
pub struct Rational {
    pub num: TrigPoly,
    pub den: TrigPoly,
}

impl Rational {
    pub fn new(num: TrigPoly, den: TrigPoly) -> Result<Self> {
        if den.is_empty() {
            return Err(Error::Domain("zero denominator".into()));
        }
        Ok(Self { num, den })
    }

    pub fn poly(num: TrigPoly) -> Self {
        Self {
            num,
            den: TrigPoly::one(),
        }
    }

    pub fn eval(&self, z: Complex64, p: &ModularParam) -> Complex64 {
        poly_eval(&self.num, z, p) / poly_eval(&self.den, z, p)
    }

    pub fn shifted(&self, s: Shift, p: &ModularParam) -> Self {
        Self {
            num: poly_shift(&self.num, s, p),
            den: poly_shift(&self.den, s, p),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if other.den == TrigPoly::one() {
            return Self {
                num: &self.num * &other.num,
                den: self.den.clone(),
            };
        }
        if self.den == TrigPoly::one() {
            return Self {
                num: &self.num * &other.num,
                den: other.den.clone(),
            };
        }
        Self {
            num: &self.num * &other.num,
            den: &self.den * &other.den,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.den.approx_eq(&other.den, 1e-14) {
            return Self {
                num: &self.num + &other.num,
                den: self.den.clone(),
            };
        }
        Self {
            num: &(&self.num * &other.den) + &(&other.num * &self.den),
            den: &self.den * &other.den,
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }
}

/// Finite sum `Σ r_s(z) e^{shift_s · ∂_z}` with rational coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DiffOp {
    terms: BTreeMap<Shift, Rational>,
}

impl DiffOp {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::shift_op((0, 0))
    }

    pub fn shift_op(s: Shift) -> Self {
        Self::term(s, Rational::poly(TrigPoly::one()))
    }

    pub fn term(s: Shift, r: Rational) -> Self {
        let mut op = Self::zero();
        op.terms.insert(s, r);
        op
    }

    /// Multiplication by a polynomial.
    pub fn mul_poly(pl: TrigPoly) -> Self {
        Self::term((0, 0), Rational::poly(pl))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Shift, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, s: Shift) -> Option<&Rational> {
        self.terms.get(&s)
    }

    pub fn add_term(&mut self, s: Shift, r: Rational) {
        let merged = match self.terms.remove(&s) {
            Some(old) => old.add(&r),
            None => r,
        };
        self.terms.insert(s, merged);
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (s, r) in other.terms() {
            out.add_term(*s, r.clone());
        }
        out
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.plus(&other.scale(-ONE))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            terms: self.terms.iter().map(|(s, r)| (*s, r.scale(c))).collect(),
        }
    }

    /// Left multiplication by a rational function.
    pub fn premul(&self, r: &Rational) -> Self {
        Self {
            terms: self.terms.iter().map(|(s, t)| (*s, r.mul(t))).collect(),
        }
    }

    /// `self ∘ other`: shifts add and the right coefficient is shifted
    /// through the left shift.
    pub fn compose(&self, other: &Self, p: &ModularParam) -> Self {
        let mut out = Self::zero();
        for (s1, r1) in self.terms() {
            for (s2, r2) in other.terms() {
                let s = (s1.0 + s2.0, s1.1 + s2.1);
                out.add_term(s, r1.mul(&r2.shifted(*s1, p)));
            }
        }
        out
    }

    pub fn commutator(&self, other: &Self, p: &ModularParam) -> Self {
        self.compose(other, p).minus(&other.compose(self, p))
    }

    /// Applies the operator to a polynomial; fails with `NotDivisible` if
    /// the image is not a Laurent polynomial.
    pub fn apply(&self, pl: &TrigPoly, p: &ModularParam, tol: f64) -> Result<TrigPoly> {
        // Group terms with the same denominator so that single divisions
        // suffice whenever the image is polynomial group by group.
        let mut groups: Vec<(TrigPoly, TrigPoly)> = Vec::new();
        for (s, r) in self.terms() {
            let contrib = &r.num * &poly_shift(pl, *s, p);
            match groups.iter_mut().find(|(d, _)| d.approx_eq(&r.den, 1e-14)) {
                Some((_, n)) => *n = &*n + &contrib,
                None => groups.push((r.den.clone(), contrib)),
            }
        }
        let scale = groups.iter().fold(0.0f64, |m, (_, n)| m.max(n.max_coeff()));
        let mut out = TrigPoly::zero();
        let mut pending = Vec::new();
        for (den, num) in &groups {
            let num = num.clone().pruned(tol * 1e-3 * scale);
            match poly_div_exact(&num, den, tol) {
                Ok(q) => out = &out + &q,
                Err(_) => pending.push((den.clone(), num)),
            }
        }
        if pending.is_empty() {
            return Ok(out);
        }
        let mut common = TrigPoly::one();
        for (d, _) in &pending {
            common = &common * d;
        }
        let mut total = TrigPoly::zero();
        let mut term_scale = 0.0f64;
        for (k, (_, n)) in pending.iter().enumerate() {
            let mut term = n.clone();
            for (m, (d, _)) in pending.iter().enumerate() {
                if m != k {
                    term = &term * d;
                }
            }
            term_scale = term_scale.max(term.max_coeff());
            total = &total + &term;
        }
        // Contributions that cancel down to rounding are dropped before dividing.
        let total = total.pruned(tol * 1e-3 * term_scale);
        Ok(&out + &poly_div_exact(&total, &common, tol)?)
    }

    /// Applies the operator to an arbitrary function at the point `z`.
    pub fn apply_fn(&self, f: &dyn Fn(Complex64) -> Complex64, z: Complex64, p: &ModularParam) -> Complex64 {
        self.terms()
            .map(|(s, r)| r.eval(z, p) * f(z + shift_amount(*s, p)))
            .sum()
    }

    /// Largest `|a|` and `|c|` among the shifts.
    pub fn shift_extent(&self) -> (i32, i32) {
        self.terms
            .keys()
            .fold((0, 0), |(a, c), s| (a.max(s.0.abs()), c.max(s.1.abs())))
    }
}

/// Seed used when none is given: `0x0FAD_DEE5`.
pub const DEFAULT_SEED: u64 = 0x0FAD_DEE5;

/// Random sample points in a rectangle, kept away from the points
/// `i(jb/2 + l/(2b))` where shifted sine denominators vanish.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleBox {
    pub re: (f64, f64),
    pub im: (f64, f64),
    pub count: usize,
    pub seed: u64,
    pub exclusion: f64,
}

impl Default for SampleBox {
    fn default() -> Self {
        Self {
            re: (-0.4, 0.4),
            im: (-0.2, 0.2),
            count: 12,
            seed: DEFAULT_SEED,
            exclusion: 0.05,
        }
    }
}

impl SampleBox {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_count(mut self, count: usize) -> Self {
        self.count = count;
        self
    }

    pub fn points(&self, p: &ModularParam) -> Result<Vec<Complex64>> {
        if self.count < 8 {
            return Err(Error::Domain(format!("sample count {} below 8", self.count)));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut out = Vec::with_capacity(self.count);
        let mut attempts = 0;
        while out.len() < self.count {
            attempts += 1;
            if attempts > 100_000 {
                return Err(Error::Domain("sample box is covered by exclusion zones".into()));
            }
            let z = Complex64::new(
                rng.random_range(self.re.0..self.re.1),
                rng.random_range(self.im.0..self.im.1),
            );
            let near_zero =
                (-12..=12).any(|j| (-12..=12).any(|l| (z - shift_amount((j, l), p)).norm() < self.exclusion));
            if !near_zero {
                out.push(z);
            }
        }
        Ok(out)
    }
}

/// Outcome of a sampled comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampledComparison {
    pub pass: bool,
    /// `max|f − g| / max(1, max|f|, max|g|)` over the samples.
    pub max_residual: f64,
}

pub fn func_equal_sampled(
    f: &dyn Fn(Complex64) -> Complex64,
    g: &dyn Fn(Complex64) -> Complex64,
    points: &[Complex64],
    tol: f64,
) -> SampledComparison {
    let mut diff = 0.0f64;
    let mut scale = 1.0f64;
    for &z in points {
        let (a, b) = (f(z), g(z));
        diff = diff.max((a - b).norm());
        scale = scale.max(a.norm()).max(b.norm());
    }
    let max_residual = diff / scale;
    SampledComparison {
        pass: max_residual < tol,
        max_residual,
    }
}

/// Coordinates of `v` in `basis`: `v = Σ_i basis_i c_i`.
pub fn coords_in_basis(v: &TrigPoly, basis: &[TrigPoly], tol: f64) -> Result<DVector<Complex64>> {
    let m = coords_matrix(std::slice::from_ref(v), basis, tol)?;
    Ok(m.column(0).into_owned())
}

fn coords_matrix(images: &[TrigPoly], basis: &[TrigPoly], tol: f64) -> Result<DMatrix<Complex64>> {
    let mut keys: Vec<(i32, i32)> = Vec::new();
    for pl in basis.iter().chain(images) {
        for (k, _) in pl.terms() {
            keys.push(k);
        }
    }
    keys.sort();
    keys.dedup();
    let index = |k: &(i32, i32)| keys.binary_search(k).expect("key collected above");
    let mut bm = DMatrix::<Complex64>::zeros(keys.len().max(1), basis.len());
    for (col, pl) in basis.iter().enumerate() {
        for (k, c) in pl.terms() {
            bm[(index(&k), col)] = c;
        }
    }
    let svd = bm.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if basis.is_empty() || smax == 0.0 || smin / smax < 1e-12 {
        return Err(Error::SingularBasis);
    }
    let mut out = DMatrix::<Complex64>::zeros(basis.len(), images.len());
    for (col, img) in images.iter().enumerate() {
        let mut v = DVector::<Complex64>::zeros(keys.len().max(1));
        for (k, c) in img.terms() {
            v[index(&k)] = c;
        }
        let x = svd.solve(&v, 1e-14 * smax).map_err(|_| Error::SingularBasis)?;
        let resid = (&bm * &x - &v).norm();
        let scale = v.norm().max(smax * x.norm()).max(1e-300);
        if resid / scale >= tol && v.norm() > 0.0 {
            return Err(Error::NotInvariant {
                residual: resid / scale,
            });
        }
        out.set_column(col, &x);
    }
    Ok(out)
}

/// Matrix of `op` restricted to the span of `basis`: `op(basis_j) = Σ_i basis_i M_ij`.
pub fn matrix_of_operator(op: &DiffOp, basis: &[TrigPoly], p: &ModularParam, tol: f64) -> Result<DenseCMatrix> {
    let images = basis.iter().map(|b| op.apply(b, p, tol)).collect::<Result<Vec<_>>>()?;
    Ok(DenseCMatrix::from_inner(coords_matrix(&images, basis, tol)?))
}
