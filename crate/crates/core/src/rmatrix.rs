//! L-operators and finite-dimensional R-matrices built from the degenerate
//! Sklyanin generators: the factorized fundamental L-operator, the
//! five-factor higher-spin R-operator, their dense restrictions, and checks
//! of the Yang–Baxter, RLL, unitarity and rapidity-permutation relations.
//!
//! Dense matrices on `C^{d1} ⊗ C^{d2}` use the index `i·d2 + a`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cx::{I, ONE, ZERO};
use crate::dense::DenseCMatrix;
use crate::error::{Error, Result};
use crate::funspace::{coords_in_basis, matrix_of_operator, poly_eval, DiffOp, Rational, TrigPoly};
use crate::hypgamma::{gamma, GammaConfig, ModularParam};
use crate::intertwiner::{generating_function, m_shift_coeffs};
use crate::sklyanin::{g_nm, generators, Half, RepLabel};
use crate::weights::weight_w;

/// Relative tolerance for restricting operators to finite bases.
pub const RESTRICT_TOL: f64 = 1e-8;

/// Relative cut below which an entry of a dense R-matrix counts as zero.
pub const NONZERO_CUT: f64 = 1e-10;

/// Rapidities `u1 = (u+g)/2`, `u2 = (u−g)/2` attached to an L-operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RapidityPair {
    pub u1: Complex64,
    pub u2: Complex64,
}

impl RapidityPair {
    pub fn from_spectral(u: Complex64, g: Complex64) -> Self {
        Self {
            u1: 0.5 * (u + g),
            u2: 0.5 * (u - g),
        }
    }

    /// `u = u1 + u2`.
    pub fn spectral(&self) -> Complex64 {
        self.u1 + self.u2
    }

    /// `g = u1 − u2`.
    pub fn label(&self) -> Complex64 {
        self.u1 - self.u2
    }
}

/// Matrix whose entries are finite-difference operators in one variable.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<DiffOp>,
}

impl OperatorMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, entries: Vec<DiffOp>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} operator matrix",
                entries.len()
            )));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> DiffOp) -> Self {
        let entries = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        Self { rows, cols, entries }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { DiffOp::identity() } else { DiffOp::zero() })
    }

    /// Multiplication operators by the given polynomials.
    pub fn multiplication(rows: usize, cols: usize, polys: impl Fn(usize, usize) -> TrigPoly) -> Self {
        Self::from_fn(rows, cols, |i, j| {
            let pl = polys(i, j);
            if pl.is_empty() {
                DiffOp::zero()
            } else {
                DiffOp::mul_poly(pl)
            }
        })
    }

    /// Constant entries.
    pub fn from_dense(m: &DenseCMatrix) -> Self {
        Self::from_fn(m.rows(), m.cols(), |i, j| {
            let v = m.get(i, j);
            if v == ZERO {
                DiffOp::zero()
            } else {
                DiffOp::identity().scale(v)
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, i: usize, j: usize) -> &DiffOp {
        &self.entries[i * self.cols + j]
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.scale(c)).collect(),
        }
    }

    /// Matrix product with entrywise operator composition.
    pub fn compose(&self, other: &Self, p: &ModularParam) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self::from_fn(self.rows, other.cols, |i, k| {
            (0..self.cols).fold(DiffOp::zero(), |acc, j| {
                let (a, b) = (self.entry(i, j), other.entry(j, k));
                if a.terms().next().is_none() || b.terms().next().is_none() {
                    acc
                } else {
                    acc.plus(&a.compose(b, p))
                }
            })
        }))
    }

    /// `self ⊗ I_d`.
    pub fn kron_identity_right(&self, d: usize) -> Self {
        Self::from_fn(self.rows * d, self.cols * d, |r, c| {
            let (i, a) = (r / d, r % d);
            let (k, b) = (c / d, c % d);
            if a == b {
                self.entry(i, k).clone()
            } else {
                DiffOp::zero()
            }
        })
    }

    /// `I_d ⊗ self`.
    pub fn kron_identity_left(&self, d: usize) -> Self {
        Self::from_fn(self.rows * d, self.cols * d, |r, c| {
            let (i, a) = (r / self.rows, r % self.rows);
            let (k, b) = (c / self.cols, c % self.cols);
            if i == k {
                self.entry(a, b).clone()
            } else {
                DiffOp::zero()
            }
        })
    }

    /// Dense matrix on `C^rows ⊗ span(basis)`: block `(i, k)` is the matrix
    /// of entry `(i, k)` on the basis.
    pub fn to_dense(&self, basis: &[TrigPoly], p: &ModularParam, tol: f64) -> Result<DenseCMatrix> {
        let d = basis.len();
        let mut out = DenseCMatrix::zeros(self.rows * d, self.cols * d);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let op = self.entry(i, k);
                if op.terms().next().is_none() {
                    continue;
                }
                let block = matrix_of_operator(op, basis, p, tol)?;
                for a in 0..d {
                    for c in 0..d {
                        out.set(i * d + a, k * d + c, block.get(a, c));
                    }
                }
            }
        }
        Ok(out)
    }

    /// `(self[i, j] f)(z)`.
    pub fn apply_entry(
        &self,
        i: usize,
        j: usize,
        f: &dyn Fn(Complex64) -> Complex64,
        z: Complex64,
        p: &ModularParam,
    ) -> Complex64 {
        self.entry(i, j).apply_fn(f, z, p)
    }
}

/// `((M₁ M₂ ⋯ M_k)[row, col] f)(z)` evaluated without forming the product,
/// so no rational coefficients are merged.
pub fn apply_product(
    factors: &[&OperatorMatrix],
    row: usize,
    col: usize,
    f: &dyn Fn(Complex64) -> Complex64,
    z: Complex64,
    p: &ModularParam,
) -> Complex64 {
    match factors {
        [] => f(z),
        [last] => last.apply_entry(row, col, f, z, p),
        [first, rest @ ..] => (0..first.cols())
            .filter(|&j| first.entry(row, j).terms().next().is_some())
            .map(|j| {
                let inner = |w: Complex64| apply_product(rest, j, col, f, w, p);
                first.apply_entry(row, j, &inner, z, p)
            })
            .sum(),
    }
}

/// Test function `exp(−a (z − z₀)²) · P(z)` with a polynomial `P`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussPoly {
    pub width: f64,
    pub center: Complex64,
    pub poly: TrigPoly,
    pub param: ModularParam,
}

impl GaussPoly {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let w = z - self.center;
        (-self.width * w * w).exp() * poly_eval(&self.poly, z, &self.param)
    }
}

/// Seeded family of Gaussian-times-polynomial test functions.
pub fn sample_functions(count: usize, seed: u64, p: &ModularParam) -> Vec<GaussPoly> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut poly = TrigPoly::one();
            for j in -2..=2 {
                if j != 0 {
                    let c = Complex64::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
                    poly.add_term(j, 0, c);
                }
            }
            if rng.random_bool(0.5) {
                poly.add_term(0, 1, Complex64::new(rng.random_range(-0.3..0.3), 0.0));
            }
            GaussPoly {
                width: rng.random_range(0.5..2.0),
                center: Complex64::new(rng.random_range(-0.3..0.3), rng.random_range(-0.1..0.1)),
                poly,
                param: *p,
            }
        })
        .collect()
}

/// Outcome of a projective comparison `a ≈ λ b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectiveGap {
    pub ratio: Complex64,
    /// `max|a − λb| / max|a|`.
    pub residual: f64,
}

/// Least-squares `λ` with `a ≈ λ b` over paired samples.
pub fn projective_fit(a: &[Complex64], b: &[Complex64]) -> ProjectiveGap {
    let num: Complex64 = a.iter().zip(b).map(|(x, y)| y.conj() * x).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    let ratio = if den > 0.0 { num / den } else { ZERO };
    let scale = a.iter().fold(0.0f64, |m, x| m.max(x.norm())).max(f64::MIN_POSITIVE);
    let diff = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - ratio * y).norm()));
    ProjectiveGap {
        ratio,
        residual: diff / scale,
    }
}

fn sampled_entries(m: &OperatorMatrix, funcs: &[GaussPoly], points: &[Complex64], p: &ModularParam) -> Vec<Complex64> {
    let mut out = Vec::new();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            for f in funcs {
                let fz = |z: Complex64| f.eval(z);
                out.extend(points.iter().map(|&z| m.apply_entry(i, j, &fz, z, p)));
            }
        }
    }
    out
}

/// Compares two operator matrices on sampled functions, up to a scalar.
pub fn compare_projective(
    a: &OperatorMatrix,
    b: &OperatorMatrix,
    funcs: &[GaussPoly],
    points: &[Complex64],
    p: &ModularParam,
) -> Result<ProjectiveGap> {
    if (a.rows(), a.cols()) != (b.rows(), b.cols()) {
        return Err(Error::DimensionMismatch("operator matrices of different shape".into()));
    }
    Ok(projective_fit(
        &sampled_entries(a, funcs, points, p),
        &sampled_entries(b, funcs, points, p),
    ))
}

/// `max|a − b| / max|a|` on sampled functions.
pub fn compare_exact(
    a: &OperatorMatrix,
    b: &OperatorMatrix,
    funcs: &[GaussPoly],
    points: &[Complex64],
    p: &ModularParam,
) -> Result<f64> {
    if (a.rows(), a.cols()) != (b.rows(), b.cols()) {
        return Err(Error::DimensionMismatch("operator matrices of different shape".into()));
    }
    let (va, vb) = (
        sampled_entries(a, funcs, points, p),
        sampled_entries(b, funcs, points, p),
    );
    let scale = va.iter().fold(0.0f64, |m, x| m.max(x.norm())).max(f64::MIN_POSITIVE);
    Ok(va.iter().zip(&vb).fold(0.0f64, |m, (x, y)| m.max((x - y).norm())) / scale)
}

/// `2cos 2πb(iz + a) = t⁻¹ e^{2πiba} + t e^{−2πiba}`.
fn two_cos(a: Complex64, p: &ModularParam) -> TrigPoly {
    let ph = (2.0 * PI * I * p.b() * a).exp();
    TrigPoly::from_terms([((-1, 0), ph), ((1, 0), ONE / ph)])
}

/// `z → −z` on polynomial coefficients.
pub fn reflect(pl: &TrigPoly) -> TrigPoly {
    TrigPoly::from_terms(pl.terms().map(|((j, l), c)| ((-j, -l), c)))
}

/// The generating function `γ(±ix ± iz + g_{n,m})` from its finite product form.
pub fn gen_function(n: u32, m: u32, x: Complex64, z: Complex64, p: &ModularParam) -> Complex64 {
    poly_eval(&generating_function(n, m, x, p), z, p)
}

/// Polynomial in an auxiliary variable `X` with coefficients in `t`.
fn x_poly_mul_linear(acc: &[TrigPoly], root: &TrigPoly) -> Vec<TrigPoly> {
    // acc · (X + root)
    let mut out = vec![TrigPoly::zero(); acc.len() + 1];
    for (k, c) in acc.iter().enumerate() {
        out[k + 1] = &out[k + 1] + c;
        out[k] = &out[k] + &(c * root);
    }
    out
}

/// `φ_j = (t + t⁻¹)^{j−1}` for `j = 1..=n+1`.
pub fn phi_basis(n: u32) -> Vec<TrigPoly> {
    let x = Half::Plain.sym(1);
    let mut out = vec![TrigPoly::one()];
    for k in 0..n as usize {
        let next = &out[k] * &x;
        out.push(next);
    }
    out
}

/// `(t + t⁻¹)^j (s + s⁻¹)^l`, `j ≤ n`, `l ≤ m`, ordered `j·(m+1) + l`.
pub fn phi_basis_mixed(n: u32, m: u32) -> Vec<TrigPoly> {
    let (tp, sp) = (phi_basis(n), {
        let x = Half::Tilde.sym(1);
        let mut out = vec![TrigPoly::one()];
        for k in 0..m as usize {
            let next = &out[k] * &x;
            out.push(next);
        }
        out
    });
    tp.iter().flat_map(|a| sp.iter().map(move |c| a * c)).collect()
}

/// The bases `φ` and `ψ` of `C^{n+1}` generated by the expansion of the
/// generating function at `g_{n,0}` in powers of `2cos(2πibz)`.
pub fn bases_phi_psi(n: u32, p: &ModularParam) -> Result<(Vec<TrigPoly>, Vec<TrigPoly>)> {
    let b = p.b();
    let mut acc = vec![TrigPoly::one()];
    for r in 0..n {
        let c = b * (n as f64 - 1.0 - 2.0 * r as f64);
        acc = x_poly_mul_linear(&acc, &two_cos(0.5 * c, p));
    }
    // ψ_m is the coefficient of X^{n+1−m}.
    let psi: Vec<TrigPoly> = (1..=n as usize + 1).map(|m| acc[n as usize + 1 - m].clone()).collect();
    let phi = phi_basis(n);
    for v in &psi {
        if let Err(Error::NotInvariant { residual }) = coords_in_basis(v, &phi, RESTRICT_TOL) {
            return Err(Error::SpanFailure { residual });
        }
    }
    Ok((phi, psi))
}

/// Matrix `T` with `ψ_j = Σ_l φ_l T_lj`.
pub fn psi_in_phi(n: u32, p: &ModularParam) -> Result<DenseCMatrix> {
    let (phi, psi) = bases_phi_psi(n, p)?;
    let d = phi.len();
    let mut t = DenseCMatrix::zeros(d, d);
    for (j, v) in psi.iter().enumerate() {
        let col = coords_in_basis(v, &phi, RESTRICT_TOL)?;
        for l in 0..d {
            t.set(l, j, col[l]);
        }
    }
    Ok(t)
}

/// Lateral matrix `V(u, z)` of the higher-spin factorization, entries as
/// polynomials in `t`: `Σ_j φ_j(x) V_jl = ∏(…)∏(…)`.
pub fn v_matrix(u: Complex64, n: u32, p: &ModularParam) -> Vec<Vec<TrigPoly>> {
    let (b, eta) = (p.b(), p.eta());
    let g = g_nm(n, 0, p);
    let d = n as usize + 1;
    let mut v = vec![vec![TrigPoly::zero(); d]; d];
    for l0 in 0..d {
        let mut acc = vec![TrigPoly::one()];
        for r in 0..l0 {
            let a = -u - 2.0 * eta - g + 2.0 * b * r as f64;
            // X − 2cos πb(2iz + a)
            acc = x_poly_mul_linear(&acc, &-&two_cos(0.5 * a, p));
        }
        for r in 0..(d - 1 - l0) {
            let a = -u - 2.0 * eta - g + 2.0 * b * r as f64;
            // X − 2cos πb(−2iz + a)
            acc = x_poly_mul_linear(&acc, &-&two_cos(-0.5 * a, p));
        }
        for (j, c) in acc.into_iter().enumerate() {
            v[j][l0] = c;
        }
    }
    v
}

/// `V(u, z)` evaluated at a point.
pub fn v_matrix_at(u: Complex64, z: Complex64, n: u32, p: &ModularParam) -> DenseCMatrix {
    let v = v_matrix(u, n, p);
    let d = v.len();
    DenseCMatrix::from_fn(d, d, |j, l| poly_eval(&v[j][l], z, p))
}

/// Largest coefficient gap in `V(u, −z) = V(u, z)·C`.
pub fn v_symmetry_gap(u: Complex64, n: u32, p: &ModularParam) -> f64 {
    let v = v_matrix(u, n, p);
    let d = v.len();
    let mut gap = 0.0f64;
    for j in 0..d {
        for l in 0..d {
            let diff = &reflect(&v[j][l]) - &v[j][d - 1 - l];
            gap = gap.max(diff.max_coeff());
        }
    }
    gap
}

fn lax_left_factor(u: Complex64, g: Complex64, p: &ModularParam) -> OperatorMatrix {
    let u1 = RapidityPair::from_spectral(u, g).u1;
    let m1 = [
        [-&two_cos(u1, p), -&two_cos(-u1, p)],
        [TrigPoly::one(), TrigPoly::one()],
    ];
    let den = TrigPoly::sin_b();
    OperatorMatrix::from_fn(2, 2, |i, j| {
        DiffOp::term(
            (0, 0),
            Rational {
                num: m1[i][j].clone(),
                den: den.clone(),
            },
        )
    })
}

fn lax_right_factor(u: Complex64, g: Complex64, p: &ModularParam) -> OperatorMatrix {
    let u2 = RapidityPair::from_spectral(u, g).u2;
    let m2 = [
        [TrigPoly::one(), -&two_cos(-u2, p)],
        [TrigPoly::one(), -&two_cos(u2, p)],
    ];
    OperatorMatrix::multiplication(2, 2, |i, j| m2[i][j].clone())
}

/// The factorized fundamental L-operator
/// `(1/sin 2πibz) M₁(z) diag(T, −T⁻¹) M₂(z)`, `T = e^{(ib/2)∂}`.
pub fn l_fundamental(u: Complex64, g: Complex64, p: &ModularParam) -> Result<OperatorMatrix> {
    let middle = OperatorMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => DiffOp::shift_op((1, 0)),
        (1, 1) => DiffOp::shift_op((-1, 0)).scale(-ONE),
        _ => DiffOp::zero(),
    });
    lax_left_factor(u, g, p)
        .compose(&middle, p)?
        .compose(&lax_right_factor(u, g, p), p)
}

/// The L-operator written through the generators `A, B, C, D` at label `g`.
pub fn l_from_generators(u: Complex64, g: Complex64, p: &ModularParam) -> Result<OperatorMatrix> {
    let gs = generators(RepLabel::generic(g), p, Half::Plain)?;
    let kappa = gs.kappa();
    let sk = kappa.sin();
    let e = (I * PI * p.b() * u).exp();
    let cos_u = (2.0 * PI * p.b() * u).cos();
    let l11 = gs.a.scale(-2.0 / e).plus(&gs.d.scale(-2.0 * e));
    let l12 =
        gs.b.scale(-8.0 * sk)
            .plus(&gs.c.scale(-4.0 * sk * (cos_u + kappa.cos())));
    let l21 = gs.c.scale(2.0 * sk);
    let l22 = gs.a.scale(2.0 * e).plus(&gs.d.scale(2.0 / e));
    OperatorMatrix::new(2, 2, vec![l11, l12, l21, l22])
}

/// The 4×4 R-matrix of the fundamental representation on the basis
/// `{1, 2cos 2πibz}`: `L(u − 1/(2b) | g_{1,0})` restricted.
pub fn seven_vertex(u: Complex64, p: &ModularParam) -> Result<DenseCMatrix> {
    let l = l_fundamental(u - 0.5 * p.b_inv(), g_nm(1, 0, p), p)?;
    l.to_dense(&phi_basis(1), p, RESTRICT_TOL)
}

/// The higher-spin R-operator `V(u+g) D(z,∂) C Vᵀ(u−g) C` at first-space
/// label `g_{n,0}`, assembled by multiplying the five factors.
pub fn r_finite(u: Complex64, n: u32, g: Complex64, p: &ModularParam) -> Result<OperatorMatrix> {
    let d = n as usize + 1;
    let vp = v_matrix(u + g, n, p);
    let vm = v_matrix(u - g, n, p);
    let beta = m_shift_coeffs(n, p);
    let left = OperatorMatrix::multiplication(d, d, |i, j| vp[i][j].clone());
    let diag = OperatorMatrix::from_fn(d, d, |i, j| {
        if i == j {
            DiffOp::term((n as i32 - 2 * i as i32, 0), beta[i].clone())
        } else {
            DiffOp::zero()
        }
    });
    let flip = OperatorMatrix::from_fn(d, d, |i, j| {
        if i + j == d - 1 {
            DiffOp::identity()
        } else {
            DiffOp::zero()
        }
    });
    let right = OperatorMatrix::multiplication(d, d, |i, j| vm[j][i].clone());
    left.compose(&diag, p)?
        .compose(&flip, p)?
        .compose(&right, p)?
        .compose(&flip, p)
}

/// Dense forms of the higher-spin R-operator.
#[derive(Debug, Clone, PartialEq)]
pub struct RDense {
    /// Maps `ψ` in the first space to `φ`.
    pub raw: DenseCMatrix,
    /// First space on the `φ` basis on both sides.
    pub phi: DenseCMatrix,
    /// `phi` scaled so its first non-zero entry is 1.
    pub normalized: DenseCMatrix,
}

/// `r_finite` restricted to the second-space representation `g_{n',m'}` on
/// the basis [`phi_basis_mixed`].
pub fn r_dense(u: Complex64, n: u32, second: (u32, u32), p: &ModularParam) -> Result<RDense> {
    let (np, mp) = second;
    let op = r_finite(u, n, g_nm(np, mp, p), p)?;
    let basis = phi_basis_mixed(np, mp);
    let raw = op.to_dense(&basis, p, RESTRICT_TOL)?;
    let t_inv = psi_in_phi(n, p)?.try_inverse()?;
    let phi = raw.try_mul(&t_inv.kron(&DenseCMatrix::identity(basis.len())))?;
    let normalized = normalize(&phi);
    Ok(RDense { raw, phi, normalized })
}

/// Scales so that the first entry above [`NONZERO_CUT`] (relative) is 1.
pub fn normalize(m: &DenseCMatrix) -> DenseCMatrix {
    let cut = NONZERO_CUT * m.max_abs();
    match m.row_major().into_iter().find(|v| v.norm() > cut) {
        Some(v) => m.scale(ONE / v),
        None => m.clone(),
    }
}

/// The scalar `c = 1/γ(u + g_{n,m} ± g)` of the reduction formula.
pub fn reduction_constant(
    u: Complex64,
    n: u32,
    m: u32,
    g: Complex64,
    p: &ModularParam,
    cfg: &GammaConfig,
) -> Result<Complex64> {
    let gl = g_nm(n, m, p);
    Ok(ONE / (gamma(u + gl + g, p, cfg)? * gamma(u + gl - g, p, cfg)?))
}

fn check_square(m: &DenseCMatrix, d: usize, name: &str) -> Result<()> {
    if m.rows() != d || m.cols() != d {
        return Err(Error::DimensionMismatch(format!(
            "{name} is {}x{}, expected {d}x{d}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

/// Relative residual `max|LHS − RHS| / max|LHS|` of
/// `R₁₂ R₁₃ R₂₃ = R₂₃ R₁₃ R₁₂` on `C^{d1} ⊗ C^{d2} ⊗ C^{d3}`.
pub fn check_ybe(
    r12: &DenseCMatrix,
    r13: &DenseCMatrix,
    r23: &DenseCMatrix,
    dims: (usize, usize, usize),
) -> Result<f64> {
    let (d1, d2, d3) = dims;
    check_square(r12, d1 * d2, "R12")?;
    check_square(r13, d1 * d3, "R13")?;
    check_square(r23, d2 * d3, "R23")?;
    let e12 = r12.kron(&DenseCMatrix::identity(d3));
    let e23 = DenseCMatrix::identity(d1).kron(r23);
    let n = d1 * d2 * d3;
    let mut e13 = DenseCMatrix::zeros(n, n);
    for a in 0..d1 {
        for c in 0..d3 {
            for a2 in 0..d1 {
                for c2 in 0..d3 {
                    let v = r13.get(a * d3 + c, a2 * d3 + c2);
                    for m in 0..d2 {
                        e13.set((a * d2 + m) * d3 + c, (a2 * d2 + m) * d3 + c2, v);
                    }
                }
            }
        }
    }
    let lhs = &(&e12 * &e13) * &e23;
    let rhs = &(&e23 * &e13) * &e12;
    let scale = lhs.max_abs().max(f64::MIN_POSITIVE);
    Ok((&lhs - &rhs).max_abs() / scale)
}

/// Result of fitting `Rp·Rm ≈ λ·Id`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitarityFit {
    pub lambda: Complex64,
    /// `max|Rp Rm − λ Id| / |λ|`.
    pub residual: f64,
}

pub fn check_unitarity(rp: &DenseCMatrix, rm: &DenseCMatrix) -> Result<UnitarityFit> {
    let prod = rp.try_mul(rm)?;
    if prod.rows() != prod.cols() {
        return Err(Error::DimensionMismatch("product is not square".into()));
    }
    let d = prod.rows();
    let lambda = (0..d).map(|i| prod.get(i, i)).sum::<Complex64>() / d as f64;
    let gap = (&prod - &DenseCMatrix::identity(d).scale(lambda)).max_abs();
    let residual = if lambda.norm() > 0.0 {
        gap / lambda.norm()
    } else {
        f64::INFINITY
    };
    Ok(UnitarityFit { lambda, residual })
}

/// Sampled residual of `R (L_a ⊗ 1)(1 ⊗ L_b) = (1 ⊗ L_b)(L_a ⊗ 1) R`
/// with both L-operators acting on the same quantum variable.
pub fn check_rll(
    r: &DenseCMatrix,
    la: &OperatorMatrix,
    lb: &OperatorMatrix,
    funcs: &[GaussPoly],
    points: &[Complex64],
    p: &ModularParam,
) -> Result<f64> {
    let (da, db) = (la.rows(), lb.rows());
    check_square(r, da * db, "R")?;
    let a = la.kron_identity_right(db);
    let b = lb.kron_identity_left(da);
    let rop = OperatorMatrix::from_dense(r);
    let (lhs, rhs) = ([&rop, &a, &b], [&b, &a, &rop]);
    let mut diff = 0.0f64;
    let mut scale = 0.0f64;
    for row in 0..da * db {
        for col in 0..da * db {
            for f in funcs {
                let fz = |z: Complex64| f.eval(z);
                for &z in points {
                    let x = apply_product(&lhs, row, col, &fz, z, p);
                    let y = apply_product(&rhs, row, col, &fz, z, p);
                    if !(x.is_finite() && y.is_finite()) {
                        return Err(Error::NonConvergence("non-finite RLL sample".into()));
                    }
                    diff = diff.max((x - y).norm());
                    scale = scale.max(x.norm()).max(y.norm());
                }
            }
        }
    }
    Ok(diff / scale.max(f64::MIN_POSITIVE))
}

/// Rapidities `(u₁, u₂, v₁, v₂)` of a product of two L-operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RapidityQuad {
    pub u1: Complex64,
    pub u2: Complex64,
    pub v1: Complex64,
    pub v2: Complex64,
}

/// `L(u₁, u₂) = L(u₁ + u₂ | u₁ − u₂)`.
pub fn l_of_rapidities(pair: RapidityPair, p: &ModularParam) -> Result<OperatorMatrix> {
    l_fundamental(pair.spectral(), pair.label(), p)
}

/// `Σ_j (La_ij in z₁)(Lb_jk in z₂) F`.
fn two_site_entry(
    la: &OperatorMatrix,
    lb: &OperatorMatrix,
    i: usize,
    k: usize,
    f: &dyn Fn(Complex64, Complex64) -> Complex64,
    z1: Complex64,
    z2: Complex64,
    p: &ModularParam,
) -> Complex64 {
    (0..la.cols())
        .map(|j| {
            let outer = |w1: Complex64| {
                let inner = |w2: Complex64| f(w1, w2);
                lb.apply_entry(j, k, &inner, z2, p)
            };
            la.apply_entry(i, j, &outer, z1, p)
        })
        .sum()
}

/// Sampled residual of the rapidity permutation
/// `S(u₂−v₁) L₁(u₁,u₂) L₂(v₁,v₂) = L₁(u₁,v₁) L₂(u₂,v₂) S(u₂−v₁)`,
/// `S(a)` being multiplication by `W(a; z₁, z₂)`.
pub fn check_s_permutation(
    r: RapidityQuad,
    f: &dyn Fn(Complex64, Complex64) -> Complex64,
    points: &[(Complex64, Complex64)],
    p: &ModularParam,
    cfg: &GammaConfig,
) -> Result<f64> {
    let a = r.u2 - r.v1;
    let s = |z1: Complex64, z2: Complex64| weight_w(a, z1, z2, p, cfg).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
    let l1 = l_of_rapidities(RapidityPair { u1: r.u1, u2: r.u2 }, p)?;
    let l2 = l_of_rapidities(RapidityPair { u1: r.v1, u2: r.v2 }, p)?;
    let l1p = l_of_rapidities(RapidityPair { u1: r.u1, u2: r.v1 }, p)?;
    let l2p = l_of_rapidities(RapidityPair { u1: r.u2, u2: r.v2 }, p)?;
    let sf = |z1: Complex64, z2: Complex64| s(z1, z2) * f(z1, z2);
    let mut diff = 0.0f64;
    let mut scale = 0.0f64;
    for i in 0..2 {
        for k in 0..2 {
            for &(z1, z2) in points {
                let lhs = s(z1, z2) * two_site_entry(&l1, &l2, i, k, f, z1, z2, p);
                let rhs = two_site_entry(&l1p, &l2p, i, k, &sf, z1, z2, p);
                if !(lhs.is_finite() && rhs.is_finite()) {
                    return Err(Error::NonConvergence("gamma evaluation failed in S".into()));
                }
                diff = diff.max((lhs - rhs).norm());
                scale = scale.max(lhs.norm()).max(rhs.norm());
            }
        }
    }
    Ok(diff / scale.max(f64::MIN_POSITIVE))
}
