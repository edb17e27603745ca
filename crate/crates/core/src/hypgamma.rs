//! The hyperbolic gamma function γ(z; b), its two-period form γ⁽²⁾, the
//! zero/pole lattice and the normalisation m(α) of the star weights.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::cx::{expm1, I, ONE, ZERO};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_decaying, Contour};

/// The modular parameter `b`, `Re b > 0`. Derived quantities are computed
/// on demand so they can never disagree with `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModularParam {
    b: Complex64,
}

impl ModularParam {
    pub fn new(b: Complex64) -> Result<Self> {
        if !(b.re > 0.0) || !b.im.is_finite() {
            return Err(Error::Domain(format!("Re b must be positive, got b = {b}")));
        }
        Ok(Self { b })
    }

    pub fn real(b: f64) -> Result<Self> {
        Self::new(Complex64::new(b, 0.0))
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    pub fn b_inv(&self) -> Complex64 {
        1.0 / self.b
    }

    /// `b + 1/b`.
    pub fn q_sum(&self) -> Complex64 {
        self.b + 1.0 / self.b
    }

    /// Crossing parameter `η = -(b + 1/b)/2`.
    pub fn eta(&self) -> Complex64 {
        -0.5 * self.q_sum()
    }

    /// `q = e^{2πi b²}`.
    pub fn q(&self) -> Complex64 {
        (2.0 * PI * I * self.b * self.b).exp()
    }

    /// `q̃ = e^{-2πi/b²}`.
    pub fn q_tilde(&self) -> Complex64 {
        (-2.0 * PI * I / (self.b * self.b)).exp()
    }

    /// The parameter with `b` replaced by `1/b`.
    pub fn swapped(&self) -> Self {
        Self { b: 1.0 / self.b }
    }
}

/// Which representation of γ to evaluate on the fundamental strip.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaMethod {
    Integral,
    Product,
    /// Product formula when `|q|` is comfortably below 1, otherwise the integral.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaConfig {
    pub method: GammaMethod,
    pub tol: f64,
    pub pole_clearance: f64,
}

impl GammaConfig {
    pub fn new(p: &ModularParam) -> Self {
        Self {
            method: GammaMethod::Auto,
            tol: 1e-13,
            pole_clearance: 1e-6 * p.q_sum().norm(),
        }
    }

    pub fn with_method(mut self, method: GammaMethod) -> Self {
        self.method = method;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::Domain(format!("tolerance {} outside (0, 1)", self.tol)));
        }
        if !(self.pole_clearance > 0.0) {
            return Err(Error::Domain("pole clearance must be positive".into()));
        }
        Ok(())
    }
}

/// Position of a point relative to the zeros `b(n+1) + (m+1)/b` and the
/// poles `-nb - m/b` of γ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeSite {
    Regular,
    Zero { n: u32, m: u32 },
    Pole { n: u32, m: u32 },
}

/// Second-order Bernoulli polynomial `B₂₂(u; ω₁, ω₂)`.
pub fn b22(u: Complex64, w1: Complex64, w2: Complex64) -> Result<Complex64> {
    if w1.norm() == 0.0 || w2.norm() == 0.0 {
        return Err(Error::Domain("zero quasi-period".into()));
    }
    let h = u - 0.5 * (w1 + w2);
    Ok((h * h - (w1 * w1 + w2 * w2) / 12.0) / (w1 * w2))
}

/// Finds the lattice point `base + sign·(n b + m/b)` nearest to `z`, if it is
/// within `clearance`.
fn nearest_site(z: Complex64, base: Complex64, sign: f64, p: &ModularParam, clearance: f64) -> Option<(u32, u32)> {
    let b = p.b();
    let binv = p.b_inv();
    let w = (z - base) * sign;
    let n_max = ((w.norm() + 1.0) / b.re.min(binv.re)).ceil() as i64 + 1;
    let mut best: Option<(f64, u32, u32)> = None;
    for n in 0..=n_max {
        let rest = w - b * n as f64;
        let m_est = (rest * b).re.round() as i64;
        for m in (m_est - 1)..=(m_est + 1) {
            if m < 0 {
                continue;
            }
            let d = (rest - binv * m as f64).norm();
            if d < clearance && best.is_none_or(|(bd, _, _)| d < bd) {
                best = Some((d, n as u32, m as u32));
            }
        }
    }
    best.map(|(_, n, m)| (n, m))
}

/// Classifies `z` as a zero, a pole or a regular point of γ.
pub fn classify_site(z: Complex64, p: &ModularParam, pole_clearance: f64) -> LatticeSite {
    if let Some((n, m)) = nearest_site(z, ZERO, -1.0, p, pole_clearance) {
        return LatticeSite::Pole { n, m };
    }
    if let Some((n, m)) = nearest_site(z, p.q_sum(), 1.0, p, pole_clearance) {
        return LatticeSite::Zero { n, m };
    }
    LatticeSite::Regular
}

/// Singularities of `1/(sinh(bt) sinh(t/b))`, used to bound wedge angles.
fn sinh_poles(p: &ModularParam) -> Vec<Complex64> {
    let mut poles = vec![ZERO];
    for k in 1..=60 {
        for base in [p.b(), p.b_inv()] {
            let t = I * PI * base * k as f64;
            poles.push(t);
            poles.push(-t);
        }
    }
    poles
}

/// Wedge contour with apex `i·delta` whose right arm makes `coef_r·t` and
/// whose left arm makes `coef_l·t` decay without oscillation, clamped so that
/// the sector swept from the horizontal line contains none of `poles`.
fn steepest_wedge(coef_r: Complex64, coef_l: Complex64, delta: f64, poles: &[Complex64]) -> Contour {
    let clamp = |want: f64, side: f64| {
        let (mut lo, mut hi) = (-1.1f64, 1.1f64);
        for pole in poles {
            let x = side * pole.re;
            if x <= 0.0 {
                continue;
            }
            let phi = (pole.im - delta).atan2(x);
            if phi > 0.0 {
                hi = hi.min(0.85 * phi);
            } else {
                lo = lo.max(0.85 * phi);
            }
        }
        want.clamp(lo, hi)
    };
    let right = clamp(-(-coef_r).arg(), 1.0);
    let left = clamp(coef_l.arg(), -1.0);
    Contour::wedge(delta, left, right)
}

/// Default apex height: half the distance to the first singularity above
/// the origin.
fn default_apex(p: &ModularParam) -> f64 {
    0.5 * (PI * p.b().re).min(PI * p.b_inv().re)
}

/// γ on the fundamental strip `0 < Re z < Re(b + 1/b)` from its integral
/// representation.
pub fn gamma_integral(z: Complex64, p: &ModularParam, tol: f64) -> Result<Complex64> {
    let qs = p.q_sum();
    if !(z.re > 0.0 && z.re < qs.re) {
        return Err(Error::Strip(format!("{z}")));
    }
    let b = p.b();
    let binv = p.b_inv();
    let integrand = |t: Complex64| -> Complex64 {
        if t.re >= 0.0 {
            let den = t * expm1(-2.0 * b * t) * expm1(-2.0 * binv * t);
            -(2.0 * t * (z - qs)).exp() / den
        } else {
            let den = t * expm1(2.0 * b * t) * expm1(2.0 * binv * t);
            -(2.0 * t * z).exp() / den
        }
    };
    // The apex sits on the side of the origin where e^{2tz} is small there;
    // passing below the triple pole at t = 0 costs its residue.
    let below = (z - 0.5 * qs).im < 0.0;
    let apex = if below { -default_apex(p) } else { default_apex(p) };
    let contour = steepest_wedge(2.0 * (z - qs), 2.0 * z, apex, &sinh_poles(p));
    let mut integral = integrate_decaying(integrand, &contour, tol)?.value;
    if below {
        let res = -0.25 * (2.0 * z * z - 2.0 * z * qs + (b * b + binv * binv + 3.0) / 3.0);
        integral -= 2.0 * PI * I * res;
    }
    let h = z - 0.5 * qs;
    let pre = -0.5 * I * PI * h * h + I * PI / 24.0 * (b * b + binv * binv);
    Ok((pre + integral).exp())
}

/// `(x; q)_∞` truncated once `|x q^k|` drops below `cut`.
fn q_pochhammer(x: Complex64, q: Complex64, cut: f64) -> Result<Complex64> {
    let mut prod = ONE;
    let mut term = x;
    for _ in 0..1_000_000 {
        prod *= ONE - term;
        if term.norm() < cut {
            return Ok(prod);
        }
        term *= q;
    }
    Err(Error::NonConvergence("q-product truncation budget exhausted".into()))
}

/// γ from the infinite-product formula; needs `Im b² > 0`.
pub fn gamma_product(z: Complex64, p: &ModularParam, tol: f64) -> Result<Complex64> {
    let q = p.q();
    let qt = p.q_tilde();
    if q.norm() >= 1.0 - 1e-6 || qt.norm() >= 1.0 - 1e-6 {
        return Err(Error::Regime(format!("|q| = {:.6} is not below 1", q.norm())));
    }
    let b = p.b();
    let binv = p.b_inv();
    let cut = tol * 1e-2;
    let num = q_pochhammer((2.0 * PI * I * z * binv).exp() * qt, qt, cut)?;
    let den = q_pochhammer((2.0 * PI * I * z * b).exp(), q, cut)?;
    let pre = (-0.5 * I * PI * b22(z, b, binv)?).exp();
    Ok(pre * num / den)
}

fn strip_value(z: Complex64, p: &ModularParam, cfg: &GammaConfig) -> Result<Complex64> {
    let use_product = match cfg.method {
        GammaMethod::Integral => false,
        GammaMethod::Product => true,
        GammaMethod::Auto => p.q().norm() < 0.75,
    };
    if use_product {
        gamma_product(z, p, cfg.tol)
    } else {
        gamma_integral(z, p, cfg.tol)
    }
}

/// γ(z; b) for any `z` off the pole lattice. The argument is brought into a
/// band around the middle of the fundamental strip with the shift equations
/// `γ(z + b) = 2 sin(πbz) γ(z)` (or with `1/b`, whichever period has the
/// smaller real part).
pub fn gamma(z: Complex64, p: &ModularParam, cfg: &GammaConfig) -> Result<Complex64> {
    cfg.validate()?;
    match classify_site(z, p, cfg.pole_clearance) {
        LatticeSite::Pole { n, m } => return Err(Error::Pole { n, m }),
        LatticeSite::Zero { .. } => return Ok(ZERO),
        LatticeSite::Regular => {}
    }
    let qs = p.q_sum();
    let period = if p.b().re <= p.b_inv().re { p.b() } else { p.b_inv() };
    let step = period.re;
    let lo = 0.5 * qs.re - 0.5 * step;
    let hi = 0.5 * qs.re + 0.5 * step;
    let coincidence = || match classify_site(z, p, 1e-3 * qs.norm()) {
        LatticeSite::Pole { n, m } | LatticeSite::Zero { n, m } => Error::Pole { n, m },
        LatticeSite::Regular => Error::Pole { n: 0, m: 0 },
    };
    let mut w = z;
    let mut factor = ONE;
    let mut steps = 0;
    while w.re > hi || w.re < lo {
        steps += 1;
        if steps > 64 {
            return Err(Error::Strip(format!("{z} needs more than 64 shift steps")));
        }
        if w.re > hi {
            let f = 2.0 * (PI * period * (w - period)).sin();
            if f.norm() < 1e-14 {
                return Err(coincidence());
            }
            factor *= f;
            w -= period;
        } else {
            let f = 2.0 * (PI * period * w).sin();
            if f.norm() < 1e-14 {
                return Err(coincidence());
            }
            factor /= f;
            w += period;
        }
    }
    Ok(factor * strip_value(w, p, cfg)?)
}

/// γ⁽²⁾(u; ω₁, ω₂) = γ(u/√(ω₁ω₂); √(ω₁/ω₂)).
pub fn gamma2(u: Complex64, w1: Complex64, w2: Complex64, cfg: &GammaConfig) -> Result<Complex64> {
    if !(w1.re > 0.0 && w2.re > 0.0) {
        return Err(Error::Domain("quasi-periods need positive real parts".into()));
    }
    let p = ModularParam::new((w1 / w2).sqrt())?;
    let scaled = GammaConfig {
        pole_clearance: 1e-6 * p.q_sum().norm(),
        ..*cfg
    };
    gamma(u / (w1 * w2).sqrt(), &p, &scaled)
}

/// Residue of γ at the pole `-(nb + m/b)`, transported from
/// `Res_{z=0} γ = 1/(2π)` through the shift equations.
pub fn gamma_residue(n: u32, m: u32, p: &ModularParam) -> Complex64 {
    let b = p.b();
    let binv = p.b_inv();
    let site = -(b * n as f64 + binv * m as f64);
    let mut den = ONE;
    for k in 0..n {
        den *= 2.0 * (PI * b * (site + b * k as f64)).sin();
    }
    for l in 0..m {
        den *= 2.0 * (PI * binv * (site + b * n as f64 + binv * l as f64)).sin();
    }
    Complex64::new(0.5 / PI, 0.0) / den
}

/// Singularities of the m(α) integrand.
fn m_poles(p: &ModularParam) -> Vec<Complex64> {
    let mut poles = sinh_poles(p);
    let qs = p.q_sum();
    for k in 0..60 {
        let t = I * PI * (2 * k + 1) as f64 / (2.0 * qs);
        poles.push(t);
        poles.push(-t);
    }
    poles
}

/// The normalisation m(α) from its integral representation. Converges for
/// `|Re α| < Re(b + 1/b)/2`.
pub fn m_norm(alpha: Complex64, p: &ModularParam, tol: f64) -> Result<Complex64> {
    let qs = p.q_sum();
    if !(alpha.re.abs() < 0.5 * qs.re) {
        return Err(Error::Domain(format!(
            "m({alpha}) outside the convergence window |Re α| < {}",
            0.5 * qs.re
        )));
    }
    let b = p.b();
    let binv = p.b_inv();
    let integrand = |t: Complex64| -> Complex64 {
        if t.re >= 0.0 {
            let den = t * expm1(-2.0 * b * t) * expm1(-2.0 * binv * t) * (ONE + (-2.0 * qs * t).exp());
            -(t * (4.0 * alpha - 2.0 * qs)).exp() / den
        } else {
            let den = t * expm1(2.0 * b * t) * expm1(2.0 * binv * t) * (ONE + (2.0 * qs * t).exp());
            -(t * (4.0 * alpha + 2.0 * qs)).exp() / den
        }
    };
    let apex = 0.5 * (PI * b.re).min(PI * binv.re).min(0.5 * PI * (1.0 / qs).re);
    let contour = steepest_wedge(4.0 * alpha - 2.0 * qs, 4.0 * alpha + 2.0 * qs, apex, &m_poles(p));
    let integral = integrate_decaying(integrand, &contour, tol)?.value;
    let pre = -PI * I * (alpha * alpha + (ONE - 2.0 * qs * qs) / 24.0);
    Ok((pre + integral).exp())
}

/// m(α) continued beyond the integral's window with
/// `m(β) = γ(2(β − η)) m(η − β)` and `m(β) m(−β) = 1`.
pub fn m_continued(alpha: Complex64, p: &ModularParam, tol: f64) -> Result<Complex64> {
    fn go(alpha: Complex64, p: &ModularParam, tol: f64, depth: u32) -> Result<Complex64> {
        let half = 0.5 * p.q_sum().re;
        if alpha.re.abs() < half - 1e-9 {
            return m_norm(alpha, p, tol);
        }
        if depth == 0 {
            return Err(Error::Domain(format!("m({alpha}) is too far from the window")));
        }
        let eta = p.eta();
        let cfg = GammaConfig::new(p).with_tol(tol);
        let reflected = eta - alpha;
        if reflected.re.abs() < alpha.re.abs() {
            let g = gamma(2.0 * (alpha - eta), p, &cfg)?;
            return Ok(g * go(reflected, p, tol, depth - 1)?);
        }
        let mirrored = eta + alpha;
        // m(-β) = γ(2(-β - η)) m(η + β), then m(β) = 1/m(-β).
        let g = gamma(-2.0 * (alpha + eta), p, &cfg)?;
        Ok(ONE / (g * go(mirrored, p, tol, depth - 1)?))
    }
    go(alpha, p, tol, 6)
}

/// Free energy per edge `-log(m(α) m(η − α))`, principal branch.
pub fn free_energy_per_edge(alpha: Complex64, p: &ModularParam, tol: f64) -> Result<Complex64> {
    let a = m_continued(alpha, p, tol)?;
    let b = m_continued(p.eta() - alpha, p, tol)?;
    Ok(-(a * b).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cx::{c, rel_diff};

    fn p08() -> ModularParam {
        ModularParam::real(0.8).unwrap()
    }

    fn p_unit() -> ModularParam {
        ModularParam::new(Complex64::from_polar(1.0, PI / 6.0)).unwrap()
    }

    #[test]
    fn derived_quantities() {
        let p = p08();
        assert!((p.eta() - c(-1.025, 0.0)).norm() < 1e-15);
        assert!((p.swapped().b() - c(1.25, 0.0)).norm() < 1e-15);
        assert!((p.q() - (2.0 * PI * I * 0.64).exp()).norm() < 1e-15);
        assert!(ModularParam::new(c(-0.1, 1.0)).is_err());
    }

    #[test]
    fn b22_examples() {
        let (w1, w2) = (c(0.7, 0.1), c(1.3, -0.2));
        let mid = b22(0.5 * (w1 + w2), w1, w2).unwrap();
        assert!((mid + (w1 * w1 + w2 * w2) / (12.0 * w1 * w2)).norm() < 1e-15);
        assert!((b22(ZERO, ONE, ONE).unwrap() - c(5.0 / 6.0, 0.0)).norm() < 1e-15);
        let u = c(0.3, -0.8);
        assert!((b22(u, w1, w2).unwrap() - b22(u, w2, w1).unwrap()).norm() < 1e-15);
        assert!(b22(u, ZERO, w2).is_err());
    }

    #[test]
    fn fixed_point_of_reflection_is_one() {
        let p = p08();
        let v = gamma_integral(-p.eta(), &p, 1e-13).unwrap();
        assert!((v - ONE).norm() < 1e-12, "{v}");
        let pu = p_unit();
        let v = gamma_product(-pu.eta(), &pu, 1e-13).unwrap();
        assert!((v - ONE).norm() < 1e-8, "{v}");
    }

    #[test]
    fn shift_equation_from_integral() {
        let p = p08();
        let b = p.b();
        let z = 0.4 * p.q_sum() - 0.5 * b + c(0.0, 0.3);
        let cfg = GammaConfig::new(&p).with_method(GammaMethod::Integral);
        let lhs = gamma(z + b, &p, &cfg).unwrap();
        let rhs = 2.0 * (PI * b * z).sin() * gamma_integral(z, &p, 1e-13).unwrap();
        assert!(rel_diff(lhs, rhs) < 1e-11);
    }

    #[test]
    fn integral_matches_product_for_complex_b() {
        let p = p_unit();
        for z in [c(0.5, 0.1), c(1.2, -0.4), c(0.9, 0.8)] {
            let a = gamma_integral(z, &p, 1e-13).unwrap();
            let b = gamma_product(z, &p, 1e-13).unwrap();
            assert!(rel_diff(a, b) < 1e-10, "{z}: {a} vs {b}");
        }
    }

    #[test]
    fn large_imaginary_part_is_stable_for_real_b() {
        let p = p08();
        let z = c(0.7, 3.5);
        let w = c(0.7, -3.5);
        let a = gamma_integral(z, &p, 1e-13).unwrap();
        let b = gamma_integral(w, &p, 1e-13).unwrap();
        assert!(rel_diff(a, b.conj()) < 1e-10);
        let refl = gamma_integral(-2.0 * p.eta() - z, &p, 1e-13).unwrap();
        assert!(rel_diff(a * refl, ONE) < 1e-10);
        // On the middle line |γ| = 1, far up and far down.
        for y in [-25.0, -12.0, 12.0, 25.0] {
            let v = gamma_integral(0.5 * p.q_sum() + c(0.0, y), &p, 1e-13).unwrap();
            assert!((v.norm() - 1.0).abs() < 1e-10, "y = {y}: {v}");
        }
    }

    #[test]
    fn product_rejects_real_b() {
        assert!(matches!(
            gamma_product(c(0.5, 0.0), &p08(), 1e-12),
            Err(Error::Regime(_))
        ));
    }

    #[test]
    fn integral_rejects_points_outside_strip() {
        assert!(matches!(
            gamma_integral(c(-0.1, 0.0), &p08(), 1e-12),
            Err(Error::Strip(_))
        ));
    }

    #[test]
    fn lattice_classification() {
        let p = p08();
        let b = p.b();
        let cl = 1e-9;
        assert_eq!(
            classify_site(2.0 * b + 1.0 / b, &p, cl),
            LatticeSite::Zero { n: 1, m: 0 }
        );
        assert_eq!(classify_site(-1.0 / b, &p, cl), LatticeSite::Pole { n: 0, m: 1 });
        assert_eq!(classify_site(p.q_sum() / 3.0, &p, cl), LatticeSite::Regular);
        let pu = p_unit();
        let z = -(pu.b() * 2.0 + pu.b_inv() * 3.0);
        assert_eq!(classify_site(z, &pu, cl), LatticeSite::Pole { n: 2, m: 3 });
    }

    #[test]
    fn zeros_and_poles() {
        let p = p08();
        let cfg = GammaConfig::new(&p);
        assert_eq!(gamma(p.q_sum(), &p, &cfg).unwrap(), ZERO);
        assert_eq!(gamma(ZERO, &p, &cfg), Err(Error::Pole { n: 0, m: 0 }));
        assert_eq!(Error::Pole { n: 0, m: 0 }.to_string(), "pole(0,0)");
    }

    #[test]
    fn gamma_at_b_equals_b_and_residue_at_origin() {
        let p = p_unit();
        let cfg = GammaConfig {
            pole_clearance: 1e-12,
            ..GammaConfig::new(&p)
        };
        let v = gamma(p.b(), &p, &cfg).unwrap();
        assert!(rel_diff(v, p.b()) < 1e-10);
        let eps = 1e-7;
        let near = gamma(c(eps, 0.0), &p, &cfg).unwrap() * eps;
        assert!((near - gamma_residue(0, 0, &p)).norm() < 1e-6);
    }

    #[test]
    fn residue_away_from_origin() {
        let p = p08();
        let cfg = GammaConfig {
            pole_clearance: 1e-12,
            ..GammaConfig::new(&p)
        };
        let site = -(p.b() + 2.0 * p.b_inv());
        let eps = c(1e-8, 1e-8);
        let near = gamma(site + eps, &p, &cfg).unwrap() * eps;
        let res = gamma_residue(1, 2, &p);
        assert!(rel_diff(near, res) < 1e-6, "{near} vs {res}");
    }

    #[test]
    fn gamma2_examples() {
        let p = ModularParam::real(1.0).unwrap();
        let cfg = GammaConfig::new(&p);
        let v = gamma2(ONE, ONE, ONE, &cfg).unwrap();
        assert!((v - ONE).norm() < 1e-11);
        let (u, w1, w2) = (c(0.9, 0.2), c(0.8, 0.0), c(1.1, 0.0));
        let a = gamma2(u, w1, w2, &cfg).unwrap();
        let scaled = gamma2(u * 2.5, w1 * 2.5, w2 * 2.5, &cfg).unwrap();
        let swapped = gamma2(u, w2, w1, &cfg).unwrap();
        assert!(rel_diff(a, scaled) < 1e-11);
        assert!(rel_diff(a, swapped) < 1e-11);
    }

    #[test]
    fn m_unitarity_and_zero() {
        let p = p08();
        let a = m_norm(c(0.1, 0.0), &p, 1e-13).unwrap();
        let b = m_norm(c(-0.1, 0.0), &p, 1e-13).unwrap();
        assert!((a * b - ONE).norm() < 1e-10, "{a} {b}");
        let z = m_norm(ZERO, &p, 1e-13).unwrap();
        assert!((z - ONE).norm() < 1e-10, "{z}");
        assert!(m_norm(c(1.1, 0.0), &p, 1e-12).is_err());
    }

    #[test]
    fn free_energy_is_symmetric() {
        let p = p08();
        let eta = p.eta();
        let f = free_energy_per_edge(0.5 * eta, &p, 1e-12).unwrap();
        let m = m_norm(0.5 * eta, &p, 1e-12).unwrap();
        assert!((f + 2.0 * m.ln()).norm() < 1e-9);
        let alpha = c(0.1, 0.0);
        let f1 = free_energy_per_edge(alpha, &p, 1e-12).unwrap();
        let f2 = free_energy_per_edge(alpha, &p.swapped(), 1e-12).unwrap();
        assert!((f1 - f2).norm() < 1e-8);
    }
}
