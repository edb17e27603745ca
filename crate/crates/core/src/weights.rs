//! Boltzmann weights of the generalised Faddeev–Volkov model, the
//! star-triangle and beta-integral checks, and the R-operator kernel.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::cx::{c, I, ONE};
use crate::error::{Error, Result};
use crate::hypgamma::{gamma, GammaConfig, ModularParam};
use crate::quadrature::{integrate_decaying, Contour};

/// Which of the two positivity regimes `b` belongs to, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `0 < b < 1`.
    RealB,
    /// `|b| = 1` with `Im b² > 0`.
    UnitCircleB,
}

pub fn regime(p: &ModularParam) -> Option<Regime> {
    let b = p.b();
    if b.im == 0.0 && b.re > 0.0 && b.re < 1.0 {
        Some(Regime::RealB)
    } else if (b.norm() - 1.0).abs() < 1e-12 && (b * b).im > 0.0 {
        Some(Regime::UnitCircleB)
    } else {
        None
    }
}

/// Rapidity window `η < α < -η` of the horizontal weight.
pub fn in_w_window(alpha: f64, p: &ModularParam) -> bool {
    let eta = p.eta().re;
    eta < alpha && alpha < -eta
}

/// Rapidity window `0 < -α < -2η` of the vertical weight.
pub fn in_wbar_window(alpha: f64, p: &ModularParam) -> bool {
    let eta = p.eta().re;
    0.0 < -alpha && -alpha < -2.0 * eta
}

fn gamma_pm_pm(a: Complex64, x: Complex64, y: Complex64, p: &ModularParam, cfg: &GammaConfig) -> Result<Complex64> {
    let mut prod = ONE;
    for sx in [1.0, -1.0] {
        for sy in [1.0, -1.0] {
            prod *= gamma(a + I * (sx * x + sy * y), p, cfg)?;
        }
    }
    Ok(prod)
}

/// Horizontal edge weight `W(α; x, y) = γ(α − η ± ix ± iy)`.
pub fn weight_w(
    alpha: Complex64,
    x: Complex64,
    y: Complex64,
    p: &ModularParam,
    cfg: &GammaConfig,
) -> Result<Complex64> {
    gamma_pm_pm(alpha - p.eta(), x, y, p, cfg)
}

/// Vertical edge weight `W̄(α; x, y) = γ(−α ± ix ± iy)`.
pub fn weight_wbar(
    alpha: Complex64,
    x: Complex64,
    y: Complex64,
    p: &ModularParam,
    cfg: &GammaConfig,
) -> Result<Complex64> {
    gamma_pm_pm(-alpha, x, y, p, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhoForm {
    /// `1/(2 γ(2iz) γ(−2iz))`.
    Gamma,
    /// `2 sinh(2πbz) sinh(2πz/b)`.
    Trig,
}

/// Vertex weight ρ(z).
pub fn rho(z: Complex64, p: &ModularParam, form: RhoForm, cfg: &GammaConfig) -> Result<Complex64> {
    match form {
        RhoForm::Gamma => {
            let g = gamma(2.0 * I * z, p, cfg)? * gamma(-2.0 * I * z, p, cfg)?;
            Ok(ONE / (2.0 * g))
        }
        RhoForm::Trig => {
            if z.norm() < cfg.pole_clearance {
                return Err(Error::Pole { n: 0, m: 0 });
            }
            Ok(rho_trig(z, p))
        }
    }
}

pub(crate) fn rho_trig(z: Complex64, p: &ModularParam) -> Complex64 {
    2.0 * (2.0 * PI * p.b() * z).sinh() * (2.0 * PI * p.b_inv() * z).sinh()
}

/// Star-triangle normalisation `γ(2β−2α) γ(2γ−2β) γ(2α−2γ−2η)`.
pub fn chi(
    alpha: Complex64,
    beta: Complex64,
    gam: Complex64,
    p: &ModularParam,
    cfg: &GammaConfig,
) -> Result<Complex64> {
    Ok(gamma(2.0 * beta - 2.0 * alpha, p, cfg)?
        * gamma(2.0 * gam - 2.0 * beta, p, cfg)?
        * gamma(2.0 * alpha - 2.0 * gam - 2.0 * p.eta(), p, cfg)?)
}

/// Six parameters with positive real parts summing to `b + 1/b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BalancedSextet {
    g: [Complex64; 6],
}

impl BalancedSextet {
    pub fn new(g: [Complex64; 6], p: &ModularParam) -> Result<Self> {
        let sum: Complex64 = g.iter().sum();
        let defect = (sum + 2.0 * p.eta()).norm();
        if defect > 1e-12 {
            return Err(Error::Invariant(format!("balancing violated by {defect:.3e}")));
        }
        if g.iter().any(|gk| !(gk.re > 0.0)) {
            return Err(Error::Domain("every g_k needs a positive real part".into()));
        }
        Ok(Self { g })
    }

    /// Random sextet with `Re g_k` in `re_range` and small imaginary parts
    /// summing to zero (rejection sampling on the last entry).
    pub fn sample<R: Rng>(rng: &mut R, p: &ModularParam, re_range: (f64, f64)) -> Result<Self> {
        let target = -2.0 * p.eta();
        for _ in 0..10_000 {
            let mut g = [Complex64::new(0.0, 0.0); 6];
            for gk in g.iter_mut().take(5) {
                *gk = c(rng.random_range(re_range.0..re_range.1), rng.random_range(-0.3..0.3));
            }
            g[5] = target - g.iter().take(5).sum::<Complex64>();
            if g[5].re > re_range.0 && g[5].re < re_range.1 && g[5].im.abs() < 0.6 {
                return Self::new(g, p);
            }
        }
        Err(Error::Domain("no balanced sextet in the requested range".into()))
    }

    pub fn params(&self) -> &[Complex64; 6] {
        &self.g
    }
}

/// `|∫ ∏ γ(g_k ± iz) dz / (2 γ(±2iz)) / ∏_{j<k} γ(g_j + g_k) − 1|`.
pub fn check_beta_integral(s: &BalancedSextet, p: &ModularParam, tol: f64) -> Result<f64> {
    let cfg = GammaConfig::new(p).with_tol((tol * 1e-3).max(1e-14));
    let g = s.params();
    let failure = std::cell::RefCell::new(None);
    let integrand = |z: Complex64| -> Complex64 {
        let mut v = rho_trig(z, p);
        for gk in g {
            match (gamma(gk + I * z, p, &cfg), gamma(gk - I * z, p, &cfg)) {
                (Ok(a), Ok(b)) => v *= a * b,
                (Err(e), _) | (_, Err(e)) => {
                    failure.borrow_mut().get_or_insert(e);
                    return Complex64::new(0.0, 0.0);
                }
            }
        }
        v
    };
    let lhs = integrate_decaying(integrand, &Contour::real_line(), tol * 1e-2);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let lhs = lhs?.value;
    let mut rhs = ONE;
    for j in 0..6 {
        for k in (j + 1)..6 {
            rhs *= gamma(g[j] + g[k], p, &cfg)?;
        }
    }
    Ok((lhs / rhs - ONE).norm())
}

/// Rapidities and spins of one star-triangle cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StarTriangleParams {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub gamma: Complex64,
    pub x: Complex64,
    pub y: Complex64,
    pub w: Complex64,
}

impl StarTriangleParams {
    /// The three parameter pairs of the equivalent beta integral.
    pub fn sextet(&self, p: &ModularParam) -> Result<BalancedSextet> {
        let a = self.beta - self.alpha;
        let b = self.alpha - self.gamma - p.eta();
        let g = self.gamma - self.beta;
        BalancedSextet::new(
            [
                a + I * self.x,
                a - I * self.x,
                b + I * self.y,
                b - I * self.y,
                g + I * self.w,
                g - I * self.w,
            ],
            p,
        )
    }

    /// Random real parameters with `α < β < γ < α − η` and spins in `[-0.5, 0.5]`.
    pub fn sample<R: Rng>(rng: &mut R, p: &ModularParam) -> Self {
        let room = -p.eta().re;
        let alpha = rng.random_range(-0.2..0.2);
        let d1 = rng.random_range(0.15 * room..0.4 * room);
        let d2 = rng.random_range(0.15 * room..0.4 * room);
        let mut spin = || c(rng.random_range(-0.5..0.5), 0.0);
        Self {
            alpha: c(alpha, 0.0),
            beta: c(alpha + d1, 0.0),
            gamma: c(alpha + d1 + d2, 0.0),
            x: spin(),
            y: spin(),
            w: spin(),
        }
    }
}

/// `|LHS / (χ · RHS) − 1|` for the star-triangle relation.
pub fn check_star_triangle(s: &StarTriangleParams, p: &ModularParam, tol: f64) -> Result<f64> {
    let window = [
        s.beta - s.alpha + I * s.x,
        s.beta - s.alpha - I * s.x,
        s.alpha - s.gamma - p.eta() + I * s.y,
        s.alpha - s.gamma - p.eta() - I * s.y,
        s.gamma - s.beta + I * s.w,
        s.gamma - s.beta - I * s.w,
    ];
    if window.iter().any(|v| !(v.re > 0.0)) {
        return Err(Error::Domain(
            "star-triangle parameters outside the convergence window".into(),
        ));
    }
    let cfg = GammaConfig::new(p).with_tol((tol * 1e-3).max(1e-14));
    let failure = std::cell::RefCell::new(None);
    let integrand = |z: Complex64| -> Complex64 {
        let v = (|| -> Result<Complex64> {
            Ok(rho_trig(z, p)
                * weight_wbar(s.alpha - s.beta, s.x, z, p, &cfg)?
                * weight_w(s.alpha - s.gamma, s.y, z, p, &cfg)?
                * weight_wbar(s.beta - s.gamma, s.w, z, p, &cfg)?)
        })();
        v.unwrap_or_else(|e| {
            failure.borrow_mut().get_or_insert(e);
            Complex64::new(0.0, 0.0)
        })
    };
    let lhs = integrate_decaying(integrand, &Contour::real_line(), tol * 1e-2);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let lhs = lhs?.value;
    let rhs = chi(s.alpha, s.beta, s.gamma, p, &cfg)?
        * weight_w(s.alpha - s.beta, s.y, s.w, p, &cfg)?
        * weight_wbar(s.alpha - s.gamma, s.x, s.w, p, &cfg)?
        * weight_w(s.beta - s.gamma, s.x, s.y, p, &cfg)?;
    Ok((lhs / rhs - ONE).norm())
}

/// Rapidities of the integral R-operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelRapidities {
    pub u1: Complex64,
    pub u2: Complex64,
    pub v1: Complex64,
    pub v2: Complex64,
}

/// Integrand of the R-operator including the measure
/// `1/(4 γ(±2ix₁) γ(±2ix₂))`: a product of sixteen γ values.
pub fn r_kernel(
    r: &KernelRapidities,
    z: (Complex64, Complex64),
    x: (Complex64, Complex64),
    p: &ModularParam,
    cfg: &GammaConfig,
) -> Result<Complex64> {
    let eta = p.eta();
    let (z1, z2) = z;
    let (x1, x2) = x;
    let mut measure = ONE;
    for xi in [x1, x2] {
        measure *= gamma(2.0 * I * xi, p, cfg)? * gamma(-2.0 * I * xi, p, cfg)?;
    }
    Ok(gamma_pm_pm(r.u1 - r.v2 - eta, z1, z2, p, cfg)?
        * gamma_pm_pm(r.v1 - r.u1, x1, z2, p, cfg)?
        * gamma_pm_pm(r.v2 - r.u2, x2, z1, p, cfg)?
        * gamma_pm_pm(r.u2 - r.v1 - eta, x1, x2, p, cfg)?
        / (4.0 * measure))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cx::rel_diff;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup() -> (ModularParam, GammaConfig) {
        let p = ModularParam::real(0.8).unwrap();
        (p, GammaConfig::new(&p))
    }

    #[test]
    fn weights_are_symmetric_and_reflect() {
        let (p, cfg) = setup();
        let (a, x, y) = (c(0.1, 0.0), c(0.3, 0.0), c(-0.2, 0.0));
        let w = weight_w(a, x, y, &p, &cfg).unwrap();
        assert!(rel_diff(w, weight_w(a, y, x, &p, &cfg).unwrap()) < 1e-12);
        assert!(rel_diff(w * weight_w(-a, x, y, &p, &cfg).unwrap(), ONE) < 1e-11);
        assert!(w.re > 0.0 && w.im.abs() < 1e-12 * w.re);
    }

    #[test]
    fn crossing() {
        let (p, cfg) = setup();
        let (a, x, y) = (c(-0.4, 0.0), c(0.25, 0.0), c(0.1, 0.0));
        let lhs = weight_wbar(a, x, y, &p, &cfg).unwrap();
        let rhs = weight_w(p.eta() - a, x, y, &p, &cfg).unwrap();
        assert!(rel_diff(lhs, rhs) < 1e-12);
        assert!(rel_diff(lhs, weight_wbar(a, y, x, &p, &cfg).unwrap()) < 1e-12);
    }

    #[test]
    fn rho_forms_agree() {
        let (p, cfg) = setup();
        let z = c(0.37, 0.0);
        let g = rho(z, &p, RhoForm::Gamma, &cfg).unwrap();
        let t = rho(z, &p, RhoForm::Trig, &cfg).unwrap();
        assert!(rel_diff(g, t) < 1e-10);
        assert!(rel_diff(t, rho(-z, &p, RhoForm::Trig, &cfg).unwrap()) < 1e-15);
        assert!(t.re > 0.0);
        assert!(rho(c(0.0, 0.0), &p, RhoForm::Trig, &cfg).is_err());
    }

    #[test]
    fn chi_is_translation_invariant_and_has_poles() {
        let (p, cfg) = setup();
        let (a, b, g) = (c(0.1, 0.0), c(0.25, 0.0), c(0.4, 0.0));
        let v = chi(a, b, g, &p, &cfg).unwrap();
        let s = c(0.13, 0.0);
        assert!(rel_diff(v, chi(a + s, b + s, g + s, &p, &cfg).unwrap()) < 1e-11);
        assert!(matches!(chi(a, a, g, &p, &cfg), Err(Error::Pole { .. })));
    }

    #[test]
    fn symmetric_sextet_integral() {
        let (p, _) = setup();
        let g = -2.0 * p.eta() / 6.0;
        let s = BalancedSextet::new([g; 6], &p).unwrap();
        assert!(check_beta_integral(&s, &p, 1e-8).unwrap() < 1e-6);
    }

    #[test]
    fn unbalanced_sextet_is_rejected() {
        let (p, _) = setup();
        let r = BalancedSextet::new([c(0.3, 0.0); 6], &p);
        assert!(matches!(r, Err(Error::Invariant(_))));
    }

    #[test]
    fn sampled_sextet_is_balanced() {
        let (p, _) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = BalancedSextet::sample(&mut rng, &p, (0.05, 0.6)).unwrap();
        let sum: Complex64 = s.params().iter().sum();
        assert!((sum - p.q_sum()).norm() < 1e-12);
    }

    #[test]
    fn star_triangle_window_is_enforced() {
        let (p, _) = setup();
        let s = StarTriangleParams {
            alpha: c(0.3, 0.0),
            beta: c(0.1, 0.0),
            gamma: c(0.6, 0.0),
            x: c(0.0, 0.0),
            y: c(0.0, 0.0),
            w: c(0.0, 0.0),
        };
        assert!(matches!(check_star_triangle(&s, &p, 1e-8), Err(Error::Domain(_))));
    }

    #[test]
    fn kernel_is_even_in_integration_variables() {
        let (p, cfg) = setup();
        let r = KernelRapidities {
            u1: c(0.2, 0.0),
            u2: c(-0.1, 0.0),
            v1: c(0.5, 0.0),
            v2: c(0.3, 0.0),
        };
        let z = (c(0.1, 0.0), c(-0.3, 0.0));
        let k = r_kernel(&r, z, (c(0.2, 0.0), c(0.4, 0.0)), &p, &cfg).unwrap();
        let k1 = r_kernel(&r, z, (c(-0.2, 0.0), c(0.4, 0.0)), &p, &cfg).unwrap();
        let k2 = r_kernel(&r, z, (c(0.2, 0.0), c(-0.4, 0.0)), &p, &cfg).unwrap();
        assert!(rel_diff(k, k1) < 1e-12 && rel_diff(k, k2) < 1e-12);
    }
}
