//! Adaptive Gauss–Kronrod quadrature along contours in the complex plane.
//!
//! A contour is split into pieces (rays, arcs). Rays are truncated at a
//! half-width `T` that doubles until the outermost panel is negligible.
//! All panels share one global error budget and the worst panel is bisected
//! first, so the node placement is deterministic.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::cx::{I, ZERO};
use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_PANELS: usize = 20_000;
const MAX_HALF_WIDTH: f64 = 1e14;

/// Shape of an integration contour running from `-inf` to `+inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContourKind {
    /// The real axis.
    RealLine,
    /// The line `Im t = offset`.
    ShiftedLine(f64),
    /// The real axis with a half circle of the given radius above the origin.
    DetourAboveOrigin(f64),
    /// Two rays leaving `i·apex` (above or below the origin); the left ray goes to `-inf` rotated up by
    /// `left_angle`, the right ray to `+inf` rotated up by `right_angle`.
    /// Negative angles rotate the arms downwards.
    Wedge {
        apex: f64,
        left_angle: f64,
        right_angle: f64,
    },
}

/// An integration contour together with its initial truncation half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contour {
    pub kind: ContourKind,
    pub truncation: f64,
}

impl Contour {
    pub fn real_line() -> Self {
        Self {
            kind: ContourKind::RealLine,
            truncation: 8.0,
        }
    }

    pub fn shifted(offset: f64) -> Self {
        Self {
            kind: ContourKind::ShiftedLine(offset),
            truncation: 8.0,
        }
    }

    pub fn detour(radius: f64) -> Self {
        Self {
            kind: ContourKind::DetourAboveOrigin(radius),
            truncation: 8.0,
        }
    }

    pub fn wedge(apex: f64, left_angle: f64, right_angle: f64) -> Self {
        Self {
            kind: ContourKind::Wedge {
                apex,
                left_angle,
                right_angle,
            },
            truncation: 8.0,
        }
    }

    pub fn with_truncation(mut self, t: f64) -> Self {
        self.truncation = t;
        self
    }

    /// Checks the contour parameters against the distance to the nearest
    /// integrand singularity the caller knows about.
    pub fn validate(&self, nearest_pole: f64) -> Result<()> {
        if !(self.truncation >= 1.0) || !self.truncation.is_finite() {
            return Err(Error::Domain(format!("truncation {} < 1", self.truncation)));
        }
        let clearance = match self.kind {
            ContourKind::RealLine => None,
            ContourKind::ShiftedLine(d) => Some(d.abs()),
            ContourKind::DetourAboveOrigin(r) => {
                if !(r > 0.0) {
                    return Err(Error::Domain(format!("detour radius {r} must be positive")));
                }
                Some(r)
            }
            ContourKind::Wedge {
                apex,
                left_angle,
                right_angle,
            } => {
                let ok = |a: f64| a.abs() < 0.5 * PI;
                if apex == 0.0 || !apex.is_finite() || !ok(left_angle) || !ok(right_angle) {
                    return Err(Error::Domain(
                        "wedge needs a non-zero apex and angles in (-pi/2, pi/2)".into(),
                    ));
                }
                Some(apex.abs())
            }
        };
        match clearance {
            Some(d) if d >= nearest_pole => Err(Error::Domain(format!(
                "contour offset {d} does not clear the pole at distance {nearest_pole}"
            ))),
            _ => Ok(()),
        }
    }

    fn pieces(&self) -> Vec<Piece> {
        let t = self.truncation;
        match self.kind {
            ContourKind::RealLine => vec![
                Piece::ray(ZERO, Complex64::new(-1.0, 0.0), true, t),
                Piece::ray(ZERO, Complex64::new(1.0, 0.0), false, t),
            ],
            ContourKind::ShiftedLine(d) => vec![
                Piece::ray(I * d, Complex64::new(-1.0, 0.0), true, t),
                Piece::ray(I * d, Complex64::new(1.0, 0.0), false, t),
            ],
            ContourKind::DetourAboveOrigin(r) => vec![
                Piece::ray(Complex64::new(-r, 0.0), Complex64::new(-1.0, 0.0), true, t),
                Piece::Arc {
                    radius: r,
                    from: PI,
                    to: 0.0,
                },
                Piece::ray(Complex64::new(r, 0.0), Complex64::new(1.0, 0.0), false, t),
            ],
            ContourKind::Wedge {
                apex,
                left_angle,
                right_angle,
            } => vec![
                Piece::ray(I * apex, Complex64::new(-left_angle.cos(), left_angle.sin()), true, t),
                Piece::ray(I * apex, Complex64::from_polar(1.0, right_angle), false, t),
            ],
        }
    }
}

/// Value of a contour integral with its heuristic error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub err_estimate: f64,
    pub panels_used: usize,
}

#[derive(Debug, Clone, Copy)]
enum Piece {
    /// `t = origin + dir·s`, `s >= 0`; `reversed` flips the orientation.
    Ray {
        origin: Complex64,
        dir: Complex64,
        reversed: bool,
        reach: f64,
    },
    /// `t = radius·e^{iφ}` with φ running from `from` to `to`.
    Arc { radius: f64, from: f64, to: f64 },
}

impl Piece {
    fn ray(origin: Complex64, dir: Complex64, reversed: bool, reach: f64) -> Self {
        Piece::Ray {
            origin,
            dir,
            reversed,
            reach,
        }
    }

    /// Point and oriented derivative at parameter `s`.
    fn map(&self, s: f64) -> (Complex64, Complex64) {
        match *self {
            Piece::Ray {
                origin, dir, reversed, ..
            } => {
                let d = if reversed { -dir } else { dir };
                (origin + dir * s, d)
            }
            Piece::Arc { radius, from, to } => {
                let phi = from + (to - from) * s;
                let e = Complex64::from_polar(radius, phi);
                (e, I * e * (to - from))
            }
        }
    }

    fn initial_range(&self) -> (f64, f64) {
        match *self {
            Piece::Ray { reach, .. } => (0.0, reach),
            Piece::Arc { .. } => (0.0, 1.0),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    piece: usize,
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
    l1: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.piece.cmp(&self.piece))
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut e = err;
    if resasc != 0.0 && e != 0.0 {
        e = resasc * (200.0 * e / resasc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    e.max(floor)
}

fn gk15<F: Fn(Complex64) -> Complex64>(f: &F, piece: &Piece, a: f64, b: f64) -> Result<Panel> {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |s: f64| -> Result<Complex64> {
        let (t, dt) = piece.map(s);
        let v = f(t) * dt;
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonConvergence(format!("integrand not finite at t = {t}")))
        }
    };
    let fc = eval(centre)?;
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut resabs = fc.norm() * WGK[7];
    let mut vals = [(ZERO, ZERO); 7];
    for (j, x) in XGK.iter().take(7).enumerate() {
        let dx = half * x;
        let f1 = eval(centre - dx)?;
        let f2 = eval(centre + dx)?;
        vals[j] = (f1, f2);
        kron += (f1 + f2) * WGK[j];
        resabs += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    let mean = kron * 0.5;
    let mut resasc = (fc - mean).norm() * WGK[7];
    for (j, (f1, f2)) in vals.iter().enumerate() {
        resasc += ((f1 - mean).norm() + (f2 - mean).norm()) * WGK[j];
    }
    let h = half.abs();
    let err = rescale_error(((kron - gauss) * half).norm(), resabs * h, resasc * h);
    Ok(Panel {
        piece: 0,
        a,
        b,
        value: kron * half,
        err,
        l1: resabs * h,
    })
}

/// Integrates `f` along the contour `c` to relative tolerance `tol`.
///
/// Convergence is declared when the summed panel error is below
/// `tol · max(|I|, 0.01·∫|f|)` (never below a few ulps of `∫|f|`), and the
/// outermost panel of every ray is below a tenth of that target.
pub fn integrate_decaying<F>(f: F, c: &Contour, tol: f64) -> Result<QuadResult>
where
    F: Fn(Complex64) -> Complex64,
{
    integrate_with_floor(f, c, tol, 0.0).map(|(r, _)| r)
}

/// As [`integrate_decaying`], but also accepts an absolute error below
/// `floor`. Useful when the integral may be exponentially small compared
/// with the scale the caller cares about.
pub fn integrate_decaying_floor<F>(f: F, c: &Contour, tol: f64, floor: f64) -> Result<QuadResult>
where
    F: Fn(Complex64) -> Complex64,
{
    integrate_with_floor(f, c, tol, floor).map(|(r, _)| r)
}

/// As [`integrate_decaying`], with an extra absolute error floor. Also
/// returns the integral of `|f|` along the contour.
fn integrate_with_floor<F>(f: F, c: &Contour, tol: f64, floor: f64) -> Result<(QuadResult, f64)>
where
    F: Fn(Complex64) -> Complex64,
{
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::Domain(format!("tolerance {tol} outside (0, 1)")));
    }
    c.validate(f64::INFINITY)?;
    let pieces = c.pieces();
    let mut heap = BinaryHeap::new();
    let mut reach = Vec::with_capacity(pieces.len());
    for (k, piece) in pieces.iter().enumerate() {
        let (a, b) = piece.initial_range();
        let n = match piece {
            Piece::Ray { .. } => (b - a).ceil().clamp(1.0, 32.0) as usize,
            Piece::Arc { .. } => 4,
        };
        for j in 0..n {
            let lo = a + (b - a) * j as f64 / n as f64;
            let hi = a + (b - a) * (j + 1) as f64 / n as f64;
            let mut p = gk15(&f, piece, lo, hi)?;
            p.piece = k;
            heap.push(p);
        }
        reach.push(b);
    }
    let mut tails: Vec<Option<Panel>> = vec![None; pieces.len()];
    loop {
        let (value, err, l1) = totals(&heap);
        let target = (tol * value.norm().max(0.01 * l1))
            .max(200.0 * f64::EPSILON * l1)
            .max(floor);
        if err > target {
            if heap.len() >= MAX_PANELS {
                return Err(Error::NonConvergence(format!(
                    "panel budget exhausted (error {err:.3e}, target {target:.3e})"
                )));
            }
            let worst = heap.pop().expect("non-empty panel set");
            let mid = 0.5 * (worst.a + worst.b);
            for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
                let mut p = gk15(&f, &pieces[worst.piece], lo, hi)?;
                p.piece = worst.piece;
                heap.push(p);
            }
            continue;
        }
        let mut extended = false;
        for (k, piece) in pieces.iter().enumerate() {
            if !matches!(piece, Piece::Ray { .. }) {
                continue;
            }
            let done = tails[k].map(|t| t.l1 < 0.1 * target).unwrap_or(false);
            if done {
                continue;
            }
            let t = reach[k];
            if 2.0 * t > MAX_HALF_WIDTH {
                return Err(Error::NonConvergence("integrand tail does not decay".into()));
            }
            let mut p = gk15(&f, piece, t, 2.0 * t)?;
            p.piece = k;
            tails[k] = Some(p);
            heap.push(p);
            reach[k] = 2.0 * t;
            extended = true;
        }
        if !extended {
            return Ok((
                QuadResult {
                    value,
                    err_estimate: err,
                    panels_used: heap.len(),
                },
                l1,
            ));
        }
    }
}

fn totals(heap: &BinaryHeap<Panel>) -> (Complex64, f64, f64) {
    // Sum in a fixed order so the result does not depend on heap layout.
    let mut panels: Vec<&Panel> = heap.iter().collect();
    panels.sort_by(|x, y| x.piece.cmp(&y.piece).then(x.a.total_cmp(&y.a)));
    let mut v = ZERO;
    let mut e = 0.0;
    let mut l = 0.0;
    for p in panels {
        v += p.value;
        e += p.err;
        l += p.l1;
    }
    (v, e, l)
}

/// Iterated integral `∫_{c1} ∫_{c2} f(t1, t2) dt2 dt1`.
///
/// A coarse first pass measures `∫∫|f|`; a hundredth of `tol` times that
/// mass is used as an absolute floor so that integrals which cancel to zero
/// still converge.
pub fn integrate_2d_decaying<F>(f: F, c1: &Contour, c2: &Contour, tol: f64) -> Result<QuadResult>
where
    F: Fn(Complex64, Complex64) -> Complex64,
{
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::Domain(format!("tolerance {tol} outside (0, 1)")));
    }
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let record = |e: Error| {
        let mut slot = failure.borrow_mut();
        if slot.is_none() {
            *slot = Some(e);
        }
    };
    let coarse = 1e-3f64.max(tol);
    let mass = integrate_with_floor(
        |t1| match integrate_with_floor(|t2| f(t1, t2), c2, coarse, 0.0) {
            Ok((_, l1)) => Complex64::new(l1, 0.0),
            Err(e) => {
                record(e);
                ZERO
            }
        },
        c1,
        coarse,
        0.0,
    );
    if let Some(e) = failure.borrow_mut().take() {
        return Err(e);
    }
    let mass = mass?.0.value.re;
    let floor = 0.01 * tol * mass;
    let inner_err = RefCell::new(0.0f64);
    let inner_panels = RefCell::new(0usize);
    let outer = integrate_with_floor(
        |t1| {
            if failure.borrow().is_some() {
                return ZERO;
            }
            match integrate_with_floor(|t2| f(t1, t2), c2, 0.1 * tol, 0.1 * floor) {
                Ok((r, _)) => {
                    let mut e = inner_err.borrow_mut();
                    *e = e.max(r.err_estimate);
                    *inner_panels.borrow_mut() += r.panels_used;
                    r.value
                }
                Err(e) => {
                    record(e);
                    ZERO
                }
            }
        },
        c1,
        tol,
        floor,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let (outer, _) = outer?;
    Ok(QuadResult {
        value: outer.value,
        err_estimate: outer.err_estimate + inner_err.into_inner(),
        panels_used: outer.panels_used + inner_panels.into_inner(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cx::c;

    #[test]
    fn gaussian_on_real_line() {
        let r = integrate_decaying(|x| (-x * x).exp(), &Contour::real_line(), 1e-12).unwrap();
        assert!((r.value - PI.sqrt()).norm() < 1e-12);
        assert!(r.err_estimate >= 0.0 && r.panels_used >= 1);
    }

    #[test]
    fn lorentzian_needs_long_tails() {
        let r = integrate_decaying(|x| 1.0 / (x * x + 1.0), &Contour::real_line(), 1e-10).unwrap();
        assert!((r.value - PI).norm() < 1e-9, "{}", r.value);
    }

    #[test]
    fn detour_picks_up_half_residue() {
        // Odd regular part cancels; the half circle above the pole gives -iπ.
        let r = integrate_decaying(|t| (-t * t).exp() / t, &Contour::detour(0.5), 1e-12).unwrap();
        assert!((r.value - c(0.0, -PI)).norm() < 1e-11, "{}", r.value);
    }

    #[test]
    fn detour_agrees_with_small_radius_limit() {
        let f = |t: Complex64| (-t * t).exp() * (1.0 + t) / t;
        let big = integrate_decaying(f, &Contour::detour(0.9), 1e-12).unwrap();
        let small = integrate_decaying(f, &Contour::detour(0.05), 1e-12).unwrap();
        assert!((big.value - small.value).norm() < 1e-10);
    }

    #[test]
    fn wedge_matches_shifted_line_for_entire_integrand() {
        let f = |t: Complex64| (-t * t).exp() * (0.3 * t).cos();
        let line = integrate_decaying(f, &Contour::real_line(), 1e-12).unwrap();
        let wedge = integrate_decaying(f, &Contour::wedge(0.2, 0.3, 0.2), 1e-12).unwrap();
        assert!((line.value - wedge.value).norm() < 1e-11);
    }

    #[test]
    fn two_dimensional_gaussian() {
        let r = integrate_2d_decaying(
            |x, y| (-x * x - y * y).exp(),
            &Contour::real_line(),
            &Contour::real_line(),
            1e-10,
        )
        .unwrap();
        assert!((r.value - PI).norm() < 1e-9);
    }

    #[test]
    fn two_dimensional_odd_integrand_vanishes() {
        let r = integrate_2d_decaying(
            |x, y| (-x * x - y * y).exp() * x * y,
            &Contour::real_line(),
            &Contour::real_line(),
            1e-10,
        )
        .unwrap();
        assert!(r.value.norm() < 1e-10);
    }

    #[test]
    fn two_dimensional_agrees_with_iterated_one_dimensional() {
        let f = |x: Complex64, y: Complex64| (-(x * x + y * y)).exp() * (x * y).cos();
        let two = integrate_2d_decaying(f, &Contour::real_line(), &Contour::real_line(), 1e-10).unwrap();
        let xs: Vec<f64> = (0..=400).map(|k| -10.0 + 0.05 * k as f64).collect();
        // Independent oracle: composite Simpson in x of the 1-d inner integral.
        let inner = |x: f64| {
            integrate_decaying(|y| f(c(x, 0.0), y), &Contour::real_line(), 1e-12)
                .unwrap()
                .value
        };
        let mut s = ZERO;
        for (k, x) in xs.iter().enumerate() {
            let w = if k == 0 || k == xs.len() - 1 {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            s += inner(*x) * w;
        }
        s *= 0.05 / 3.0;
        assert!((two.value - s).norm() < 1e-8, "{} vs {}", two.value, s);
    }

    #[test]
    fn invalid_tolerance_is_rejected() {
        assert!(integrate_decaying(|x| x, &Contour::real_line(), 0.0).is_err());
    }

    #[test]
    fn clearance_violation_is_a_domain_error() {
        assert!(matches!(Contour::detour(2.0).validate(1.0), Err(Error::Domain(_))));
        assert!(Contour::shifted(0.5).validate(1.0).is_ok());
    }

    #[test]
    fn non_decaying_integrand_fails() {
        let r = integrate_decaying(|_| c(1.0, 0.0), &Contour::real_line(), 1e-8);
        assert!(matches!(r, Err(Error::NonConvergence(_))));
    }
}
