use hmd_core::cx::c;
use hmd_core::error::Error;
use hmd_core::funspace::SampleBox;
use hmd_core::hypgamma::ModularParam;
use hmd_core::intertwiner::{
    check_contiguous_factorized, check_intertwining, check_inversion, gaussian, kernel_basis, m_apply_numeric,
    numeric_points, pinch_label,
};
use hmd_core::sklyanin::Half;
use proptest::prelude::*;

#[test]
fn intertwining_at_low_lattice_labels() {
    let p = ModularParam::real(0.8).unwrap();
    let pts = SampleBox::default().points(&p).unwrap();
    for (n, m) in [(1, 0), (0, 1), (2, 0), (1, 1)] {
        let r = check_intertwining(n, m, &p, &pts).unwrap();
        assert!(r < 1e-9, "({n},{m}): {r}");
    }
}

#[test]
fn contiguous_relations_for_factorized_operators() {
    let p = ModularParam::new(c(0.75, 0.2)).unwrap();
    let pts = SampleBox::default().points(&p).unwrap();
    for half in [Half::Plain, Half::Tilde] {
        assert!(check_contiguous_factorized(1, 1, half, &p, &pts).unwrap() < 1e-10);
    }
}

#[test]
fn kernels_contain_the_finite_representations() {
    let p = ModularParam::real(0.8).unwrap();
    let xs = [c(0.1, 0.02), c(-0.23, 0.05)];
    for (n, m) in [(1, 0), (0, 1), (2, 1)] {
        let basis = kernel_basis(n, m, &p, &xs, 1e-8).unwrap();
        assert_eq!(basis.len(), ((n + 1) * (m + 1)) as usize);
    }
}

#[test]
fn m_at_zero_is_the_identity() {
    let p = ModularParam::real(0.8).unwrap();
    let z = numeric_points()[0];
    let v = m_apply_numeric(c(0.0, 0.0), &gaussian, z, &p, 1e-9).unwrap();
    assert!((v - gaussian(z)).norm() < 1e-7);
}

#[test]
fn inversion_reports_lattice_points() {
    let p = ModularParam::real(0.8).unwrap();
    let g = pinch_label(1, 0, &p);
    let r = check_inversion(g, &gaussian, &numeric_points(), &p, 1e-5);
    assert_eq!(r, Err(Error::ExpectedViolation { n: 1, m: 0 }));
    let r = check_inversion(-pinch_label(0, 2, &p), &gaussian, &numeric_points(), &p, 1e-5);
    assert_eq!(r, Err(Error::ExpectedViolation { n: 0, m: 2 }));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(5))]

    #[test]
    fn intertwining_for_random_periods(b in 0.6f64..0.95, b_im in -0.1f64..0.1) {
        let p = ModularParam::new(c(b, b_im)).unwrap();
        let pts = SampleBox::default().points(&p).unwrap();
        prop_assert!(check_intertwining(1, 0, &p, &pts).unwrap() < 1e-9);
    }
}
