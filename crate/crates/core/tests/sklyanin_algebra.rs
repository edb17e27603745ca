use std::f64::consts::PI;

use hmd_core::cx::c;
use hmd_core::error::Error;
use hmd_core::funspace::SampleBox;
use hmd_core::hypgamma::ModularParam;
use hmd_core::sklyanin::{
    casimirs, check_algebra, check_cross_relations, finite_dim_detect, generators, has_verma_support, span_test,
    verma_vectors, Half, RepLabel,
};
use num_complex::Complex64;
use proptest::prelude::*;

#[test]
fn tilde_casimirs_use_the_inverse_period() {
    let p = ModularParam::real(0.8).unwrap();
    let pts = SampleBox::default().points(&p).unwrap();
    let g = c(0.37, 0.05);
    let gs = generators(RepLabel::generic(g), &p, Half::Tilde).unwrap();
    let cas = casimirs(&gs, &pts, 1e-10).unwrap();
    let x = p.b_inv();
    let kappa = PI * x * x;
    assert!((cas.k0_expected - (Complex64::i() * kappa).exp()).norm() < 1e-15);
    let k1 = (2.0 * PI * x * g).cos() / (2.0 * kappa.sin() * kappa.sin());
    assert!((cas.k1_expected - k1).norm() < 1e-12);
}

#[test]
fn verma_support_up_to_eight() {
    let p = ModularParam::real(0.8).unwrap();
    let vs = verma_vectors(c(0.33, 0.0), &p, 8).unwrap();
    for (k, v) in vs.iter().enumerate() {
        assert!(has_verma_support(v, k), "k = {k}");
    }
}

#[test]
fn truncation_at_half_integer_multiples_of_b() {
    let p = ModularParam::real(0.8).unwrap();
    for n in 0..=4 {
        let rep = finite_dim_detect(n, &p, 1e-8).unwrap();
        assert!(rep.is_invariant, "n = {n}");
        // the whole vector cancels for n = 0, 1; C acts non-trivially otherwise
        assert_eq!(rep.vanishes, n <= 1, "n = {n}");
        assert_eq!(rep.c_nonzero(), n >= 2, "n = {n}");
    }
    let generic = span_test(c(0.33, 0.0), 3, &p, 1e-8).unwrap();
    assert!(!generic.is_invariant);
}

#[test]
fn integer_b_squared_is_rejected() {
    let p = ModularParam::real(1.0).unwrap();
    let r = generators(RepLabel::generic(c(0.3, 0.0)), &p, Half::Plain);
    assert!(matches!(r, Err(Error::DegenerateParam(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn relations_hold_for_random_labels(g_re in 0.05f64..0.9, g_im in -0.2f64..0.2, b in 0.6f64..0.95, seed in 0u64..1000) {
        let p = ModularParam::real(b).unwrap();
        let pts = SampleBox::default().with_seed(seed).points(&p).unwrap();
        let g = c(g_re, g_im);
        let plain = generators(RepLabel::generic(g), &p, Half::Plain).unwrap();
        let tilde = generators(RepLabel::generic(g), &p, Half::Tilde).unwrap();
        prop_assert!(check_algebra(&plain, &pts, 1e-12).unwrap() < 1e-10);
        prop_assert!(check_algebra(&tilde, &pts, 1e-12).unwrap() < 1e-10);
        prop_assert!(check_cross_relations(&plain, &tilde, &pts, 1e-12).unwrap() < 1e-10);
        prop_assert!(casimirs(&plain, &pts, 1e-10).is_ok());
    }
}
