use std::f64::consts::PI;

use proptest::prelude::*;
use wga_core::coherent::{coherent_coeffs, overlap_closed, overlap_sum, CoherentLabel};
use wga_core::lattice::{propagate_analytic, propagator_matrix, AmplitudeVector, TruncationWindow};
use wga_core::quadrature::QuadratureSpec;
use wga_core::resolution::{
    cartesian_roi_cross_overlap, convolution_identity_check, max_admissible_cutoff, naive_diag_closed, polar_kernel,
    polar_roi_element, CartesianWeights, KernelPair,
};
use wga_core::specfun::{bessel_j, bessel_j_band, KernelOrder};

fn config() -> ProptestConfig {
    ProptestConfig { cases: 64, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn propagation_preserves_norm(z in -6.0f64..6.0, theta in 0.0f64..PI, k in -5i64..=5) {
        let w = TruncationWindow::new(80).unwrap();
        let e = AmplitudeVector::basis(w, k).unwrap();
        let out = propagate_analytic(&e, z, theta).unwrap();
        prop_assert!((out.state.norm() - 1.0).abs() < 1e-12);
        prop_assert!(!out.edge_warning);
    }

    #[test]
    fn propagators_compose(z1 in -2.0f64..2.0, z2 in -2.0f64..2.0, theta in 0.0f64..PI) {
        let w = TruncationWindow::new(48).unwrap();
        let a = propagator_matrix(w, z1, theta).unwrap();
        let b = propagator_matrix(w, z2, theta).unwrap();
        let c = propagator_matrix(w, z1 + z2, theta).unwrap();
        prop_assert!(a.matmul(&b).unwrap().max_abs_diff_within(&c, 12) < 1e-12);
    }

    #[test]
    fn coherent_states_are_normalized(r in 0.0f64..10.0, theta in -10.0f64..10.0) {
        let a = CoherentLabel::new(r, theta).unwrap();
        let v = coherent_coeffs(a, TruncationWindow::for_argument(2.0 * r)).unwrap();
        prop_assert!((v.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn overlap_series_matches_closed_form(r1 in 0.0f64..5.0, t1 in 0.0f64..6.3, r2 in 0.0f64..5.0, t2 in 0.0f64..6.3) {
        let a = CoherentLabel::new(r1, t1).unwrap();
        let b = CoherentLabel::new(r2, t2).unwrap();
        let s = overlap_sum(a, b, TruncationWindow::for_argument(10.0)).unwrap();
        prop_assert!((s.re - overlap_closed(a, b)).abs() < 1e-10);
        prop_assert!(s.im.abs() < 1e-12);
        prop_assert_eq!(overlap_closed(a, b), overlap_closed(b, a));
    }

    #[test]
    fn bessel_three_term_recurrence(n in 1i32..40, x in 0.1f64..60.0) {
        let l = bessel_j(n - 1, x).unwrap() + bessel_j(n + 1, x).unwrap();
        let r = 2.0 * n as f64 / x * bessel_j(n, x).unwrap();
        prop_assert!((l - r).abs() < 1e-13 * (1.0 + r.abs()));
    }

    #[test]
    fn polar_resolution_is_exact(r0 in 0.05f64..1.15, cutoff in 1usize..=12) {
        let nk = cutoff.min(max_admissible_cutoff(r0).unwrap());
        let k = polar_kernel(r0, nk).unwrap();
        for n in -(nk as i64)..=nk as i64 {
            prop_assert!((polar_roi_element(n, n, &k).unwrap().re - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn polar_kernel_never_overflows(r0 in 0.01f64..1.2) {
        let max = max_admissible_cutoff(r0).unwrap();
        let k = polar_kernel(r0, max).unwrap();
        for n in 0..=max as i64 {
            prop_assert!(k.coefficient(n).unwrap().is_finite());
        }
        let band = bessel_j_band(max + 1, 2.0 * r0).unwrap();
        prop_assert!(1.0 / (band[max + 1] * band[max + 1]) >= 1e300);
    }

    #[test]
    fn convolution_identity_holds(a in 0i32..=3, b in 0i32..=3, x in -5.0f64..5.0, xp in -5.0f64..5.0, s in 0.5f64..3.0) {
        prop_assume!(a + b > 0);
        let pair = KernelPair::new(KernelOrder::from_twice(a).unwrap(), KernelOrder::from_twice(b).unwrap(), s).unwrap();
        let r = convolution_identity_check(&pair, x, xp).unwrap();
        prop_assert!(r.abs_diff < 1e-8);
    }

    #[test]
    fn naive_diagonal_depends_on_n(lambda in 0.05f64..0.95) {
        let a = naive_diag_closed(0, lambda).unwrap();
        let b = naive_diag_closed(1, lambda).unwrap();
        prop_assert!((a - b).abs() / a > 0.01);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn cartesian_mixed_overlap_vanishes(x in -3.0f64..3.0, xp in -3.0f64..3.0, nodes in 16usize..80) {
        let q = QuadratureSpec::gauss(nodes, 1);
        let c = cartesian_roi_cross_overlap(x, xp, &CartesianWeights::reference(), &q).unwrap();
        prop_assert!(c.mixed.abs() <= 1e-10);
    }
}
