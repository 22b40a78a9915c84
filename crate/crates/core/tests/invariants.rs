use proptest::prelude::*;
use satprec_core::optimize::{equal_precision_fock_kappa, optimal_kappa};
use satprec_core::{
    fisher_coherent, fisher_fock, fisher_squeezed, infer_absorption, intensity_profile, lambert_w0,
    qfi_bound, quantum_advantage, transmission, wright_omega, SampleSpec,
};

proptest! {
    #[test]
    fn omega_solves_its_equation(x in -700.0f64..700.0) {
        let w = wright_omega(x).unwrap();
        prop_assert!(w > 0.0);
        let r = (w + w.ln() - x).abs();
        prop_assert!(r <= 1e-13 * x.abs().max(1.0), "x={} r={}", x, r);
    }

    #[test]
    fn omega_agrees_with_lambert(x in -30.0f64..30.0) {
        let w = wright_omega(x).unwrap();
        let l = lambert_w0(x.exp()).unwrap();
        prop_assert!((w - l).abs() <= 1e-13 * w);
    }

    #[test]
    fn omega_is_increasing(x in -50.0f64..50.0, dx in 1e-6f64..1.0) {
        prop_assert!(wright_omega(x + dx).unwrap() > wright_omega(x).unwrap());
    }

    #[test]
    fn transmission_bounds_and_monotonicity(k in 1e-6f64..1e3, ad in 0.0f64..20.0) {
        let e = transmission(k, ad).unwrap();
        prop_assert!(e > 0.0 && e <= 1.0);
        prop_assert!(e >= (-ad).exp() * (1.0 - 1e-12));
        prop_assert!(transmission(k * 1.5, ad).unwrap() >= e);
        prop_assert!(transmission(k, ad + 0.1).unwrap() <= e);
    }

    #[test]
    fn inversion_round_trip(k in 1e-4f64..50.0, a in 0.01f64..5.0, l in 0.1f64..3.0) {
        let e = transmission(k, a * l).unwrap();
        prop_assume!(e < 1.0 - 1e-9);
        let back = infer_absorption(e, k, l).unwrap();
        prop_assert!((back - a).abs() <= 1e-9 * a.max(1.0), "{} vs {}", back, a);
    }

    #[test]
    fn fisher_ordering(k in 1e-3f64..100.0, a in 0.01f64..5.0, l in 0.1f64..3.0, r in 0.0f64..20.0) {
        let s = SampleSpec::dimensionless(a, l).unwrap();
        let fc = fisher_coherent(&s, k).unwrap();
        let q = qfi_bound(&s, k).unwrap().to_f64();
        let fs = fisher_squeezed(&s, k, r).unwrap();
        let ff = fisher_fock(&s, k).unwrap().to_f64();
        prop_assert!(fc <= fs * (1.0 + 1e-12));
        prop_assert!(fs <= q * (1.0 + 1e-12));
        prop_assert!((ff - q).abs() <= 1e-10 * q);
        let adv = quantum_advantage(&s, k).unwrap().to_f64();
        prop_assert!(adv >= 1.0);
        prop_assert!((q / fc - adv).abs() <= 1e-9 * adv);
    }

    #[test]
    fn closed_form_optimum_beats_neighbours(ad in 0.01f64..25.0, d in 1e-3f64..0.5) {
        let s = SampleSpec::dimensionless(ad, 1.0).unwrap();
        let k = optimal_kappa(ad).unwrap().kappa;
        let f = fisher_coherent(&s, k).unwrap();
        prop_assert!(f >= fisher_coherent(&s, k * (1.0 + d)).unwrap());
        prop_assert!(f >= fisher_coherent(&s, k * (1.0 - d)).unwrap());
    }

    #[test]
    fn profile_decreases(k in 1e-3f64..100.0, a in 0.01f64..5.0, l in 0.1f64..3.0) {
        let z: Vec<f64> = (0..=20).map(|i| l * i as f64 / 20.0).collect();
        let p = intensity_profile(k, a, l, &z).unwrap();
        prop_assert_eq!(p[0], 1.0);
        prop_assert!(p.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn fock_needs_less_power(ad in 0.01f64..5.0, frac in 0.05f64..1.0) {
        let s = SampleSpec::dimensionless(ad, 1.0).unwrap();
        let kc = frac * optimal_kappa(ad).unwrap().kappa;
        let r = equal_precision_fock_kappa(kc, &s).unwrap();
        prop_assert!(r.kappa_fock <= kc);
        prop_assert!(r.reduction_db <= 0.0);
        prop_assert!(r.residual <= 1e-9);
    }
}
