//! Property checks across modules.

use proptest::prelude::*;
use qclock::clock::{clock_path, clock_value, sample_jumps, SimSettings};
use qclock::levy::{psi_eval, LaplaceExponent, SubordinatorSpec};
use qclock::mc::{par_draws, stream};
use qclock::pricing::{black_scholes, de_cdf, DEParams, PricingInput};
use qclock::QuantileFunction;
use rand::Rng;

fn drivers() -> Vec<SubordinatorSpec> {
    vec![
        SubordinatorSpec::gamma(1.3),
        SubordinatorSpec::tilted_stable(0.4),
        SubordinatorSpec::GeneralizedGamma { c: 0.7, alpha: 0.6, b: 2.0 },
    ]
}

fn kernels() -> Vec<QuantileFunction> {
    vec![QuantileFunction::uniform(), QuantileFunction::arcsine(), QuantileFunction::power(0.4).unwrap(), QuantileFunction::power(3.0).unwrap()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn de_cdf_is_a_distribution(m in 0.01f64..5.0, mu in -4.0f64..4.0, a in -30.0f64..30.0, b in -30.0f64..30.0) {
        let de = DEParams::new(m, mu).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (fl, fh) = (de_cdf(lo, &de), de_cdf(hi, &de));
        prop_assert!((0.0..=1.0).contains(&fl) && (0.0..=1.0).contains(&fh));
        prop_assert!(fl <= fh + 1e-15);
        prop_assert!((de.c() + DEParams::new(m, -mu).unwrap().c() - 1.0).abs() < 1e-12);
        // the mass below zero is c
        prop_assert!((de_cdf(0.0, &de) - de.c()).abs() < 1e-12);
    }

    #[test]
    fn black_scholes_bounds_and_monotonicity(
        s0 in 1.0f64..200.0, k in 0.0f64..300.0, r in -0.02f64..0.1, sigma in 0.01f64..1.5, tau in 0.05f64..5.0, dk in 0.1f64..20.0, ds in 0.01f64..0.5,
    ) {
        let c = black_scholes(&PricingInput::new(s0, k, r, sigma, tau).unwrap());
        let intrinsic = (s0 - k * (-r * tau).exp()).max(0.0);
        prop_assert!(c >= intrinsic - 1e-9 * s0 && c <= s0 * (1.0 + 1e-12));
        let c_k = black_scholes(&PricingInput::new(s0, k + dk, r, sigma, tau).unwrap());
        prop_assert!(c_k <= c + 1e-12 * s0);
        let c_s = black_scholes(&PricingInput::new(s0, k, r, sigma + ds, tau).unwrap());
        prop_assert!(c_s >= c - 1e-12 * s0);
    }

    #[test]
    fn clock_paths_are_nondecreasing(seed in any::<u64>(), d in 0usize..3, q in 0usize..4) {
        let spec = &drivers()[d];
        let mut rng = stream(seed, 0);
        let skel = sample_jumps(spec, 2.0, &SimSettings::with_trunc(1e-5), &mut rng).unwrap();
        let grid: Vec<f64> = (1..=40).map(|i| 0.05 * i as f64).collect();
        let path = clock_path(&kernels()[q], &skel, &grid).unwrap();
        prop_assert!(path.values.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        // Q <= 1 on [0, 1], so the clock never exceeds the driver
        for (&t, &v) in path.times.iter().zip(&path.values) {
            prop_assert!(v <= skel.level(t) * (1.0 + 1e-12) + 1e-300);
        }
    }

    #[test]
    fn constant_one_kernel_returns_the_driver(seed in any::<u64>(), t in 0.05f64..2.0) {
        let mut rng = stream(seed, 0);
        let skel = sample_jumps(&SubordinatorSpec::gamma(0.8), 2.0, &SimSettings::with_trunc(1e-6), &mut rng).unwrap();
        let q = QuantileFunction::constant(1.0).unwrap();
        let v = clock_value(&q, &skel, t).unwrap();
        prop_assert!((v - skel.level(t)).abs() <= 1e-12 * skel.level(t).max(1.0));
    }

    #[test]
    fn exponents_are_bernstein_like(w in 0.01f64..20.0, h in 0.01f64..5.0, d in 0usize..3) {
        // psi(0) = 0, increasing and concave
        let spec = &drivers()[d];
        let (a, b, c) = (psi_eval(spec, w).unwrap(), psi_eval(spec, w + h).unwrap(), psi_eval(spec, w + 2.0 * h).unwrap());
        prop_assert!(a > 0.0 && b >= a);
        prop_assert!(b - a >= c - b - 1e-9 * c);
        prop_assert_eq!(spec.psi(0.0).unwrap(), 0.0);
    }

    #[test]
    fn draws_do_not_depend_on_order(seed in any::<u64>()) {
        let a = par_draws(seed, 64, |r| Ok(r.random::<u64>())).unwrap();
        let b: Vec<u64> = (0..64).map(|i| stream(seed, i).random::<u64>()).collect();
        prop_assert_eq!(a, b);
    }
}
