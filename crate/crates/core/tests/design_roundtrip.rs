//! Designed drivers reproduce their target marginals, by transform and by simulation.

use qclock::bdlp::{self, preset_l, Preset, TargetLaw};
use qclock::clock::{ClockSpec, SimSettings};
use qclock::levy::{clock_psi, LaplaceExponent};
use qclock::mc::par_draws;
use qclock::pricing::{black_scholes, weighted_bs_price, McOptions, PricingInput};
use qclock::verify::{lt_match_values, DEFAULT_OMEGAS};
use qclock::{Law, QuantileFunction};
use rand::RngCore;

#[test]
fn designed_gamma_clock_matches_by_transform() {
    for delta in [0.5, 1.0, 2.5] {
        let target = TargetLaw::gamma(0.9).unwrap();
        let d = bdlp::driving_l(&target, delta, &Law::Point(1.0)).unwrap();
        let q = QuantileFunction::power(delta).unwrap();
        for w in [0.1, 1.0, 7.0] {
            let a = clock_psi(&q, &d.l_spec, 1.0, w).unwrap();
            let b = target.psi(w).unwrap();
            assert!((a - b).abs() < 1e-6 * b, "delta {delta} omega {w}: {a} vs {b}");
        }
    }
}

#[test]
fn designed_gamma_clock_matches_by_simulation() {
    let target = TargetLaw::gamma(1.2).unwrap();
    let d = bdlp::driving_l(&target, 2.0, &Law::Point(1.0)).unwrap();
    let clock = ClockSpec::new(QuantileFunction::power(2.0).unwrap(), d.l_spec);
    let xs = par_draws(404, 20_000, |r| clock.sample_value(1.0, r)).unwrap();
    let analytic: Vec<f64> = DEFAULT_OMEGAS.iter().map(|&w| (-target.psi(w).unwrap()).exp()).collect();
    let rep = lt_match_values(&xs, &analytic, &DEFAULT_OMEGAS, 0.03).unwrap();
    assert!(rep.pass, "{rep:?}");
}

#[test]
fn nig_preset_matches_tilted_stable() {
    let alpha = 0.5;
    let d = preset_l(&Preset::Nig { alpha }, 1.0, &Law::Point(1.0)).unwrap();
    for w in [0.2, 1.0, 5.0] {
        let a = clock_psi(&QuantileFunction::uniform(), &d.l_spec, 1.0, w).unwrap();
        let b = (1.0 + w).powf(alpha) - 1.0;
        assert!((a - b).abs() < 1e-6 * b, "{a} vs {b}");
    }
}

#[test]
fn weighted_bs_with_a_designed_clock_is_close_to_bs_at_the_mean() {
    // T(1) / 50 has mean 1 and sd 0.14; Jensen puts the ATM mixture price slightly below BS
    let target = TargetLaw::gamma(50.0).unwrap();
    let d = bdlp::driving_l(&target, 1.0, &Law::Point(1.0)).unwrap();
    let mut clock = ClockSpec::new(QuantileFunction::uniform(), d.l_spec);
    clock.settings = SimSettings::with_trunc(1e-5);
    let input = PricingInput::new(100.0, 100.0, 0.0, 0.2, 1.0).unwrap();
    let draw = |r: &mut dyn RngCore| clock.sample_value(1.0, r).map(|t| t / 50.0);
    let mc = weighted_bs_price(&draw, &input, 20_000, 77, McOptions { antithetic: true }).unwrap();
    let bs = black_scholes(&input);
    assert!((mc.price - bs).abs() < 0.1, "{mc:?} vs {bs}");
    assert!(mc.price <= bs + 3.0 * mc.se);
}
