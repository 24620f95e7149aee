//! Distributional checks of the Dirichlet-mean samplers.

use qclock::ggc::{double_cftp, occupation_density, DirichletMeanLaw, GgcSampler, RejectionSampler, SamplerPath};
use qclock::levy::{clock_psi, GgcSpec, SubordinatorSpec};
use qclock::mc::{par_draws, stream};
use qclock::numeric::{self, QuadTol};
use qclock::verify::{chi_square_gof, ks2, lt_match_values, DEFAULT_OMEGAS};
use qclock::{Law, QuantileFunction};
use rand::Rng;
use rand_distr::{Beta, Distribution, Exp1, Gamma};

const LEVEL: f64 = 1e-3;

fn gamma_draws(shape: f64, n: usize, seed: u64) -> Vec<f64> {
    let g = Gamma::new(shape, 1.0).unwrap();
    let mut rng = stream(seed, 1 << 40);
    (0..n).map(|_| g.sample(&mut rng)).collect()
}

#[test]
fn rejection_constant_r_is_arcsine() {
    let s = RejectionSampler::new(DirichletMeanLaw::new(0.5, Law::Point(1.0)).unwrap()).unwrap();
    let xs = par_draws(21, 100_000, |r| s.sample(r)).unwrap();
    let b = Beta::new(0.5, 0.5).unwrap();
    let mut rng = stream(22, 0);
    let ys: Vec<f64> = (0..100_000).map(|_| b.sample(&mut rng)).collect();
    let r = ks2(&xs, &ys).unwrap();
    assert!(r.p > LEVEL, "{r:?}");
}

#[test]
fn rejection_occupation_matches_closed_density() {
    let (alpha, p) = (0.5, 0.5);
    let s = RejectionSampler::new(DirichletMeanLaw::occupation(alpha, p).unwrap()).unwrap();
    let n = 100_000;
    let xs = par_draws(23, n, |r| s.sample(r)).unwrap();
    let bins = 50;
    let mut counts = vec![0u64; bins];
    for x in &xs {
        counts[((x * bins as f64) as usize).min(bins - 1)] += 1;
    }
    let probs: Vec<f64> = (0..bins)
        .map(|i| {
            let (a, b) = (i as f64 / bins as f64, (i + 1) as f64 / bins as f64);
            // the density has an integrable y^(p-1) singularity at 0
            let h = |y: f64| occupation_density(alpha, p, y) * y.powf(1.0 - p);
            let upto = |x: f64| numeric::integrate_origin_power("bin", &h, x, p, QuadTol::DEFAULT).unwrap();
            upto(b) - upto(a)
        })
        .collect();
    let r = chi_square_gof(&counts, &probs, 0).unwrap();
    assert!(r.p > LEVEL, "{r:?}");
}

#[test]
fn cftp_times_gamma_is_gamma_half() {
    let law = DirichletMeanLaw::new(0.5, Law::Point(1.0)).unwrap();
    let n = 50_000;
    let xs = par_draws(24, n, |r| {
        let m = double_cftp(&law, r)?;
        let e: f64 = Exp1.sample(r);
        Ok(m * e)
    })
    .unwrap();
    let r = ks2(&xs, &gamma_draws(0.5, n, 24)).unwrap();
    assert!(r.p > LEVEL, "{r:?}");
}

#[test]
fn cftp_agrees_with_rejection_for_uniform_r() {
    let law = DirichletMeanLaw::new(1.0, Law::uniform01()).unwrap();
    let n = 20_000;
    let a = par_draws(25, n, |r| double_cftp(&law, r)).unwrap();
    let s = RejectionSampler::new(law.clone()).unwrap();
    let b = par_draws(26, n, |r| s.sample(r)).unwrap();
    let r = ks2(&a, &b).unwrap();
    assert!(r.p > LEVEL, "{r:?}");
}

#[test]
fn cftp_output_is_a_fixed_point() {
    let law = DirichletMeanLaw::new(0.5, Law::Point(1.0)).unwrap();
    let n = 100_000;
    let m = par_draws(27, n, |r| double_cftp(&law, r)).unwrap();
    let mapped = par_draws(28, n, |r| {
        let m = double_cftp(&law, r)?;
        let u: f64 = r.random();
        Ok(u * m + (1.0 - u) * law.sample_d(r)?)
    })
    .unwrap();
    let r = ks2(&m, &mapped).unwrap();
    assert!(r.p > LEVEL, "{r:?}");
}

#[test]
fn cftp_matches_truncated_perpetuity() {
    // M_1 for R uniform: sum_k (1 - b_k) R_k prod_{j<k} b_j with b ~ beta(1, 1)
    let law = DirichletMeanLaw::new(1.0, Law::uniform01()).unwrap();
    let n = 100_000;
    let a = par_draws(29, n, |r| double_cftp(&law, r)).unwrap();
    let b = par_draws(30, n, |r| {
        let (mut acc, mut prod) = (0.0, 1.0);
        for _ in 0..60 {
            let beta: f64 = r.random();
            let x: f64 = r.random();
            acc += (1.0 - beta) * x * prod;
            prod *= beta;
        }
        Ok(acc)
    })
    .unwrap();
    let r = ks2(&a, &b).unwrap();
    assert!(r.p > LEVEL, "{r:?}");
}

#[test]
fn ggc_constant_r_is_gamma() {
    let g = GgcSpec::new(2.0, Law::Point(1.0)).unwrap();
    let s = GgcSampler::new(&g, 1.0, SamplerPath::Auto).unwrap();
    let xs = par_draws(31, 100_000, |r| s.sample(r)).unwrap();
    assert!(ks2(&xs, &gamma_draws(2.0, 100_000, 31)).unwrap().p > LEVEL);

    // the perfect sampler on the same law, one piece of mass 1/2 and two of 3/4
    for (theta, seed) in [(0.5, 32), (1.5, 33)] {
        let g = GgcSpec::new(theta, Law::Point(1.0)).unwrap();
        let s = GgcSampler::new(&g, 1.0, SamplerPath::Cftp).unwrap();
        let xs = par_draws(seed, 50_000, |r| s.sample(r)).unwrap();
        let r = ks2(&xs, &gamma_draws(theta, 50_000, seed)).unwrap();
        assert!(r.p > LEVEL, "theta {theta}: {r:?}");
    }
}

#[test]
fn segmentation_does_not_change_the_law() {
    let g = GgcSpec::new(1.0, Law::uniform01()).unwrap();
    let one = GgcSampler::with_pieces(&g, 1.0, 1, SamplerPath::Cftp).unwrap();
    let two = GgcSampler::with_pieces(&g, 1.0, 2, SamplerPath::Cftp).unwrap();
    let a = par_draws(34, 100_000, |r| one.sample(r)).unwrap();
    let b = par_draws(35, 100_000, |r| two.sample(r)).unwrap();
    let r = ks2(&a, &b).unwrap();
    assert!(r.p > LEVEL, "{r:?}");
}

#[test]
fn quantile_clock_marginal_is_ggc() {
    // T(t) with gamma(theta) driver and kernel Q is GGC(theta t, Q(U))
    let theta = 1.0;
    let t = 1.5;
    let q = QuantileFunction::arcsine();
    let g = GgcSpec::new(theta, Law::Quantile(q.clone())).unwrap();
    let s = GgcSampler::new(&g, t, SamplerPath::Auto).unwrap();
    let xs = par_draws(36, 50_000, |r| s.sample(r)).unwrap();
    let driver = SubordinatorSpec::gamma(theta);
    let analytic: Vec<f64> = DEFAULT_OMEGAS.iter().map(|&w| (-clock_psi(&q, &driver, t, w).unwrap()).exp()).collect();
    let rep = lt_match_values(&xs, &analytic, &DEFAULT_OMEGAS, 0.02).unwrap();
    assert!(rep.pass, "{rep:?}");
}

#[test]
fn series_path_for_unbounded_r_has_the_right_transform() {
    let g = GgcSpec::new(1.0, Law::exp1()).unwrap();
    let s = GgcSampler::new(&g, 1.0, SamplerPath::Auto).unwrap();
    assert_eq!(s.path(), SamplerPath::Series);
    let xs = par_draws(37, 20_000, |r| s.sample(r)).unwrap();
    let spec = SubordinatorSpec::Ggc(g.clone());
    let analytic: Vec<f64> = DEFAULT_OMEGAS.iter().map(|&w| (-qclock::levy::psi_eval(&spec, w).unwrap()).exp()).collect();
    let rep = lt_match_values(&xs, &analytic, &DEFAULT_OMEGAS, 0.02).unwrap();
    assert!(rep.pass, "{rep:?}");
}
