//! European calls under time-changed Brownian motion.
//!
//! The call price given a clock value `T` is Black-Scholes with total
//! variance `sigma^2 T`, so pricing under a random clock is a mixture of
//! Black-Scholes prices. With the exponential time change the mixture
//! collapses to a double exponential kernel in `M`.

use rand::RngCore;
use rand_distr::{Distribution, Gamma};
use serde::Serialize;
use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::mc::{mean_se, par_draws, Antithetic};

/// A draw from some positive law, fed by an arbitrary generator.
pub type DrawFn<'a> = dyn Fn(&mut dyn RngCore) -> Result<f64> + Sync + 'a;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PricingInput {
    pub s0: f64,
    pub k: f64,
    pub r: f64,
    pub sigma: f64,
    pub tau: f64,
    /// Rate of the exponential time change; only the double exponential route uses it.
    pub theta: Option<f64>,
}

impl PricingInput {
    pub fn new(s0: f64, k: f64, r: f64, sigma: f64, tau: f64) -> Result<Self> {
        let p = PricingInput { s0, k, r, sigma, tau, theta: None };
        p.validate()?;
        Ok(p)
    }

    pub fn with_theta(mut self, theta: f64) -> Result<Self> {
        self.theta = Some(theta);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        const OP: &str = "PricingInput";
        let pos = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::domain(OP, format!("{name} = {v} must be positive")))
            }
        };
        pos("S0", self.s0)?;
        pos("tau", self.tau)?;
        if !(self.k >= 0.0 && self.k.is_finite()) {
            return Err(Error::domain(OP, format!("K = {} must be nonnegative", self.k)));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::domain(OP, format!("sigma = {} must be nonnegative", self.sigma)));
        }
        if !self.r.is_finite() {
            return Err(Error::domain(OP, "r must be finite"));
        }
        if let Some(t) = self.theta {
            pos("theta", t)?;
        }
        Ok(())
    }

    fn discounted_strike(&self) -> f64 {
        self.k * (-self.r * self.tau).exp()
    }

    /// `(1 - e^(-tau)) / theta`, the clock time that the exponential change maps `tau` to.
    pub fn tau_star(&self) -> Result<f64> {
        let theta = self.theta.ok_or_else(|| Error::invalid("tau_star", "theta is required for the double exponential route"))?;
        Ok(-f64::exp_m1(-self.tau) / theta)
    }

    /// `p = 1 - e^(-tau)`.
    pub fn p(&self) -> f64 {
        -f64::exp_m1(-self.tau)
    }
}

/// Standard normal cdf. `libm::erfc` is the fdlibm rational approximation, accurate to under 1 ulp.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Black-Scholes call with total variance `v = sigma^2 tau`.
pub fn bs_total_variance(input: &PricingInput, v: f64) -> f64 {
    let df_k = input.discounted_strike();
    if input.k == 0.0 {
        return input.s0;
    }
    if v <= 0.0 {
        return (input.s0 - df_k).max(0.0);
    }
    let sd = v.sqrt();
    let d1 = ((input.s0 / input.k).ln() + input.r * input.tau + 0.5 * v) / sd;
    let d2 = d1 - sd;
    (input.s0 * norm_cdf(d1) - df_k * norm_cdf(d2)).max(0.0)
}

pub fn black_scholes(input: &PricingInput) -> f64 {
    bs_total_variance(input, input.sigma * input.sigma * input.tau)
}

/// Monte Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McPrice {
    pub price: f64,
    pub se: f64,
    pub n: usize,
    /// Draws that were dropped (double exponential route only).
    pub skipped: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct McOptions {
    /// Average each draw with its antithetic twin.
    pub antithetic: bool,
}

fn mc_estimate(seed: u64, n: usize, opts: McOptions, f: &(dyn Fn(&mut dyn RngCore) -> Result<Option<f64>> + Sync)) -> Result<McPrice> {
    let vals: Vec<Option<f64>> = if opts.antithetic {
        par_draws(seed, n, |rng| {
            let a = f(rng)?;
            let mut twin = Antithetic(crate::mc::stream(seed, rng.get_stream()));
            let b = f(&mut twin)?;
            Ok(match (a, b) {
                (Some(a), Some(b)) => Some(0.5 * (a + b)),
                _ => None,
            })
        })?
    } else {
        par_draws(seed, n, |rng| f(rng))?
    };
    let kept: Vec<f64> = vals.iter().flatten().copied().collect();
    let skipped = n - kept.len();
    let (price, se) = mean_se(&kept);
    Ok(McPrice { price, se: se.unwrap_or(f64::NAN), n, skipped })
}

fn check_n(op: &'static str, n: usize) -> Result<()> {
    if n < 1000 {
        return Err(Error::precondition(op, format!("n = {n} < 1000")));
    }
    Ok(())
}

/// `E B(sigma sqrt(T(tau) / tau), K, tau)` over `n` clock draws.
pub fn weighted_bs_price(clock: &DrawFn, input: &PricingInput, n: usize, seed: u64, opts: McOptions) -> Result<McPrice> {
    const OP: &str = "weighted_bs_price";
    input.validate()?;
    check_n(OP, n)?;
    let s2 = input.sigma * input.sigma;
    mc_estimate(seed, n, opts, &|rng| {
        let t = clock(rng)?;
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::invalid(OP, format!("invalid sampler: clock draw {t}")));
        }
        Ok(Some(bs_total_variance(input, s2 * t)))
    })
}

/// Price with a GGC clock `T(tau) = gamma_(theta tau) M`, where `m` draws the Dirichlet mean.
pub fn gamma_mixture_price(m: &DrawFn, theta_tau: f64, input: &PricingInput, n: usize, seed: u64) -> Result<McPrice> {
    let g = Gamma::new(theta_tau, 1.0).map_err(|e| Error::domain("gamma_mixture_price", e.to_string()))?;
    let clock = |rng: &mut dyn RngCore| -> Result<f64> {
        let gv: f64 = g.sample(rng);
        Ok(gv * m(rng)?)
    };
    weighted_bs_price(&clock, input, n, seed, McOptions::default())
}

/// Conditional law of `W_mu(gamma_1 m^2)`: a two-sided exponential law.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DEParams {
    pub m: f64,
    pub mu: f64,
}

impl DEParams {
    pub fn new(m: f64, mu: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite() && mu.is_finite()) {
            return Err(Error::domain("DEParams", format!("need m > 0 and finite mu, got ({m}, {mu})")));
        }
        Ok(DEParams { m, mu })
    }

    fn root(&self) -> f64 {
        (2.0 + self.mu * self.mu * self.m * self.m).sqrt()
    }

    /// Decay rate on the negative half line.
    pub fn phi(&self) -> f64 {
        self.root() / self.m + self.mu
    }

    pub fn b(&self) -> f64 {
        1.0 / (self.m * self.root())
    }

    /// Mass of the negative half line.
    pub fn c(&self) -> f64 {
        self.b() / self.phi()
    }

    fn flip(&self) -> DEParams {
        DEParams { m: self.m, mu: -self.mu }
    }

    pub fn density(&self, z: f64) -> f64 {
        if z <= 0.0 {
            self.b() * (z * self.phi()).exp()
        } else {
            self.b() * (-z * self.flip().phi()).exp()
        }
    }

    pub fn cdf(&self, z: f64) -> f64 {
        if z <= 0.0 {
            self.c() * (z * self.phi()).exp()
        } else {
            // c(mu) + c(-mu) = 1, and this form keeps the upper tail accurate
            let f = self.flip();
            (1.0 - f.c() * (-z * f.phi()).exp()).clamp(0.0, 1.0)
        }
    }
}

pub fn de_cdf(z: f64, de: &DEParams) -> f64 {
    de.cdf(z)
}

/// `S0 F_(-1/2)(z | y) - e^(-r tau) K F_(1/2)(z | y)` with `z = log(S0 / K) + r tau`.
pub fn de_kernel(input: &PricingInput, y: f64) -> Result<f64> {
    if input.k == 0.0 {
        return Ok(input.s0);
    }
    let z = (input.s0 / input.k).ln() + input.r * input.tau;
    let a = DEParams::new(y, -0.5)?.cdf(z);
    let b = DEParams::new(y, 0.5)?.cdf(z);
    Ok((input.s0 * a - input.discounted_strike() * b).max(0.0))
}

/// `E DE(sigma^2 M, K, tau)` over draws of `M = M_(1, tau*)`; `y = sigma sqrt(M)`.
/// Draws with `M <= 0` are skipped; more than 0.1% skipped is an error.
pub fn de_price(m: &DrawFn, input: &PricingInput, n: usize, seed: u64, opts: McOptions) -> Result<McPrice> {
    const OP: &str = "de_price";
    input.validate()?;
    check_n(OP, n)?;
    let out = mc_estimate(seed, n, opts, &|rng| {
        let mv = m(rng)?;
        if !mv.is_finite() || mv < 0.0 {
            return Err(Error::invalid(OP, format!("invalid sampler: M draw {mv}")));
        }
        let y = input.sigma * mv.sqrt();
        if y <= 0.0 {
            return Ok(None);
        }
        de_kernel(input, y).map(Some)
    })?;
    if out.skipped as f64 > 1e-3 * n as f64 {
        return Err(Error::invalid(OP, format!("{} of {n} draws had M = 0", out.skipped)));
    }
    Ok(out)
}

/// JSON record of a price.
#[derive(Clone, Debug, Serialize)]
pub struct PriceRecord {
    pub price: f64,
    pub se: Option<f64>,
    pub n: usize,
    pub seed: u64,
    pub model: String,
    pub params: serde_json::Value,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{integrate, integrate_to_inf, QuadTol};
    use rand::Rng;

    fn input(s0: f64, k: f64, r: f64, sigma: f64, tau: f64) -> PricingInput {
        PricingInput::new(s0, k, r, sigma, tau).unwrap()
    }

    #[test]
    fn normal_cdf_reference() {
        let table = [
            (-8.0, 6.2209605742717841235e-16),
            (-5.0, 2.8665157187919391167e-7),
            (-2.5, 0.006209665325776135167),
            (-1.0, 0.15865525393145705141),
            (-0.1, 0.46017216272297101633),
            (0.0, 0.5),
            (0.3, 0.61791142218895263307),
            (1.7, 0.95543453724145695634),
            (4.0, 0.99996832875816688008),
            (7.5, 0.99999999999996809108),
        ];
        for (x, want) in table {
            assert!((norm_cdf(x) - want).abs() < 1e-15, "x = {x}: {} vs {want}", norm_cdf(x));
        }
    }

    #[test]
    fn black_scholes_reference() {
        let table = [
            ((100.0, 100.0, 0.0, 0.2, 1.0), 7.9655674554057967338),
            ((100.0, 110.0, 0.05, 0.3, 0.5), 5.5870937856256305611),
            ((50.0, 40.0, 0.02, 0.6, 2.0), 20.962605801465098282),
            ((100.0, 150.0, 0.01, 0.1, 0.25), 2.8272080935712175127e-16),
            ((1.0, 1.0, 0.03, 1.5, 3.0), 0.81467056651474634099),
        ];
        for ((s, k, r, v, t), want) in table {
            assert!((black_scholes(&input(s, k, r, v, t)) - want).abs() < 1e-10, "{} vs {want}", black_scholes(&input(s, k, r, v, t)));
        }
    }

    #[test]
    fn black_scholes_limits() {
        let i = input(100.0, 90.0, 0.05, 0.0, 1.0);
        assert_eq!(black_scholes(&i), 100.0 - 90.0 * (-0.05f64).exp());
        assert!((black_scholes(&input(100.0, 90.0, 0.05, 1e-9, 1.0)) - black_scholes(&i)).abs() < 1e-9);
        assert_eq!(black_scholes(&input(100.0, 0.0, 0.05, 0.3, 1.0)), 100.0);
        assert!((black_scholes(&input(100.0, 1e-12, 0.05, 0.3, 1.0)) - 100.0).abs() < 1e-9);
        assert!(PricingInput::new(-1.0, 1.0, 0.0, 0.2, 1.0).is_err());
    }

    #[test]
    fn black_scholes_monotone_grid() {
        for i in 0..20 {
            let sigma = 0.02 + 0.05 * i as f64;
            let mut prev_tau = 0.0;
            for j in 0..20 {
                let tau = 0.05 + 0.25 * j as f64;
                let p = black_scholes(&input(100.0, 105.0, 0.03, sigma, tau));
                assert!(p >= prev_tau - 1e-12);
                prev_tau = p;
                let q = black_scholes(&input(100.0, 105.0, 0.03, sigma + 0.05, tau));
                assert!(q >= p - 1e-12);
            }
        }
    }

    #[test]
    fn degenerate_clocks() {
        let i = input(100.0, 95.0, 0.02, 0.25, 0.7);
        let at_tau = |_: &mut dyn RngCore| Ok(0.7);
        let p = weighted_bs_price(&at_tau, &i, 1000, 1, McOptions::default()).unwrap();
        assert!((p.price - black_scholes(&i)).abs() < 1e-12);
        assert!(p.se < 1e-12);
        let zero = |_: &mut dyn RngCore| Ok(0.0);
        let p = weighted_bs_price(&zero, &i, 1000, 1, McOptions::default()).unwrap();
        assert!((p.price - (100.0 - 95.0 * (-0.014f64).exp())).abs() < 1e-12);
        let bad = |_: &mut dyn RngCore| Ok(-1.0);
        assert!(weighted_bs_price(&bad, &i, 1000, 1, McOptions::default()).is_err());
        assert!(weighted_bs_price(&zero, &i, 999, 1, McOptions::default()).is_err());
    }

    #[test]
    fn weighted_price_within_quantile_envelope() {
        let i = input(100.0, 100.0, 0.01, 0.3, 1.0);
        let g = Gamma::new(1.0, 1.0).unwrap();
        let clock = |rng: &mut dyn RngCore| -> Result<f64> { Ok(g.sample(rng)) };
        let p = weighted_bs_price(&clock, &i, 20_000, 3, McOptions::default()).unwrap();
        let mut draws = par_draws(3, 20_000, |rng| clock(rng)).unwrap();
        draws.sort_by(f64::total_cmp);
        let lo = bs_total_variance(&i, 0.09 * draws[200]);
        let hi = bs_total_variance(&i, 0.09 * draws[19_800]);
        assert!(lo <= p.price && p.price <= hi);
        // antithetic switch gives a close estimate with smaller error
        let a = weighted_bs_price(&clock, &i, 20_000, 3, McOptions { antithetic: true }).unwrap();
        assert!((a.price - p.price).abs() < 4.0 * p.se);
        assert!(a.se < p.se);
    }

    #[test]
    fn gamma_mixture_matches_direct_gamma_clock() {
        // M = 1 so T = gamma(theta tau)
        let i = input(100.0, 100.0, 0.0, 0.2, 1.0);
        let one = |_: &mut dyn RngCore| Ok(1.0);
        let a = gamma_mixture_price(&one, 2.0, &i, 50_000, 7).unwrap();
        let g = Gamma::new(2.0, 1.0).unwrap();
        let clock = |rng: &mut dyn RngCore| -> Result<f64> { Ok(g.sample(rng)) };
        let b = weighted_bs_price(&clock, &i, 50_000, 8, McOptions::default()).unwrap();
        assert!((a.price - b.price).abs() < 3.0 * (a.se * a.se + b.se * b.se).sqrt());
    }

    #[test]
    fn de_params_identities() {
        for i in 0..10 {
            for j in 0..10 {
                let m = 0.05 * 1.8f64.powi(i);
                let mu = -3.0 + 6.0 * j as f64 / 9.0;
                let a = DEParams::new(m, mu).unwrap();
                let b = DEParams::new(m, -mu).unwrap();
                assert!((a.c() + b.c() - 1.0).abs() < 1e-12);
                assert!(a.phi() > 0.0);
            }
        }
        let d = DEParams::new(1.0, 0.0).unwrap();
        assert!((d.phi() - SQRT_2).abs() < 1e-15);
        assert!((d.c() - 0.5).abs() < 1e-15);
        // symmetric Laplace with scale 1/sqrt 2
        for z in [-2.0f64, -0.3, 0.0, 0.4, 3.0] {
            let want = if z <= 0.0 { 0.5 * (SQRT_2 * z).exp() } else { 1.0 - 0.5 * (-SQRT_2 * z).exp() };
            assert!((d.cdf(z) - want).abs() < 1e-15);
        }
    }

    #[test]
    fn de_cdf_is_a_cdf() {
        for (m, mu) in [(0.3, -0.5), (1.0, 0.5), (2.5, 1.7)] {
            let d = DEParams::new(m, mu).unwrap();
            let far = 60.0 / d.phi().min(d.flip().phi());
            assert!(d.cdf(-far) < 1e-12 && (1.0 - d.cdf(far)) < 1e-12);
            assert!((d.cdf(0.0) - d.c()).abs() < 1e-15);
            let mut prev = 0.0;
            for k in -100..=100 {
                let v = d.cdf(k as f64 * 0.1);
                assert!(v >= prev);
                prev = v;
            }
            let tol = QuadTol::new(1e-14, 1e-12);
            let left = integrate_to_inf("de", &|x: f64| d.density(-x), 0.0, tol).unwrap();
            let right = integrate_to_inf("de", &|x: f64| d.density(x), 0.0, tol).unwrap();
            assert!((left + right - 1.0).abs() < 1e-8, "{left} {right}");
            let part = integrate("de", &|x: f64| d.density(x), -1.0, 0.5, tol).unwrap();
            assert!((part - (d.cdf(0.5) - d.cdf(-1.0))).abs() < 1e-10);
        }
    }

    #[test]
    fn de_kernel_is_the_laplace_mixture_of_black_scholes() {
        // E B(variance y^2 gamma_1) = DE(y^2)
        let i = input(100.0, 104.0, 0.03, 1.0, 0.8);
        for y in [0.1, 0.35, 1.2] {
            let f = |g: f64| bs_total_variance(&i, y * y * g) * (-g).exp();
            let mix = integrate_to_inf("mix", &f, 0.0, QuadTol::new(1e-13, 1e-11)).unwrap();
            assert!((mix - de_kernel(&i, y).unwrap()).abs() < 1e-8, "y = {y}");
        }
    }

    #[test]
    fn de_kernel_limits() {
        let atm = input(100.0, 100.0 * (0.02f64 * 0.5).exp(), 0.02, 0.3, 0.5);
        let y = 0.4;
        let want = 100.0 * DEParams::new(y, -0.5).unwrap().c() - atm.discounted_strike() * DEParams::new(y, 0.5).unwrap().c();
        assert!((de_kernel(&atm, y).unwrap() - want).abs() < 1e-10);
        assert!((de_kernel(&input(100.0, 1e-10, 0.0, 0.3, 1.0), 0.3).unwrap() - 100.0).abs() < 1e-6);
        assert!(de_kernel(&input(100.0, 1e8, 0.0, 0.3, 1.0), 0.3).unwrap() < 1e-6);
    }

    #[test]
    fn de_price_degenerate_and_skips() {
        let i = input(100.0, 95.0, 0.01, 0.2, 1.0);
        let m0 = 0.7;
        let fixed = |_: &mut dyn RngCore| Ok(m0);
        let p = de_price(&fixed, &i, 1000, 2, McOptions::default()).unwrap();
        assert!((p.price - de_kernel(&i, 0.2 * m0.sqrt()).unwrap()).abs() < 1e-12);
        let zeros = |rng: &mut dyn RngCore| Ok(if rng.random::<f64>() < 0.01 { 0.0 } else { 1.0 });
        assert!(de_price(&zeros, &i, 10_000, 2, McOptions::default()).is_err());
        let rare = |rng: &mut dyn RngCore| Ok(if rng.random::<f64>() < 1e-4 { 0.0 } else { 1.0 });
        let p = de_price(&rare, &i, 10_000, 2, McOptions::default()).unwrap();
        assert!(p.skipped <= 10);
    }

    #[test]
    fn tau_star_needs_theta() {
        let i = input(1.0, 1.0, 0.0, 0.2, 1.0);
        assert!(i.tau_star().is_err());
        let i = i.with_theta(2.0).unwrap();
        assert!((i.tau_star().unwrap() - (1.0 - (-1.0f64).exp()) / 2.0).abs() < 1e-15);
    }
}
