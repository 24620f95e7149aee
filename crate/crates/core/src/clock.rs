//! Simulation of quantile clocks `T(t) = sum_{s_i <= t} Q(1 - s_i/t) dL(s_i)`
//! from a jump skeleton of the driving subordinator.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma as GammaDist, InverseGaussian, Poisson, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::law::Law;
use crate::levy::SubordinatorSpec;
use crate::numeric;
use crate::quantiles::QuantileFunction;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SkeletonMode {
    /// Exact jumps above `trunc`, the mean of the smaller ones added as drift.
    Series,
    /// Exact increments on a uniform grid with `cells_per_unit` cells per unit
    /// time. Only gamma and inverse-Gaussian families; others fall back to series.
    Increments { cells_per_unit: usize },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimSettings {
    pub trunc: f64,
    pub mode: SkeletonMode,
}

impl Default for SimSettings {
    fn default() -> Self {
        SimSettings { trunc: 1e-6, mode: SkeletonMode::Series }
    }
}

impl SimSettings {
    pub fn with_trunc(trunc: f64) -> Self {
        SimSettings { trunc, mode: SkeletonMode::Series }
    }
    pub fn increments() -> Self {
        SimSettings { trunc: 1e-6, mode: SkeletonMode::Increments { cells_per_unit: 1 << 12 } }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Jump {
    pub time: f64,
    pub size: f64,
}

/// Jumps of `L` on `[0, horizon]` sorted by time, plus the drift rate that
/// stands in for the truncated small jumps.
#[derive(Clone, Debug)]
pub struct JumpSkeleton {
    pub horizon: f64,
    pub jumps: Vec<Jump>,
    pub drift: f64,
    pub trunc: f64,
}

impl JumpSkeleton {
    /// `L(t)`.
    pub fn level(&self, t: f64) -> f64 {
        let k = self.jumps.partition_point(|j| j.time <= t);
        self.jumps[..k].iter().map(|j| j.size).sum::<f64>() + self.drift * t
    }
}

const OP_JUMPS: &str = "sample_jumps";

fn poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<u64> {
    if mean <= 0.0 {
        return Ok(0);
    }
    if !mean.is_finite() || mean > 1e12 {
        return Err(Error::precondition(OP_JUMPS, format!("expected jump count {mean:e} is too large; raise trunc")));
    }
    Ok(Poisson::new(mean).map_err(|e| Error::invalid(OP_JUMPS, e.to_string()))?.sample(rng) as u64)
}

/// Candidate jumps from the envelope `c s^(-alpha-1) e^(-b s)` on `[trunc, inf)`;
/// each is kept if `accept(s)` says so.
#[allow(clippy::too_many_arguments)]
fn gg_envelope<R, A>(c: f64, alpha: f64, b: f64, trunc: f64, horizon: f64, rng: &mut R, out: &mut Vec<Jump>, mut accept: A) -> Result<()>
where
    R: Rng + ?Sized,
    A: FnMut(f64, &mut R) -> Result<bool>,
{
    let mid = trunc.max(1.0);
    if trunc < 1.0 {
        let m1 = if alpha == 0.0 { c * (1.0 / trunc).ln() } else { c * (trunc.powf(-alpha) - 1.0) / alpha };
        let n = poisson(horizon * m1, rng)?;
        let top = trunc.powf(-alpha);
        for _ in 0..n {
            let u: f64 = rng.random();
            let s = if alpha == 0.0 { trunc.powf(1.0 - u) } else { (top - u * (top - 1.0)).powf(-1.0 / alpha) };
            let time = horizon * rng.random::<f64>();
            if (b == 0.0 || rng.random::<f64>() < (-b * s).exp()) && accept(s, rng)? {
                out.push(Jump { time, size: s });
            }
        }
    }
    if b > 0.0 {
        let m2 = c * mid.powf(-alpha - 1.0) * (-b * mid).exp() / b;
        let n = poisson(horizon * m2, rng)?;
        for _ in 0..n {
            let e: f64 = Exp1.sample(rng);
            let s = mid + e / b;
            let time = horizon * rng.random::<f64>();
            if rng.random::<f64>() < (s / mid).powf(-alpha - 1.0) && accept(s, rng)? {
                out.push(Jump { time, size: s });
            }
        }
    } else {
        let m2 = c * mid.powf(-alpha) / alpha;
        let n = poisson(horizon * m2, rng)?;
        for _ in 0..n {
            let u: f64 = 1.0 - rng.random::<f64>();
            let s = mid * u.powf(-1.0 / alpha);
            let time = horizon * rng.random::<f64>();
            if accept(s, rng)? {
                out.push(Jump { time, size: s });
            }
        }
    }
    Ok(())
}

/// `c int_0^trunc s^-alpha e^(-b s) ds`.
fn gg_small_mean(c: f64, alpha: f64, b: f64, trunc: f64) -> f64 {
    if b == 0.0 {
        c * trunc.powf(1.0 - alpha) / (1.0 - alpha)
    } else {
        c * b.powf(alpha - 1.0) * numeric::gamma(1.0 - alpha) * numeric::gamma_lr(1.0 - alpha, b * trunc)
    }
}

/// `int_0^x s^(a-1) e^(-v s) ds` for `v >= 0`.
fn lower_gamma_scaled(a: f64, v: f64, x: f64) -> f64 {
    if v <= 0.0 {
        x.powf(a) / a
    } else {
        v.powf(-a) * numeric::gamma(a) * numeric::gamma_lr(a, v * x)
    }
}

fn increments_supported(spec: &SubordinatorSpec) -> bool {
    match spec {
        SubordinatorSpec::GeneralizedGamma { alpha, b, .. } => *alpha == 0.0 || (*alpha == 0.5 && *b > 0.0),
        SubordinatorSpec::TimeScaled { base, .. } => increments_supported(base),
        _ => false,
    }
}

fn gg_increments<R: Rng + ?Sized>(c: f64, alpha: f64, b: f64, horizon: f64, cells_per_unit: usize, rng: &mut R, out: &mut Vec<Jump>) -> Result<()> {
    let n = ((horizon * cells_per_unit as f64).ceil() as usize).max(1);
    let dt = horizon / n as f64;
    if alpha == 0.0 {
        let g = GammaDist::new(c * dt, 1.0 / b).map_err(|e| Error::invalid(OP_JUMPS, e.to_string()))?;
        for i in 0..n {
            let size = g.sample(rng);
            if size > 0.0 {
                out.push(Jump { time: (i as f64 + 0.5) * dt, size });
            }
        }
    } else {
        // psi = 2 c sqrt(pi) (sqrt(b + w) - sqrt(b)) per unit time
        let pi = std::f64::consts::PI;
        let mean = dt * c * pi.sqrt() / b.sqrt();
        let shape = 2.0 * dt * dt * c * c * pi;
        let ig = InverseGaussian::new(mean, shape).map_err(|e| Error::invalid(OP_JUMPS, e.to_string()))?;
        for i in 0..n {
            out.push(Jump { time: (i as f64 + 0.5) * dt, size: ig.sample(rng) });
        }
    }
    Ok(())
}

/// Appends jumps of `spec` on `[0, horizon]` to `out` and returns the drift rate.
fn generate<R: Rng + ?Sized>(spec: &SubordinatorSpec, horizon: f64, settings: &SimSettings, rng: &mut R, out: &mut Vec<Jump>) -> Result<f64> {
    let trunc = settings.trunc;
    if let SkeletonMode::Increments { cells_per_unit } = settings.mode {
        if increments_supported(spec) {
            match spec {
                SubordinatorSpec::GeneralizedGamma { c, alpha, b } => {
                    gg_increments(*c, *alpha, *b, horizon, cells_per_unit, rng, out)?;
                    return Ok(0.0);
                }
                SubordinatorSpec::TimeScaled { base, factor } => {
                    let start = out.len();
                    let d = generate(base, horizon * factor, settings, rng, out)?;
                    for j in &mut out[start..] {
                        j.time /= factor;
                    }
                    return Ok(d * factor);
                }
                _ => {}
            }
        }
    }
    match spec {
        SubordinatorSpec::GeneralizedGamma { c, alpha, b } => {
            gg_envelope(*c, *alpha, *b, trunc, horizon, rng, out, |_, _| Ok(true))?;
            Ok(gg_small_mean(*c, *alpha, *b, trunc))
        }
        SubordinatorSpec::CompoundPoisson { rate, jump } => {
            let n = poisson(rate * horizon, rng)?;
            for _ in 0..n {
                let size = jump.sample(rng)?;
                let time = horizon * rng.random::<f64>();
                if size > 0.0 {
                    out.push(Jump { time, size });
                }
            }
            Ok(0.0)
        }
        SubordinatorSpec::Ggc(g) => {
            let marked = SubordinatorSpec::marked(SubordinatorSpec::gamma(g.theta), g.r.clone());
            generate(&marked, horizon, settings, rng, out)
        }
        SubordinatorSpec::Marked { base, mark } => {
            let start = out.len();
            // marks multiply individual jumps, so increments cannot be used underneath
            let series = SimSettings { mode: SkeletonMode::Series, ..*settings };
            let d = generate(base, horizon, &series, rng, out)?;
            for j in &mut out[start..] {
                j.size *= mark.sample(rng)?;
            }
            let mut k = start;
            for i in start..out.len() {
                if out[i].size > 0.0 {
                    out[k] = out[i];
                    k += 1;
                }
            }
            out.truncate(k);
            let m = if d == 0.0 { 0.0 } else { mark.mean()? };
            Ok(d * m)
        }
        SubordinatorSpec::TimeScaled { base, factor } => {
            let start = out.len();
            let d = generate(base, horizon * factor, settings, rng, out)?;
            for j in &mut out[start..] {
                j.time /= factor;
            }
            Ok(d * factor)
        }
        SubordinatorSpec::RateMixture { c, alpha, rate, weighted } => {
            let b0 = rate.lower_bound();
            let a = *alpha;
            if a == 0.0 && b0 <= 0.0 {
                return Err(Error::unsupported(OP_JUMPS, "rate mixture with alpha = 0 needs a rate law bounded away from zero"));
            }
            if *weighted {
                gg_envelope(2.0 * c / std::f64::consts::E, a, 0.5 * b0, trunc, horizon, rng, out, |s, rng| {
                    let v = rate.sample(rng)?;
                    let x = s * v;
                    let p = 0.5 * std::f64::consts::E * x * (-0.5 * x).exp() * (-0.5 * s * (v - b0)).exp();
                    Ok(rng.random::<f64>() < p)
                })?;
                // c int_0^trunc s^(1-alpha) E[V e^(-sV)] ds
                Ok(c * rate.expect(&|v| if v <= 0.0 { 0.0 } else { v * lower_gamma_scaled(2.0 - a, v, trunc) })?)
            } else {
                gg_envelope(*c, a, b0, trunc, horizon, rng, out, |s, rng| {
                    let v = rate.sample(rng)?;
                    Ok(rng.random::<f64>() < (-s * (v - b0)).exp())
                })?;
                Ok(c * rate.expect(&|v| lower_gamma_scaled(1.0 - a, v, trunc))?)
            }
        }
        SubordinatorSpec::Straddle { v } => straddle_jumps(v, horizon, trunc, rng, out),
        SubordinatorSpec::Sum(parts) => {
            let mut d = 0.0;
            for p in parts {
                d += generate(p, horizon, settings, rng, out)?;
            }
            Ok(d)
        }
        SubordinatorSpec::Analytic { name, .. } => {
            Err(Error::unsupported(OP_JUMPS, format!("{name} is given only by its exponent and cannot be simulated")))
        }
    }
}

const MAX_BIAS_PROPOSALS: u64 = 10_000_000;

fn straddle_jumps<R: Rng + ?Sized>(v: &Law, horizon: f64, trunc: f64, rng: &mut R, out: &mut Vec<Jump>) -> Result<f64> {
    let vmin = v.lower_bound();
    if vmin > 0.0 {
        // Finite activity: rate E[-log V]; V size-biased by -log V, then
        // y log-uniform on [1, 1/V] and the jump exponential with rate y.
        if let Some(p) = v.as_point() {
            let rate = -p.ln();
            let n = poisson(rate * horizon, rng)?;
            for _ in 0..n {
                let y = (1.0 / p).powf(rng.random::<f64>());
                let e: f64 = Exp1.sample(rng);
                out.push(Jump { time: horizon * rng.random::<f64>(), size: e / y });
            }
            return Ok(0.0);
        }
        let rate = v
            .neg_log_mean()?
            .finite()
            .ok_or_else(|| Error::Divergence { op: OP_JUMPS, msg: "infinite straddle rate".into() })?;
        let bound = -vmin.ln();
        let n = poisson(rate * horizon, rng)?;
        for _ in 0..n {
            let mut vs = None;
            for _ in 0..MAX_BIAS_PROPOSALS {
                let x = v.sample(rng)?;
                if rng.random::<f64>() * bound < -x.ln() {
                    vs = Some(x);
                    break;
                }
            }
            let vs = vs.ok_or(Error::SamplerStuck { op: OP_JUMPS, proposals: MAX_BIAS_PROPOSALS, acceptance: 0.0 })?;
            let y = (1.0 / vs).powf(rng.random::<f64>());
            let e: f64 = Exp1.sample(rng);
            out.push(Jump { time: horizon * rng.random::<f64>(), size: e / y });
        }
        return Ok(0.0);
    }
    // Thin the gamma(1) jumps: keep s iff E < s (1 - V) / V for fresh E, V.
    gg_envelope(1.0, 0.0, 1.0, trunc, horizon, rng, out, |s, rng| {
        let x = v.sample(rng)?;
        if x <= 0.0 {
            return Ok(true);
        }
        let e: f64 = Exp1.sample(rng);
        Ok(e < s * (1.0 - x) / x)
    })?;
    let tail = -(-trunc).exp_m1();
    let e = v.expect(&|x| if x <= 0.0 { 0.0 } else { x * -(-trunc / x).exp_m1() })?;
    Ok((tail - e).max(0.0))
}

/// Simulate the skeleton of `spec` on `[0, horizon]`.
pub fn sample_jumps<R: Rng + ?Sized>(spec: &SubordinatorSpec, horizon: f64, settings: &SimSettings, rng: &mut R) -> Result<JumpSkeleton> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::domain(OP_JUMPS, format!("horizon = {horizon} must be > 0")));
    }
    if !(settings.trunc > 0.0 && settings.trunc.is_finite()) {
        return Err(Error::domain(OP_JUMPS, format!("trunc = {} must be > 0", settings.trunc)));
    }
    if let SkeletonMode::Increments { cells_per_unit } = settings.mode {
        if cells_per_unit == 0 {
            return Err(Error::domain(OP_JUMPS, "cells_per_unit must be positive"));
        }
    }
    spec.validate()?;
    let mut jumps = Vec::new();
    let drift = generate(spec, horizon, settings, rng, &mut jumps)?;
    jumps.sort_unstable_by(|a, b| a.time.total_cmp(&b.time));
    Ok(JumpSkeleton { horizon, jumps, drift, trunc: settings.trunc })
}

/// Expected `L(1)` implied by a truncation level: jumps above `trunc` plus drift.
/// Equals `E L(1)` for every `trunc`; used to check the drift bookkeeping.
/// Not meaningful for marked families, whose truncation acts on the unmarked jump.
pub fn truncated_mean(spec: &SubordinatorSpec, trunc: f64) -> Result<f64> {
    let mut sink = Vec::new();
    let settings = SimSettings::with_trunc(trunc);
    // The drift is deterministic; run generation with zero horizon contribution.
    let mut rng = crate::mc::stream(0, 0);
    let drift = generate(spec, 1e-300, &settings, &mut rng, &mut sink)?;
    let big = numeric::integrate_to_inf("truncated_mean", &|s: f64| s * spec.rho(s).unwrap_or(f64::NAN), trunc, numeric::QuadTol::new(1e-13, 1e-10))?;
    Ok(drift + big)
}

fn check_time(op: &'static str, skel: &JumpSkeleton, t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(op, format!("t = {t} must be > 0")));
    }
    if t > skel.horizon * (1.0 + 1e-12) {
        return Err(Error::domain(op, format!("t = {t} exceeds the skeleton horizon {}", skel.horizon)));
    }
    Ok(())
}

/// `T(t) = sum_{s_i <= t} Q(1 - s_i/t) dL_i + drift t E[Q(U)]`.
pub fn clock_value(q: &QuantileFunction, skel: &JumpSkeleton, t: f64) -> Result<f64> {
    check_time("clock_value", skel, t)?;
    Ok(clock_value_unchecked(q, skel, t))
}

fn clock_value_unchecked(q: &QuantileFunction, skel: &JumpSkeleton, t: f64) -> f64 {
    let k = skel.jumps.partition_point(|j| j.time <= t);
    let inv = 1.0 / t;
    let mut sum = 0.0;
    for j in &skel.jumps[..k] {
        sum += q.eval(1.0 - j.time * inv) * j.size;
    }
    sum + skel.drift * t * q.mean()
}

#[derive(Clone, Debug, Serialize)]
pub struct ClockPath {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

/// Clock values on an increasing grid in `(0, horizon]`; the returned path starts at `(0, 0)`.
pub fn clock_path(q: &QuantileFunction, skel: &JumpSkeleton, grid: &[f64]) -> Result<ClockPath> {
    let mut times = vec![0.0];
    let mut values = vec![0.0];
    let mut prev = 0.0;
    for &t in grid {
        if t <= prev {
            return Err(Error::domain("clock_path", "grid must be strictly increasing and positive"));
        }
        check_time("clock_path", skel, t)?;
        times.push(t);
        values.push(clock_value_unchecked(q, skel, t));
        prev = t;
    }
    Ok(ClockPath { times, values })
}

/// Clock with kernel `min(1, (t - s)_+ / eps)`.
pub fn short_memory_value(eps: f64, skel: &JumpSkeleton, t: f64) -> Result<f64> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::domain("short_memory_value", format!("eps = {eps} must be > 0")));
    }
    check_time("short_memory_value", skel, t)?;
    let k = skel.jumps.partition_point(|j| j.time <= t);
    let sum: f64 = skel.jumps[..k].iter().map(|j| ((t - j.time) / eps).min(1.0) * j.size).sum();
    let drift_int = if t <= eps { t * t / (2.0 * eps) } else { t - 0.5 * eps };
    Ok(sum + skel.drift * drift_int)
}

/// A quantile clock: kernel, driver and simulation settings.
#[derive(Clone, Debug)]
pub struct ClockSpec {
    pub kernel: QuantileFunction,
    pub driver: SubordinatorSpec,
    pub settings: SimSettings,
}

impl ClockSpec {
    pub fn new(kernel: QuantileFunction, driver: SubordinatorSpec) -> Self {
        ClockSpec { kernel, driver, settings: SimSettings::default() }
    }

    pub fn sample_value<R: Rng + ?Sized>(&self, t: f64, rng: &mut R) -> Result<f64> {
        let skel = sample_jumps(&self.driver, t, &self.settings, rng)?;
        clock_value(&self.kernel, &skel, t)
    }

    pub fn sample_path<R: Rng + ?Sized>(&self, grid: &[f64], rng: &mut R) -> Result<ClockPath> {
        let horizon = *grid.last().ok_or_else(|| Error::domain("sample_path", "empty grid"))?;
        let skel = sample_jumps(&self.driver, horizon, &self.settings, rng)?;
        clock_path(&self.kernel, &skel, grid)
    }
}

/// `T_outer(T_inner(t))` with independent skeletons.
pub fn compose<R: Rng + ?Sized>(outer: &ClockSpec, inner: &ClockSpec, t: f64, rng: &mut R) -> Result<f64> {
    let tau = inner.sample_value(t, rng)?;
    if tau <= 0.0 {
        return Ok(0.0);
    }
    outer.sample_value(tau, rng)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PriceParams {
    pub s0: f64,
    pub r: f64,
    pub mu: f64,
    pub sigma: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PricePath {
    pub times: Vec<f64>,
    pub log_prices: Vec<f64>,
}

/// `log S(t) = log S0 + r t + W(sigma^2 T(t)) + mu sigma^2 T(t)` along a clock path.
pub fn log_price_path<R: Rng + ?Sized>(clock: &ClockPath, params: &PriceParams, rng: &mut R) -> Result<PricePath> {
    const OP: &str = "log_price_path";
    if !(params.s0 > 0.0 && params.sigma >= 0.0) {
        return Err(Error::domain(OP, "need s0 > 0 and sigma >= 0"));
    }
    let mut log_prices = Vec::with_capacity(clock.values.len());
    let mut w = 0.0;
    let mut prev = 0.0;
    for (i, (&t, &tt)) in clock.times.iter().zip(&clock.values).enumerate() {
        let d = tt - prev;
        if d < -1e-12 * tt.abs().max(1.0) {
            return Err(Error::precondition(OP, format!("clock decreases at index {i}")));
        }
        if d > 0.0 {
            let z: f64 = StandardNormal.sample(rng);
            w += params.sigma * d.sqrt() * z;
        }
        prev = tt;
        log_prices.push(params.s0.ln() + params.r * t + w + params.mu * params.sigma * params.sigma * tt);
    }
    Ok(PricePath { times: clock.times.clone(), log_prices })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::{mean_se, stream};
    use crate::quantiles::QuantileFamily;

    #[test]
    fn hand_built_skeleton() {
        let skel = JumpSkeleton {
            horizon: 1.0,
            jumps: vec![Jump { time: 0.25, size: 1.0 }, Jump { time: 0.75, size: 2.0 }],
            drift: 0.0,
            trunc: 1e-6,
        };
        let v = clock_value(&QuantileFunction::uniform(), &skel, 1.0).unwrap();
        assert!((v - 1.25).abs() < 1e-15);
        let v = short_memory_value(0.5, &skel, 1.0).unwrap();
        assert!((v - 2.0).abs() < 1e-15);
        let v = short_memory_value(1.0, &skel, 1.0).unwrap();
        assert!((v - 1.25).abs() < 1e-15);
        assert!(clock_value(&QuantileFunction::uniform(), &skel, 2.0).is_err());
        assert!(clock_value(&QuantileFunction::uniform(), &skel, 0.0).is_err());
    }

    #[test]
    fn drift_bookkeeping_keeps_mean() {
        let spec = SubordinatorSpec::tilted_stable(0.5);
        let a = truncated_mean(&spec, 1e-6).unwrap();
        let b = truncated_mean(&spec, 5e-7).unwrap();
        assert!((a - 0.5).abs() < 1e-6, "{a}");
        assert!((a - b).abs() / a < 1e-3);
        let st = SubordinatorSpec::Straddle { v: Law::Quantile(QuantileFunction::new(QuantileFamily::Occupation { alpha: 0.5 }).unwrap()) };
        let exact = st.mean().unwrap();
        assert!((truncated_mean(&st, 1e-4).unwrap() - exact).abs() < 1e-7);
        let rm = SubordinatorSpec::RateMixture { c: 1.0, alpha: 0.4, rate: Law::Uniform { lo: 1.0, hi: 2.0 }, weighted: true };
        assert!((truncated_mean(&rm, 1e-4).unwrap() - rm.mean().unwrap()).abs() < 1e-6);
        let ru = SubordinatorSpec::RateMixture { c: 1.0, alpha: 0.4, rate: Law::Uniform { lo: 1.0, hi: 2.0 }, weighted: false };
        assert!((truncated_mean(&ru, 1e-4).unwrap() - ru.mean().unwrap()).abs() < 1e-6);
    }

    #[test]
    fn tilted_stable_terminal_mean() {
        let spec = SubordinatorSpec::tilted_stable(0.5);
        let mut rng = stream(42, 0);
        let xs: Vec<f64> = (0..20_000).map(|_| sample_jumps(&spec, 1.0, &SimSettings::default(), &mut rng).unwrap().level(1.0)).collect();
        let (m, se) = mean_se(&xs);
        assert!((m - 0.5).abs() < 3.0 * se.unwrap(), "{m} +- {}", se.unwrap());
    }

    #[test]
    fn increments_match_series_in_mean() {
        for spec in [SubordinatorSpec::gamma(1.5), SubordinatorSpec::tilted_stable(0.5)] {
            let mut rng = stream(7, 1);
            let settings = SimSettings { trunc: 1e-6, mode: SkeletonMode::Increments { cells_per_unit: 64 } };
            let xs: Vec<f64> = (0..20_000).map(|_| sample_jumps(&spec, 2.0, &settings, &mut rng).unwrap().level(2.0)).collect();
            let (m, se) = mean_se(&xs);
            let exact = 2.0 * spec.mean().unwrap();
            assert!((m - exact).abs() < 4.0 * se.unwrap(), "{}: {m} vs {exact}", spec.name());
        }
    }

    #[test]
    fn identity_kernel_clock_mean() {
        // E T(t) = t E[Q(U)] E L(1)
        let clock = ClockSpec::new(QuantileFunction::arcsine(), SubordinatorSpec::gamma(2.0));
        let mut rng = stream(3, 0);
        let xs: Vec<f64> = (0..20_000).map(|_| clock.sample_value(1.5, &mut rng).unwrap()).collect();
        let (m, se) = mean_se(&xs);
        assert!((m - 1.5 * 0.5 * 2.0).abs() < 4.0 * se.unwrap());
    }

    #[test]
    fn paths_are_nondecreasing_for_monotone_kernels() {
        let clock = ClockSpec::new(QuantileFunction::uniform(), SubordinatorSpec::gamma(1.0));
        let grid: Vec<f64> = (1..=50).map(|i| i as f64 * 0.02).collect();
        let mut rng = stream(1, 0);
        for _ in 0..20 {
            let p = clock.sample_path(&grid, &mut rng).unwrap();
            assert!(p.values.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        }
    }

    #[test]
    fn analytic_spec_cannot_be_simulated() {
        use crate::levy::{FnExponent, SharedExponent};
        use std::sync::Arc;
        let spec = SubordinatorSpec::Analytic { name: "custom".into(), psi: SharedExponent(Arc::new(FnExponent(|w: f64| Ok(w.sqrt())))), rho: None };
        let mut rng = stream(0, 0);
        assert!(matches!(sample_jumps(&spec, 1.0, &SimSettings::default(), &mut rng), Err(Error::Unsupported { .. })));
    }

    #[test]
    fn log_price_is_deterministic_when_sigma_zero() {
        let path = ClockPath { times: vec![0.0, 1.0], values: vec![0.0, 0.7] };
        let mut rng = stream(0, 0);
        let p = log_price_path(&path, &PriceParams { s0: 100.0, r: 0.05, mu: 0.0, sigma: 0.0 }, &mut rng).unwrap();
        assert!((p.log_prices[1] - (100f64.ln() + 0.05)).abs() < 1e-15);
    }
}
