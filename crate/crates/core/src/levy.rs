//! Subordinators described by their Laplace exponent `psi` and Levy density `rho`.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result, Trap};
use crate::extended::ExtendedReal;
use crate::law::Law;
use crate::numeric::{self, integrate, integrate_positive_line, QuadTol};
use crate::quantiles::QuantileFunction;

/// `psi(omega) = -log E exp(-omega L(1))` for `omega >= 0`.
pub trait LaplaceExponent: Send + Sync {
    fn psi(&self, omega: f64) -> Result<f64>;

    /// Centered finite difference unless overridden.
    fn psi_deriv(&self, omega: f64) -> Result<f64> {
        let h = (1e-6f64).max(1e-6 * omega);
        let lo = (omega - h).max(0.0);
        let hi = omega + h;
        Ok((self.psi(hi)? - self.psi(lo)?) / (hi - lo))
    }
}

/// A Laplace exponent given by a closure.
pub struct FnExponent<F>(pub F);

impl<F: Fn(f64) -> Result<f64> + Send + Sync> LaplaceExponent for FnExponent<F> {
    fn psi(&self, omega: f64) -> Result<f64> {
        (self.0)(omega)
    }
}

#[derive(Clone)]
pub struct SharedExponent(pub Arc<dyn LaplaceExponent>);

impl fmt::Debug for SharedExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<exponent>")
    }
}

pub type RhoFn = Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>;

#[derive(Clone)]
pub struct SharedRho(pub RhoFn);

impl fmt::Debug for SharedRho {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<levy density>")
    }
}

/// `GGC(theta, R)`: Levy density `theta s^-1 E exp(-s / R)`.
#[derive(Clone, Debug)]
pub struct GgcSpec {
    pub theta: f64,
    pub r: Law,
}

impl GgcSpec {
    pub fn new(theta: f64, r: Law) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::invalid("GgcSpec", format!("theta = {theta} must be > 0")));
        }
        r.validate()?;
        let spec = GgcSpec { theta, r };
        if let Ok(v) = spec.r.expect(&|x| x.ln_1p()) {
            if !v.is_finite() {
                return Err(Error::invalid("GgcSpec", "E log(1 + R) is infinite"));
            }
        }
        Ok(spec)
    }

    /// Checks that sampled marks respect the declared bound and that
    /// `E log(1 + R)` does not look divergent.
    pub fn validate_by_sampling<G: Rng + ?Sized>(&self, n: usize, rng: &mut G) -> Result<()> {
        let bound = self.r.upper_bound();
        let mut sum = 0.0;
        for _ in 0..n {
            let x = self.r.sample(rng)?;
            if x < 0.0 || bound.is_some_and(|b| x > b * (1.0 + 1e-12)) {
                return Err(Error::invalid("GgcSpec", format!("draw {x} violates the declared support")));
            }
            sum += x.ln_1p();
        }
        if !(sum / n as f64).is_finite() {
            return Err(Error::invalid("GgcSpec", "E log(1 + R) appears infinite"));
        }
        Ok(())
    }
}

/// A subordinator family. `Analytic` carries only an exponent and cannot be simulated.
#[derive(Clone, Debug)]
pub enum SubordinatorSpec {
    /// Levy density `c s^(-alpha-1) e^(-b s)`, `0 <= alpha < 1`.
    GeneralizedGamma { c: f64, alpha: f64, b: f64 },
    CompoundPoisson { rate: f64, jump: Law },
    Ggc(GgcSpec),
    /// Every jump of `base` multiplied by an independent draw of `mark`.
    Marked { base: Box<SubordinatorSpec>, mark: Law },
    /// `L(factor t)`.
    TimeScaled { base: Box<SubordinatorSpec>, factor: f64 },
    /// Unweighted: `c s^(-alpha-1) E exp(-s V)`. Weighted: `c s^(-alpha) E[V exp(-s V)]`.
    RateMixture { c: f64, alpha: f64, rate: Law, weighted: bool },
    /// Levy density `s^-1 (e^-s - E exp(-s / V))` for `V` on `[0, 1]`.
    Straddle { v: Law },
    Sum(Vec<SubordinatorSpec>),
    Analytic { name: String, psi: SharedExponent, rho: Option<SharedRho> },
}

impl SubordinatorSpec {
    pub fn gamma(theta: f64) -> Self {
        SubordinatorSpec::GeneralizedGamma { c: theta, alpha: 0.0, b: 1.0 }
    }
    /// `psi(w) = w^alpha`.
    pub fn stable(alpha: f64) -> Self {
        SubordinatorSpec::GeneralizedGamma { c: alpha / numeric::gamma(1.0 - alpha), alpha, b: 0.0 }
    }
    /// `psi(w) = (1 + w)^alpha - 1`.
    pub fn tilted_stable(alpha: f64) -> Self {
        SubordinatorSpec::GeneralizedGamma { c: alpha / numeric::gamma(1.0 - alpha), alpha, b: 1.0 }
    }
    pub fn ggc(theta: f64, r: Law) -> Result<Self> {
        Ok(SubordinatorSpec::Ggc(GgcSpec::new(theta, r)?))
    }
    pub fn marked(base: SubordinatorSpec, mark: Law) -> Self {
        SubordinatorSpec::Marked { base: Box::new(base), mark }
    }
    pub fn time_scaled(base: SubordinatorSpec, factor: f64) -> Self {
        SubordinatorSpec::TimeScaled { base: Box::new(base), factor }
    }

    pub fn name(&self) -> String {
        match self {
            SubordinatorSpec::GeneralizedGamma { c, alpha, b } => format!("generalized_gamma(c={c}, alpha={alpha}, b={b})"),
            SubordinatorSpec::CompoundPoisson { rate, .. } => format!("compound_poisson(rate={rate})"),
            SubordinatorSpec::Ggc(g) => format!("ggc(theta={})", g.theta),
            SubordinatorSpec::Marked { base, .. } => format!("marked({})", base.name()),
            SubordinatorSpec::TimeScaled { base, factor } => format!("{}@{factor}t", base.name()),
            SubordinatorSpec::RateMixture { c, alpha, weighted, .. } => {
                format!("rate_mixture(c={c}, alpha={alpha}, weighted={weighted})")
            }
            SubordinatorSpec::Straddle { .. } => "straddle".into(),
            SubordinatorSpec::Sum(parts) => parts.iter().map(|p| p.name()).collect::<Vec<_>>().join(" + "),
            SubordinatorSpec::Analytic { name, .. } => name.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::invalid("SubordinatorSpec", m));
        match self {
            SubordinatorSpec::GeneralizedGamma { c, alpha, b } => {
                if !(*c > 0.0 && c.is_finite()) || !(0.0..1.0).contains(alpha) || !(*b >= 0.0 && b.is_finite()) {
                    return bad(format!("generalized gamma ({c}, {alpha}, {b}) out of range"));
                }
                if *alpha == 0.0 && *b == 0.0 {
                    return bad("alpha = 0 needs b > 0".into());
                }
                Ok(())
            }
            SubordinatorSpec::CompoundPoisson { rate, jump } => {
                if !(*rate >= 0.0 && rate.is_finite()) {
                    return bad(format!("rate {rate} must be finite and >= 0"));
                }
                jump.validate()
            }
            SubordinatorSpec::Ggc(g) => GgcSpec::new(g.theta, g.r.clone()).map(|_| ()),
            SubordinatorSpec::Marked { base, mark } => {
                mark.validate()?;
                base.validate()
            }
            SubordinatorSpec::TimeScaled { base, factor } => {
                if !(*factor > 0.0 && factor.is_finite()) {
                    return bad(format!("time factor {factor} must be > 0"));
                }
                base.validate()
            }
            SubordinatorSpec::RateMixture { c, alpha, rate, .. } => {
                if !(*c > 0.0 && c.is_finite()) || !(0.0..1.0).contains(alpha) {
                    return bad(format!("rate mixture ({c}, {alpha}) out of range"));
                }
                rate.validate()
            }
            SubordinatorSpec::Straddle { v } => {
                v.validate()?;
                match v.upper_bound() {
                    Some(u) if u <= 1.0 + 1e-12 => Ok(()),
                    _ => bad("straddle variable must be supported in [0, 1]".into()),
                }
            }
            SubordinatorSpec::Sum(parts) => {
                if parts.is_empty() {
                    return bad("empty sum".into());
                }
                parts.iter().try_for_each(|p| p.validate())
            }
            SubordinatorSpec::Analytic { .. } => Ok(()),
        }
    }

    fn psi_inner(&self, w: f64) -> Result<f64> {
        if w == 0.0 {
            return Ok(0.0);
        }
        match self {
            SubordinatorSpec::GeneralizedGamma { c, alpha, b } => Ok(gg_psi(*c, *alpha, *b, w)),
            SubordinatorSpec::CompoundPoisson { rate, jump } => Ok(rate * (1.0 - jump.laplace(w)?)),
            SubordinatorSpec::Ggc(g) => Ok(g.theta * g.r.expect(&|x| (w * x).ln_1p())?),
            SubordinatorSpec::Marked { base, mark } => {
                let trap = Trap::new();
                let v = mark.expect(&|y| trap.catch(base.psi_inner(w * y)));
                trap.finish(v)
            }
            SubordinatorSpec::TimeScaled { base, factor } => Ok(factor * base.psi_inner(w)?),
            SubordinatorSpec::RateMixture { c, alpha, rate, weighted } => {
                let a = *alpha;
                if *weighted {
                    let e = rate.expect(&|v| if v <= 0.0 { 0.0 } else { v.powf(a) - v * (v + w).powf(a - 1.0) })?;
                    Ok(c * numeric::gamma(1.0 - a) * e)
                } else if a == 0.0 {
                    Ok(c * rate.expect(&|v| (w / v).ln_1p())?)
                } else {
                    let e = rate.expect(&|v| pow_diff(v, w, a))?;
                    Ok(c * numeric::gamma(1.0 - a) / a * e)
                }
            }
            SubordinatorSpec::Straddle { v } => Ok(w.ln_1p() - v.expect(&|x| (w * x).ln_1p())?),
            SubordinatorSpec::Sum(parts) => parts.iter().map(|p| p.psi_inner(w)).sum(),
            SubordinatorSpec::Analytic { psi, .. } => psi.0.psi(w),
        }
    }

    fn psi_deriv_inner(&self, w: f64) -> Result<f64> {
        match self {
            SubordinatorSpec::GeneralizedGamma { c, alpha, b } => {
                if *alpha == 0.0 {
                    Ok(c / (b + w))
                } else {
                    Ok(c * numeric::gamma(1.0 - alpha) * (b + w).powf(alpha - 1.0))
                }
            }
            SubordinatorSpec::CompoundPoisson { rate, jump } => Ok(rate * jump.expect(&|x| x * (-w * x).exp())?),
            SubordinatorSpec::Ggc(g) => Ok(g.theta * g.r.expect(&|x| x / (1.0 + w * x))?),
            SubordinatorSpec::Marked { base, mark } => {
                let trap = Trap::new();
                let v = mark.expect(&|y| y * trap.catch(base.psi_deriv_inner(w * y)));
                trap.finish(v)
            }
            SubordinatorSpec::TimeScaled { base, factor } => Ok(factor * base.psi_deriv_inner(w)?),
            SubordinatorSpec::RateMixture { c, alpha, rate, weighted } => {
                let a = *alpha;
                let g = numeric::gamma(1.0 - a);
                if *weighted {
                    Ok(c * g * (1.0 - a) * rate.expect(&|v| v * (v + w).powf(a - 2.0))?)
                } else {
                    Ok(c * g * rate.expect(&|v| (v + w).powf(a - 1.0))?)
                }
            }
            SubordinatorSpec::Straddle { v } => Ok(1.0 / (1.0 + w) - v.expect(&|x| x / (1.0 + w * x))?),
            SubordinatorSpec::Sum(parts) => parts.iter().map(|p| p.psi_deriv_inner(w)).sum(),
            SubordinatorSpec::Analytic { psi, .. } => psi.0.psi_deriv(w),
        }
    }

    /// Levy density at `s > 0`.
    pub fn rho(&self, s: f64) -> Result<f64> {
        const OP: &str = "rho";
        if !(s > 0.0) {
            return Err(Error::domain(OP, format!("s = {s} must be > 0")));
        }
        match self {
            SubordinatorSpec::GeneralizedGamma { c, alpha, b } => Ok(c * s.powf(-alpha - 1.0) * (-b * s).exp()),
            SubordinatorSpec::CompoundPoisson { rate, jump } => {
                let d = jump.pdf(s).ok_or_else(|| Error::unsupported(OP, "jump law has no density"))?;
                Ok(rate * d)
            }
            SubordinatorSpec::Ggc(g) => {
                let e = g.r.expect(&|r| if r <= 0.0 { 0.0 } else { (-s / r).exp() })?;
                Ok(g.theta * e / s)
            }
            SubordinatorSpec::Marked { base, mark } => {
                let trap = Trap::new();
                let v = mark.expect(&|y| if y <= 0.0 { 0.0 } else { trap.catch(base.rho(s / y)) / y });
                trap.finish(v)
            }
            SubordinatorSpec::TimeScaled { base, factor } => Ok(factor * base.rho(s)?),
            SubordinatorSpec::RateMixture { c, alpha, rate, weighted } => {
                if *weighted {
                    Ok(c * s.powf(-alpha) * rate.expect(&|v| v * (-s * v).exp())?)
                } else {
                    Ok(c * s.powf(-alpha - 1.0) * rate.laplace(s)?)
                }
            }
            SubordinatorSpec::Straddle { v } => {
                let e = v.expect(&|x| if x <= 0.0 { 0.0 } else { (-s / x).exp() })?;
                Ok(((-s).exp() - e) / s)
            }
            SubordinatorSpec::Sum(parts) => parts.iter().map(|p| p.rho(s)).sum(),
            SubordinatorSpec::Analytic { rho, .. } => match rho {
                Some(r) => (r.0)(s),
                None => Err(Error::unsupported(OP, "analytic exponent without a Levy density")),
            },
        }
    }

    /// Total Levy mass `int rho`, possibly infinite.
    pub fn total_mass(&self) -> Result<ExtendedReal> {
        Ok(match self {
            SubordinatorSpec::CompoundPoisson { rate, jump } => ExtendedReal::Finite(rate * (1.0 - jump.atom(0.0))),
            SubordinatorSpec::Marked { base, mark } => match base.total_mass()? {
                ExtendedReal::Finite(m) => ExtendedReal::Finite(m * (1.0 - mark.atom(0.0))),
                inf => inf,
            },
            SubordinatorSpec::TimeScaled { base, factor } => match base.total_mass()? {
                ExtendedReal::Finite(m) => ExtendedReal::Finite(m * factor),
                inf => inf,
            },
            SubordinatorSpec::Straddle { v } => v.neg_log_mean()?,
            SubordinatorSpec::Sum(parts) => {
                let mut total = 0.0;
                for p in parts {
                    match p.total_mass()? {
                        ExtendedReal::Finite(m) => total += m,
                        ExtendedReal::PosInfinity => return Ok(ExtendedReal::PosInfinity),
                    }
                }
                ExtendedReal::Finite(total)
            }
            SubordinatorSpec::Analytic { .. } => {
                return Err(Error::unsupported("total_mass", "analytic exponent without a Levy density"))
            }
            _ => ExtendedReal::PosInfinity,
        })
    }

    /// `E L(1) = psi'(0)`, possibly infinite.
    pub fn mean(&self) -> Result<f64> {
        if let SubordinatorSpec::GeneralizedGamma { b, .. } = self {
            if *b == 0.0 {
                return Ok(f64::INFINITY);
            }
        }
        self.psi_deriv_inner(0.0)
    }
}

impl LaplaceExponent for SubordinatorSpec {
    fn psi(&self, omega: f64) -> Result<f64> {
        if omega < 0.0 || omega.is_nan() {
            return Err(Error::domain("psi", format!("omega = {omega} must be >= 0")));
        }
        self.psi_inner(omega)
    }

    fn psi_deriv(&self, omega: f64) -> Result<f64> {
        if omega < 0.0 || omega.is_nan() {
            return Err(Error::domain("psi_deriv", format!("omega = {omega} must be >= 0")));
        }
        self.psi_deriv_inner(omega)
    }
}

/// `(v + w)^a - v^a` without cancellation for small `w / v`.
fn pow_diff(v: f64, w: f64, a: f64) -> f64 {
    if v <= 0.0 {
        w.powf(a)
    } else {
        v.powf(a) * (a * (w / v).ln_1p()).exp_m1()
    }
}

fn gg_psi(c: f64, alpha: f64, b: f64, w: f64) -> f64 {
    if alpha == 0.0 {
        c * (w / b).ln_1p()
    } else {
        c * numeric::gamma(1.0 - alpha) / alpha * pow_diff(b, w, alpha)
    }
}

/// `psi(omega)` for `omega > 0`.
pub fn psi_eval(spec: &SubordinatorSpec, omega: f64) -> Result<f64> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::domain("psi_eval", format!("omega = {omega} must be finite and > 0")));
    }
    spec.validate()?;
    spec.psi(omega)
}

/// `int_0^inf (1 - e^(-omega s)) rho(s) ds` by quadrature.
pub fn psi_from_rho(rho: &dyn Fn(f64) -> Result<f64>, omega: f64) -> Result<f64> {
    let trap = Trap::new();
    let f = |s: f64| {
        let r = trap.catch(rho(s));
        if r == 0.0 {
            0.0
        } else {
            -(-omega * s).exp_m1() * r
        }
    };
    let v = integrate_positive_line("psi_from_rho", &f, QuadTol::new(1e-13, 1e-9));
    trap.finish(v)
}

/// Estimate with an optional Monte Carlo standard error.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct Estimate {
    pub value: f64,
    pub se: Option<f64>,
}

/// `theta E log(1 + omega R)` by quadrature when the law of `R` supports it,
/// otherwise by Monte Carlo with `mc_draws` samples (at least 1000).
pub fn ggc_psi<G: Rng + ?Sized>(g: &GgcSpec, omega: f64, mc_draws: usize, rng: &mut G) -> Result<Estimate> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::domain("ggc_psi", format!("omega = {omega} must be > 0")));
    }
    match g.r.expect(&|x| (omega * x).ln_1p()) {
        Ok(v) => Ok(Estimate { value: g.theta * v, se: None }),
        Err(Error::Unsupported { .. }) => {
            if mc_draws < 1000 {
                return Err(Error::Config(format!("ggc_psi Monte Carlo fallback needs at least 1000 draws, got {mc_draws}")));
            }
            let mut sum = 0.0;
            let mut sq = 0.0;
            for _ in 0..mc_draws {
                let x = (omega * g.r.sample(rng)?).ln_1p();
                sum += x;
                sq += x * x;
            }
            let n = mc_draws as f64;
            let mean = sum / n;
            let var = (sq / n - mean * mean).max(0.0) * n / (n - 1.0);
            Ok(Estimate { value: g.theta * mean, se: Some(g.theta * (var / n).sqrt()) })
        }
        Err(e) => Err(e),
    }
}

/// Laplace exponent of the clock: `-log E exp(-omega T(t)) = t int_0^1 psi_L(omega Q(u)) du`.
pub fn clock_psi(q: &QuantileFunction, psi_l: &dyn LaplaceExponent, t: f64, omega: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain("clock_psi", format!("t = {t} must be > 0")));
    }
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::domain("clock_psi", format!("omega = {omega} must be > 0")));
    }
    let trap = Trap::new();
    let f = |u: f64| trap.catch(psi_l.psi(omega * q.eval(u)));
    let v = integrate("clock_psi", &f, 0.0, 1.0, QuadTol::DEFAULT);
    Ok(t * trap.finish(v)?)
}

/// Levy density of `R L`: `E[rho_L(s / R) / R]`.
pub fn mixed_rho(rho_l: &dyn Fn(f64) -> Result<f64>, r: &Law, s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::domain("mixed_rho", format!("s = {s} must be > 0")));
    }
    let trap = Trap::new();
    let v = r.expect(&|x| if x <= 0.0 { 0.0 } else { trap.catch(rho_l(s / x)) / x });
    trap.finish(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantiles::{QuantileFamily, SpecialVariable};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn named_families() {
        assert!(rel(psi_eval(&SubordinatorSpec::gamma(1.0), 1.0).unwrap(), 2f64.ln()) < 1e-15);
        assert!(rel(psi_eval(&SubordinatorSpec::stable(0.5), 4.0).unwrap(), 2.0) < 1e-12);
        assert!(rel(psi_eval(&SubordinatorSpec::tilted_stable(0.5), 3.0).unwrap(), 1.0) < 1e-12);
        assert!(matches!(psi_eval(&SubordinatorSpec::gamma(1.0), -1.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn ggc_uniform_closed_form() {
        let g = GgcSpec::new(1.0, Law::uniform01()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let e = ggc_psi(&g, 1.0, 0, &mut rng).unwrap();
        assert!((e.value - (2.0 * 2f64.ln() - 1.0)).abs() < 1e-10);
        assert!(e.se.is_none());
    }

    #[test]
    fn ggc_monte_carlo_fallback() {
        let r = Law::Special(SpecialVariable::PositiveStable { alpha: 0.7 });
        let g = GgcSpec { theta: 1.0, r };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(matches!(ggc_psi(&g, 1.0, 10, &mut rng), Err(Error::Config(_))));
        let e = ggc_psi(&g, 1.0, 20_000, &mut rng).unwrap();
        assert!(e.se.unwrap() > 0.0);
    }

    #[test]
    fn clock_psi_arcsine_gamma() {
        let q = QuantileFunction::arcsine();
        let v = clock_psi(&q, &SubordinatorSpec::gamma(1.0), 1.0, 1.0).unwrap();
        assert!((v - 0.376_452_812_919_195_4).abs() < 1e-8, "{v}");
    }

    #[test]
    fn clock_psi_constant_kernel_is_linear_in_time() {
        let q = QuantileFunction::constant(1.0).unwrap();
        let l = SubordinatorSpec::gamma(2.0);
        let v = clock_psi(&q, &l, 3.0, 0.7).unwrap();
        assert!(rel(v, 3.0 * l.psi(0.7).unwrap()) < 1e-12);
    }

    #[test]
    fn mixed_rho_gamma_uniform() {
        let rho = |x: f64| Ok((-x).exp() / x);
        let v = mixed_rho(&rho, &Law::uniform01(), 1.0).unwrap();
        assert!((v - 0.148_495_506_775_922_05).abs() < 1e-9, "{v}");
        let v = mixed_rho(&rho, &Law::uniform01(), 0.5).unwrap();
        assert!((v - 0.653_287_724_649_106).abs() < 1e-9, "{v}");
    }

    fn catalog() -> Vec<SubordinatorSpec> {
        let arcsine = Law::Quantile(QuantileFunction::arcsine());
        vec![
            SubordinatorSpec::gamma(1.3),
            SubordinatorSpec::tilted_stable(0.4),
            SubordinatorSpec::GeneralizedGamma { c: 0.8, alpha: 0.6, b: 2.0 },
            SubordinatorSpec::CompoundPoisson { rate: 2.0, jump: Law::Gamma { shape: 1.5, scale: 0.5 } },
            SubordinatorSpec::ggc(0.7, arcsine.clone()).unwrap(),
            SubordinatorSpec::marked(SubordinatorSpec::tilted_stable(0.5), Law::Beta { a: 2.0, b: 1.0 }),
            SubordinatorSpec::time_scaled(SubordinatorSpec::gamma(1.0), 2.5),
            SubordinatorSpec::RateMixture { c: 1.0, alpha: 0.35, rate: Law::Affine { base: Box::new(Law::BetaPrime { a: 0.35, b: 0.5 }), scale: 2.0, shift: 1.0 }, weighted: false },
            SubordinatorSpec::RateMixture { c: 1.0, alpha: 0.35, rate: Law::Affine { base: Box::new(Law::BetaPrime { a: 0.35, b: 0.5 }), scale: 2.0, shift: 1.0 }, weighted: true },
            SubordinatorSpec::Straddle { v: Law::Point(0.3) },
            SubordinatorSpec::Straddle { v: Law::Quantile(QuantileFunction::new(QuantileFamily::Occupation { alpha: 0.5 }).unwrap()) },
            SubordinatorSpec::Sum(vec![SubordinatorSpec::gamma(1.0), SubordinatorSpec::CompoundPoisson { rate: 1.0, jump: Law::exp1() }]),
        ]
    }

    #[test]
    fn psi_matches_levy_density() {
        for spec in catalog() {
            for &w in &[0.1, 1.0, 5.0] {
                let a = spec.psi(w).unwrap();
                let b = psi_from_rho(&|s| spec.rho(s), w).unwrap_or_else(|e| panic!("{}: {e}", spec.name()));
                assert!(rel(a, b) < 1e-4, "{}: psi({w}) = {a}, from rho {b}", spec.name());
            }
        }
    }

    #[test]
    fn analytic_derivatives_match_differences() {
        for spec in catalog() {
            for &w in &[0.2, 2.0] {
                let h = 1e-5 * w;
                let fd = (spec.psi(w + h).unwrap() - spec.psi(w - h).unwrap()) / (2.0 * h);
                let d = spec.psi_deriv(w).unwrap();
                assert!(rel(d, fd) < 1e-5, "{}: {d} vs {fd}", spec.name());
            }
        }
    }

    #[test]
    fn masses() {
        assert!(SubordinatorSpec::gamma(1.0).total_mass().unwrap().is_infinite());
        let cp = SubordinatorSpec::CompoundPoisson { rate: 2.0, jump: Law::thinned(Law::exp1(), 0.25) };
        assert_eq!(cp.total_mass().unwrap(), ExtendedReal::Finite(0.5));
        let st = SubordinatorSpec::Straddle { v: Law::Point(0.5) };
        assert!((st.total_mass().unwrap().finite().unwrap() - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn default_derivative_is_centered_difference() {
        let f = FnExponent(|w: f64| Ok(w * w));
        assert!((f.psi_deriv(3.0).unwrap() - 6.0).abs() < 1e-6);
    }
}
