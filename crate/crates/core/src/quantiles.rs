//! Standard quantile families used as clock kernels, and the special random
//! variables built from stable ratios.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Geometric};

use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::numeric::{self, integrate, integrate_origin_power, sinc, QuadTol};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A quantile function `Q : [0, 1] -> [0, inf]`, nondecreasing.
#[derive(Clone)]
pub enum QuantileFamily {
    Constant(f64),
    /// `u^(1/delta)`, the quantile of a beta(delta, 1) variable.
    Power { delta: f64 },
    /// `sin^2(pi u / 2)`.
    Arcsine,
    /// `sin^(2/b)(pi u / 2)`.
    ArcsinePower { b: f64 },
    /// `[1 - (1 - u)^(1/alpha)]^(1/b)`.
    Kumaraswamy { alpha: f64, b: f64 },
    /// `[sin(pi alpha u) / sin(pi alpha (1 - u))]^(1/alpha)`. Infinite mean.
    StableRatio { alpha: f64 },
    /// `Q_X / (1 + Q_X)` for the stable ratio above.
    Occupation { alpha: f64 },
    /// `u p + 1 - p`.
    AffineUniform { p: f64 },
    /// Quantile of `exp(-gamma(shape))`.
    ExpNegGamma { shape: f64 },
    /// Numerical inverse of a distribution function on `[0, inf)`.
    FromCdf { name: String, cdf: ScalarFn },
    Shifted { base: Box<QuantileFamily>, shift: f64 },
    Scaled { base: Box<QuantileFamily>, factor: f64 },
    /// `Q(u)^exponent`, `exponent > 0`.
    PowerOf { base: Box<QuantileFamily>, exponent: f64 },
    Custom { name: String, f: ScalarFn },
}

impl fmt::Debug for QuantileFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// `[sin(pi a u) / sin(pi a (1 - u))]`, continuous as `a -> 0`.
fn sine_ratio(a: f64, u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return f64::INFINITY;
    }
    (u / (1.0 - u)) * sinc(PI * a * u) / sinc(PI * a * (1.0 - u))
}

fn stable_ratio_quantile(alpha: f64, u: f64) -> f64 {
    sine_ratio(alpha, u).powf(1.0 / alpha)
}

fn occupation_quantile(alpha: f64, u: f64) -> f64 {
    let x = stable_ratio_quantile(alpha, u);
    if x.is_infinite() {
        1.0
    } else {
        x / (1.0 + x)
    }
}

impl QuantileFamily {
    pub fn name(&self) -> String {
        match self {
            QuantileFamily::Constant(c) => format!("constant({c})"),
            QuantileFamily::Power { delta } => format!("power({delta})"),
            QuantileFamily::Arcsine => "arcsine".into(),
            QuantileFamily::ArcsinePower { b } => format!("arcsine_power({b})"),
            QuantileFamily::Kumaraswamy { alpha, b } => format!("kumaraswamy({alpha},{b})"),
            QuantileFamily::StableRatio { alpha } => format!("stable_ratio({alpha})"),
            QuantileFamily::Occupation { alpha } => format!("occupation({alpha})"),
            QuantileFamily::AffineUniform { p } => format!("affine_uniform({p})"),
            QuantileFamily::ExpNegGamma { shape } => format!("exp_neg_gamma({shape})"),
            QuantileFamily::FromCdf { name, .. } => format!("inverse_cdf({name})"),
            QuantileFamily::Shifted { base, shift } => format!("{}+{shift}", base.name()),
            QuantileFamily::Scaled { base, factor } => format!("{factor}*{}", base.name()),
            QuantileFamily::PowerOf { base, exponent } => format!("{}^{exponent}", base.name()),
            QuantileFamily::Custom { name, .. } => name.clone(),
        }
    }

    fn check_params(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::invalid("std_quantile", msg));
        match self {
            QuantileFamily::Constant(c) if !(c.is_finite() && *c >= 0.0) => bad(format!("constant {c} must be finite and >= 0")),
            QuantileFamily::Power { delta } if !(*delta > 0.0 && delta.is_finite()) => bad(format!("delta = {delta} must be > 0")),
            QuantileFamily::ArcsinePower { b } if !(*b > 0.0 && b.is_finite()) => bad(format!("b = {b} must be > 0")),
            QuantileFamily::Kumaraswamy { alpha, b } if !(*alpha > 0.0 && *b > 0.0) => {
                bad(format!("kumaraswamy parameters ({alpha}, {b}) must be > 0"))
            }
            QuantileFamily::StableRatio { alpha } | QuantileFamily::Occupation { alpha } if !(*alpha > 0.0 && *alpha < 1.0) => {
                bad(format!("alpha = {alpha} must lie in (0, 1)"))
            }
            QuantileFamily::AffineUniform { p } if !(*p > 0.0 && *p <= 1.0) => bad(format!("p = {p} must lie in (0, 1]")),
            QuantileFamily::ExpNegGamma { shape } if !(*shape > 0.0 && shape.is_finite()) => bad(format!("shape = {shape} must be > 0")),
            QuantileFamily::Shifted { base, shift } => {
                if !shift.is_finite() {
                    return bad(format!("shift {shift} must be finite"));
                }
                base.check_params()
            }
            QuantileFamily::Scaled { base, factor } => {
                if !(*factor > 0.0 && factor.is_finite()) {
                    return bad(format!("scale factor {factor} must be > 0"));
                }
                base.check_params()
            }
            QuantileFamily::PowerOf { base, exponent } => {
                if !(*exponent > 0.0 && exponent.is_finite()) {
                    return bad(format!("exponent {exponent} must be > 0"));
                }
                base.check_params()
            }
            _ => Ok(()),
        }
    }

    /// Raw evaluation for `u` in `[0, 1]`; may return `+inf` at `u = 1`.
    pub(crate) fn raw(&self, u: f64) -> f64 {
        match self {
            QuantileFamily::Constant(c) => *c,
            QuantileFamily::Power { delta } => u.powf(1.0 / delta),
            QuantileFamily::Arcsine => {
                let s = (0.5 * PI * u).sin();
                s * s
            }
            QuantileFamily::ArcsinePower { b } => (0.5 * PI * u).sin().powf(2.0 / b),
            QuantileFamily::Kumaraswamy { alpha, b } => {
                // 1 - (1-u)^(1/alpha) computed without cancellation
                let inner = -((1.0 / alpha) * (-u).ln_1p()).exp_m1();
                inner.max(0.0).powf(1.0 / b)
            }
            QuantileFamily::StableRatio { alpha } => stable_ratio_quantile(*alpha, u),
            QuantileFamily::Occupation { alpha } => occupation_quantile(*alpha, u),
            QuantileFamily::AffineUniform { p } => u * p + 1.0 - p,
            QuantileFamily::ExpNegGamma { shape } => {
                if u <= 0.0 {
                    return 0.0;
                }
                if u >= 1.0 {
                    return 1.0;
                }
                // P(exp(-G) <= x) = 1 - F_G(-ln x), so Q(u) = exp(-F_G^{-1}(1 - u)).
                let k = *shape;
                let g = invert_cdf(&|x: f64| numeric::gamma_lr(k, x), 1.0 - u, 1e-13).unwrap_or(f64::NAN);
                (-g).exp()
            }
            QuantileFamily::FromCdf { cdf, .. } => {
                if u >= 1.0 {
                    return match invert_cdf(cdf.as_ref(), 1.0, 1e-12) {
                        Ok(x) => x,
                        Err(_) => f64::INFINITY,
                    };
                }
                invert_cdf(cdf.as_ref(), u, 1e-12).unwrap_or(f64::NAN)
            }
            QuantileFamily::Shifted { base, shift } => base.raw(u) + shift,
            QuantileFamily::Scaled { base, factor } => base.raw(u) * factor,
            QuantileFamily::PowerOf { base, exponent } => base.raw(u).powf(*exponent),
            QuantileFamily::Custom { f, .. } => f(u),
        }
    }

    fn closed_mean(&self) -> Option<f64> {
        match self {
            QuantileFamily::Constant(c) => Some(*c),
            QuantileFamily::Power { delta } => Some(delta / (delta + 1.0)),
            QuantileFamily::Arcsine => Some(0.5),
            QuantileFamily::Occupation { .. } => Some(0.5),
            QuantileFamily::AffineUniform { p } => Some(1.0 - 0.5 * p),
            QuantileFamily::ExpNegGamma { shape } => Some(2f64.powf(-shape)),
            QuantileFamily::StableRatio { .. } => Some(f64::INFINITY),
            QuantileFamily::Shifted { base, shift } => base.closed_mean().map(|m| m + shift),
            QuantileFamily::Scaled { base, factor } => base.closed_mean().map(|m| m * factor),
            _ => None,
        }
    }
}

/// Evaluate `Q(u)` for a family; `+inf` is returned tagged, never as a number.
pub fn std_quantile(family: &QuantileFamily, u: f64) -> Result<ExtendedReal> {
    if !(0.0..=1.0).contains(&u) || u.is_nan() {
        return Err(Error::domain("std_quantile", format!("u = {u} is outside [0, 1]")));
    }
    family.check_params()?;
    let v = family.raw(u);
    if v.is_nan() {
        return Err(Error::Divergence { op: "std_quantile", msg: format!("{} produced NaN at u = {u}", family.name()) });
    }
    Ok(ExtendedReal::from_f64(v))
}

/// Smallest `x >= 0` with `cdf(x) >= u`, by bisection on a geometrically grown bracket.
pub fn invert_cdf(cdf: &(dyn Fn(f64) -> f64 + Send + Sync), u: f64, tol: f64) -> Result<f64> {
    const OP: &str = "invert_cdf";
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::domain(OP, format!("u = {u} is outside [0, 1]")));
    }
    let f0 = cdf(0.0);
    if f0 >= u {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut f_hi = cdf(hi);
    while f_hi < u {
        if f_hi < f0 {
            return Err(Error::invalid(OP, "cdf is not monotone"));
        }
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Divergence { op: OP, msg: format!("bracket for u = {u} exceeded 1e12") });
        }
        f_hi = cdf(hi);
    }
    let (mut f_lo, mut f_up) = (cdf(lo), f_hi);
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = cdf(mid);
        if !(f_lo <= fm && fm <= f_up) || fm.is_nan() {
            return Err(Error::invalid(OP, format!("cdf is not monotone near x = {mid}")));
        }
        if fm < u {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
            f_up = fm;
        }
        if f_up - f_lo <= tol && hi - lo <= 1e-15 * hi.max(1.0) {
            break;
        }
        if hi - lo <= tol * hi.max(1e-300) && (f_up - u).abs() <= tol {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// A validated quantile function with finite mean, usable as a clock kernel.
#[derive(Clone, Debug)]
pub struct QuantileFunction {
    family: QuantileFamily,
    mean: f64,
    lower: f64,
    upper: ExtendedReal,
}

const GRID: usize = 1024;

impl QuantileFunction {
    pub fn new(family: QuantileFamily) -> Result<Self> {
        const OP: &str = "QuantileFunction::new";
        family.check_params()?;
        let mut prev = family.raw(0.0);
        if !(prev.is_finite() && prev >= 0.0) {
            return Err(Error::invalid(OP, format!("{}: Q(0) = {prev} must be finite and >= 0", family.name())));
        }
        let lower = prev;
        for i in 1..GRID {
            let u = i as f64 / GRID as f64;
            let v = family.raw(u);
            if !v.is_finite() {
                return Err(Error::invalid(OP, format!("{}: Q({u}) = {v} is not finite", family.name())));
            }
            if v < prev - 1e-12 * prev.abs().max(1.0) {
                return Err(Error::invalid(OP, format!("{}: not monotone at u = {u}", family.name())));
            }
            prev = v;
        }
        let top = family.raw(1.0);
        if top < prev - 1e-12 {
            return Err(Error::invalid(OP, format!("{}: not monotone at u = 1", family.name())));
        }
        let mean = match family.closed_mean() {
            Some(m) => m,
            None => integrate(OP, &|u: f64| family.raw(u), 0.0, 1.0, QuadTol::INNER)
                .map_err(|_| Error::Divergence { op: OP, msg: format!("{}: mean integral does not converge", family.name()) })?,
        };
        if !mean.is_finite() {
            return Err(Error::invalid(OP, format!("{}: infinite mean, cannot serve as a clock kernel", family.name())));
        }
        Ok(QuantileFunction { family, mean, lower, upper: ExtendedReal::from_f64(top) })
    }

    pub fn family(&self) -> &QuantileFamily {
        &self.family
    }

    /// `Q(u)` for `u` in `[0, 1]`. Out-of-range arguments are clamped.
    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        self.family.raw(u.clamp(0.0, 1.0))
    }

    /// `E[Q(U)]`.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// `Q(0)`.
    pub fn lower(&self) -> f64 {
        self.lower
    }

    /// `Q(1)`, possibly infinite.
    pub fn upper(&self) -> ExtendedReal {
        self.upper
    }

    /// Smallest `u` with `Q(u) >= x`, the distribution function of `Q(U)`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x < self.lower {
            return 0.0;
        }
        if let ExtendedReal::Finite(top) = self.upper {
            if x >= top {
                return 1.0;
            }
        }
        // Q(u) <= x  iff  u <= F(x)
        let mut lo = 0.0;
        let mut hi = 1.0;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.eval(mid) <= x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn power(delta: f64) -> Result<Self> {
        Self::new(QuantileFamily::Power { delta })
    }
    pub fn uniform() -> Self {
        Self::new(QuantileFamily::Power { delta: 1.0 }).expect("identity quantile")
    }
    pub fn arcsine() -> Self {
        Self::new(QuantileFamily::Arcsine).expect("arcsine quantile")
    }
    pub fn constant(c: f64) -> Result<Self> {
        Self::new(QuantileFamily::Constant(c))
    }
}

/// Split `Q = Q~ + a` with `a = Q(0)` so that `Q~(0) = 0`.
pub fn shift_decompose(q: &QuantileFunction) -> Result<(QuantileFunction, f64)> {
    let a = q.lower();
    if a == 0.0 {
        return Ok((q.clone(), 0.0));
    }
    let fam = match q.family() {
        QuantileFamily::AffineUniform { p } => QuantileFamily::Scaled { base: Box::new(QuantileFamily::Power { delta: 1.0 }), factor: *p },
        QuantileFamily::Shifted { base, shift } if base.raw(0.0) == 0.0 && *shift == a => (**base).clone(),
        QuantileFamily::Constant(_) => QuantileFamily::Constant(0.0),
        other => QuantileFamily::Shifted { base: Box::new(other.clone()), shift: -a },
    };
    Ok((QuantileFunction::new(fam)?, a))
}

/// Positive stable variable with `E exp(-w S) = exp(-w^alpha)`, by Kanter's representation.
pub fn sample_positive_stable<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    log_positive_stable(alpha, rng).exp()
}

fn log_positive_stable<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    let u = PI * rng.random::<f64>();
    let e: f64 = Exp1.sample(rng);
    let u = if u <= 0.0 { f64::MIN_POSITIVE } else { u };
    (alpha * u).sin().ln() - u.sin().ln() / alpha + ((1.0 - alpha) / alpha) * (((1.0 - alpha) * u).sin().ln() - e.ln())
}

/// Random variables built from ratios of stable laws, plus a few discrete or
/// rejection-sampled helpers.
#[derive(Clone, Debug, PartialEq)]
pub enum SpecialVariable {
    /// `S_alpha`, positive stable with Laplace exponent `w^alpha`.
    PositiveStable { alpha: f64 },
    /// `X_alpha = S_alpha / S'_alpha`.
    StableRatio { alpha: f64 },
    /// `O_alpha = X_alpha / (1 + X_alpha)`.
    Occupation { alpha: f64 },
    /// `G_alpha = W / (1 + W)` with `W = X_{1-alpha}^((1-alpha)/alpha)`; `G_1` is uniform
    /// and `G_0 = 1 / (1 + exp(pi eta))` with `eta` standard Cauchy.
    G { alpha: f64 },
    /// `D_alpha = 1 / (1 + G_alpha)`.
    D { alpha: f64 },
    /// Density proportional to `x^(-alpha-1) e^-x (1 - e^-x)` on `(0, inf)`.
    Straddle { alpha: f64 },
    Kumaraswamy { alpha: f64, b: f64 },
    /// `U p + 1 - p`.
    AffineUniform { p: f64 },
    /// `exp(-lambda X)`, `X` geometric on `{0, 1, ...}` with success probability `p`.
    GeometricExp { p: f64, lambda: f64 },
}

impl SpecialVariable {
    pub(crate) fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::invalid("SpecialVariable", m));
        match *self {
            SpecialVariable::PositiveStable { alpha } | SpecialVariable::StableRatio { alpha } | SpecialVariable::Occupation { alpha }
                if !(alpha > 0.0 && alpha < 1.0) =>
            {
                bad(format!("alpha = {alpha} must lie in (0, 1)"))
            }
            SpecialVariable::G { alpha } | SpecialVariable::D { alpha } if !(0.0..=1.0).contains(&alpha) => {
                bad(format!("alpha = {alpha} must lie in [0, 1]"))
            }
            SpecialVariable::Straddle { alpha } if !(0.0..1.0).contains(&alpha) => bad(format!("alpha = {alpha} must lie in [0, 1)")),
            SpecialVariable::Kumaraswamy { alpha, b } if !(alpha > 0.0 && b > 0.0) => bad(format!("({alpha}, {b}) must be > 0")),
            SpecialVariable::AffineUniform { p } if !(p > 0.0 && p <= 1.0) => bad(format!("p = {p} must lie in (0, 1]")),
            SpecialVariable::GeometricExp { p, lambda } if !(p > 0.0 && p <= 1.0 && lambda > 0.0) => {
                bad(format!("need p in (0, 1] and lambda > 0, got ({p}, {lambda})"))
            }
            _ => Ok(()),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        Ok(match *self {
            SpecialVariable::PositiveStable { alpha } => sample_positive_stable(alpha, rng),
            SpecialVariable::StableRatio { alpha } => (log_positive_stable(alpha, rng) - log_positive_stable(alpha, rng)).exp(),
            SpecialVariable::Occupation { alpha } => {
                let lx = log_positive_stable(alpha, rng) - log_positive_stable(alpha, rng);
                logistic(lx)
            }
            SpecialVariable::G { alpha } => sample_g(alpha, rng),
            SpecialVariable::D { alpha } => 1.0 / (1.0 + sample_g(alpha, rng)),
            SpecialVariable::Straddle { alpha } => sample_straddle(alpha, rng)?,
            SpecialVariable::Kumaraswamy { alpha, b } => QuantileFamily::Kumaraswamy { alpha, b }.raw(rng.random()),
            SpecialVariable::AffineUniform { p } => rng.random::<f64>() * p + 1.0 - p,
            SpecialVariable::GeometricExp { p, lambda } => {
                if p >= 1.0 {
                    1.0
                } else {
                    let k = Geometric::new(p).expect("validated p").sample(rng);
                    (-lambda * k as f64).exp()
                }
            }
        })
    }

    /// Closed-form quantile where one exists.
    pub fn quantile(&self, u: f64) -> Option<f64> {
        let u = u.clamp(0.0, 1.0);
        match *self {
            SpecialVariable::PositiveStable { .. } | SpecialVariable::Straddle { .. } => None,
            SpecialVariable::StableRatio { alpha } => Some(stable_ratio_quantile(alpha, u)),
            SpecialVariable::Occupation { alpha } => Some(occupation_quantile(alpha, u)),
            SpecialVariable::G { alpha } => Some(g_quantile(alpha, u)),
            SpecialVariable::D { alpha } => Some(1.0 / (1.0 + g_quantile(alpha, 1.0 - u))),
            SpecialVariable::Kumaraswamy { alpha, b } => Some(QuantileFamily::Kumaraswamy { alpha, b }.raw(u)),
            SpecialVariable::AffineUniform { p } => Some(u * p + 1.0 - p),
            SpecialVariable::GeometricExp { p, lambda } => {
                if p >= 1.0 {
                    return Some(1.0);
                }
                // Q_Y(u) = exp(-lambda Q_X(1 - u)) with Q_X(v) = ceil(ln(1-v)/ln(1-p) - 1)
                let v = 1.0 - u;
                if v <= 0.0 {
                    return Some(1.0);
                }
                if v >= 1.0 {
                    return Some(0.0);
                }
                let k = ((-v).ln_1p() / (-p).ln_1p() - 1.0 - 1e-12).ceil().max(0.0);
                Some((-lambda * k).exp())
            }
        }
    }

    pub fn cdf(&self, x: f64) -> Option<f64> {
        match *self {
            SpecialVariable::PositiveStable { .. } => None,
            SpecialVariable::Straddle { alpha } => Some(straddle_cdf(alpha, x)),
            SpecialVariable::GeometricExp { p, lambda } => {
                if x >= 1.0 {
                    return Some(1.0);
                }
                if x <= 0.0 {
                    return Some(0.0);
                }
                if p >= 1.0 {
                    return Some(0.0);
                }
                // P(X >= k) with k = ceil(-ln x / lambda)
                let k = (-x.ln() / lambda - 1e-12).ceil().max(0.0);
                Some((1.0 - p).powf(k))
            }
            _ => {
                let q = |u: f64| self.quantile(u).unwrap();
                if x < q(0.0) {
                    return Some(0.0);
                }
                if x >= q(1.0) {
                    return Some(1.0);
                }
                let (mut lo, mut hi) = (0.0, 1.0);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if q(mid) <= x {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                Some(0.5 * (lo + hi))
            }
        }
    }

    pub fn pdf(&self, x: f64) -> Option<f64> {
        match *self {
            SpecialVariable::Straddle { alpha } => Some(if x <= 0.0 { 0.0 } else { straddle_norm(alpha) * straddle_kernel(alpha, x) }),
            _ => None,
        }
    }

    pub fn lower_bound(&self) -> f64 {
        match *self {
            SpecialVariable::D { .. } => 0.5,
            SpecialVariable::AffineUniform { p } => 1.0 - p,
            SpecialVariable::GeometricExp { p, .. } if p >= 1.0 => 1.0,
            _ => 0.0,
        }
    }

    pub fn upper_bound(&self) -> Option<f64> {
        match *self {
            SpecialVariable::PositiveStable { .. } | SpecialVariable::StableRatio { .. } | SpecialVariable::Straddle { .. } => None,
            _ => Some(1.0),
        }
    }

    /// Probability of the atom at `x`.
    pub fn atom(&self, x: f64) -> f64 {
        match *self {
            SpecialVariable::GeometricExp { p, lambda } => {
                if x <= 0.0 || x > 1.0 {
                    return 0.0;
                }
                let k = -x.ln() / lambda;
                let kr = k.round();
                if (k - kr).abs() < 1e-9 {
                    p * (1.0 - p).powf(kr)
                } else {
                    0.0
                }
            }
            _ => 0.0,
        }
    }

    /// `E g(X)` for the variants with a closed quantile or density.
    pub(crate) fn expect(&self, g: &dyn Fn(f64) -> f64, tol: QuadTol) -> Result<f64> {
        const OP: &str = "expect";
        match *self {
            SpecialVariable::PositiveStable { .. } => Err(Error::unsupported(OP, "positive stable law has no quadrature rule")),
            SpecialVariable::Straddle { alpha } => {
                let c = straddle_norm(alpha);
                // x^(-alpha) singularity at zero handled by substitution.
                let head = integrate_origin_power(
                    OP,
                    &|x: f64| {
                        let r = if x < 1e-300 { 1.0 } else { -(-x).exp_m1() / x };
                        g(x) * (-x).exp() * r
                    },
                    1.0,
                    1.0 - alpha,
                    tol,
                )?;
                let tail = numeric::integrate_to_inf(OP, &|x: f64| g(x) * straddle_kernel(alpha, x), 1.0, tol)?;
                Ok(c * (head + tail))
            }
            SpecialVariable::GeometricExp { p, lambda } => {
                if p >= 1.0 {
                    return Ok(g(1.0));
                }
                let mut sum = 0.0;
                let mut w = p;
                let mut k = 0.0;
                while w > 1e-18 {
                    sum += w * g((-lambda * k).exp());
                    w *= 1.0 - p;
                    k += 1.0;
                    if k > 1e7 {
                        break;
                    }
                }
                Ok(sum)
            }
            _ => {
                let q = |u: f64| g(self.quantile(u).unwrap());
                integrate(OP, &q, 0.0, 1.0, tol)
            }
        }
    }
}

#[inline]
fn logistic(lx: f64) -> f64 {
    if lx >= 0.0 {
        1.0 / (1.0 + (-lx).exp())
    } else {
        let e = lx.exp();
        e / (1.0 + e)
    }
}

fn g_quantile(alpha: f64, u: f64) -> f64 {
    if alpha >= 1.0 {
        return u;
    }
    if alpha <= 0.0 {
        if u <= 0.0 {
            return 0.0;
        }
        if u >= 1.0 {
            return 1.0;
        }
        let eta = (PI * (0.5 - u)).tan();
        return logistic(-PI * eta);
    }
    let r = sine_ratio(1.0 - alpha, u);
    if r.is_infinite() {
        return 1.0;
    }
    if r == 0.0 {
        return 0.0;
    }
    logistic(r.ln() / alpha)
}

fn sample_g<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    if alpha >= 1.0 {
        return rng.random();
    }
    if alpha <= 0.0 {
        let eta = (PI * (rng.random::<f64>() - 0.5)).tan();
        return logistic(-PI * eta);
    }
    let a = 1.0 - alpha;
    let lx = log_positive_stable(a, rng) - log_positive_stable(a, rng);
    logistic(lx * a / alpha)
}

fn straddle_norm(alpha: f64) -> f64 {
    if alpha == 0.0 {
        1.0 / std::f64::consts::LN_2
    } else {
        alpha / ((2f64.powf(alpha) - 1.0) * numeric::gamma(1.0 - alpha))
    }
}

fn straddle_kernel(alpha: f64, x: f64) -> f64 {
    x.powf(-alpha - 1.0) * (-x).exp() * (-(-x).exp_m1())
}

fn straddle_cdf(alpha: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let c = straddle_norm(alpha);
    let h = |t: f64| {
        let r = if t < 1e-300 { 1.0 } else { -(-t).exp_m1() / t };
        (-t).exp() * r
    };
    let head = integrate_origin_power("cdf", &h, x.min(1.0), 1.0 - alpha, QuadTol::INNER).unwrap_or(f64::NAN);
    let tail = if x > 1.0 {
        integrate("cdf", &|t: f64| straddle_kernel(alpha, t), 1.0, x, QuadTol::INNER).unwrap_or(f64::NAN)
    } else {
        0.0
    };
    (c * (head + tail)).min(1.0)
}

const STRADDLE_MAX_PROPOSALS: u64 = 10_000_000;

fn sample_straddle<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> Result<f64> {
    // Envelope x^-alpha on [0, 1] and e^-x on (1, inf).
    let m_head = 1.0 / (1.0 - alpha);
    let m_tail = (-1.0f64).exp();
    let p_head = m_head / (m_head + m_tail);
    for _ in 0..STRADDLE_MAX_PROPOSALS {
        if rng.random::<f64>() < p_head {
            let x = rng.random::<f64>().powf(1.0 / (1.0 - alpha));
            if x <= 0.0 {
                continue;
            }
            let ratio = (-x).exp() * (-(-x).exp_m1()) / x;
            if rng.random::<f64>() < ratio {
                return Ok(x);
            }
        } else {
            let e: f64 = Exp1.sample(rng);
            let x = 1.0 + e;
            let ratio = x.powf(-alpha - 1.0) * (-(-x).exp_m1());
            if rng.random::<f64>() < ratio {
                return Ok(x);
            }
        }
    }
    Err(Error::SamplerStuck { op: "sample", proposals: STRADDLE_MAX_PROPOSALS, acceptance: 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fin(v: ExtendedReal) -> f64 {
        v.finite().expect("finite")
    }

    #[test]
    fn documented_values() {
        assert!((fin(std_quantile(&QuantileFamily::Arcsine, 0.5).unwrap()) - 0.5).abs() < 1e-15);
        assert!((fin(std_quantile(&QuantileFamily::Power { delta: 2.0 }, 0.25).unwrap()) - 0.5).abs() < 1e-15);
        assert!((fin(std_quantile(&QuantileFamily::StableRatio { alpha: 0.5 }, 0.5).unwrap()) - 1.0).abs() < 1e-14);
        assert_eq!(std_quantile(&QuantileFamily::StableRatio { alpha: 0.5 }, 1.0).unwrap(), ExtendedReal::PosInfinity);
        let occ = fin(std_quantile(&QuantileFamily::Occupation { alpha: 0.5 }, 0.5).unwrap());
        assert!((occ - 0.5).abs() < 1e-14);
    }

    #[test]
    fn out_of_range_u_is_domain_error() {
        assert!(matches!(std_quantile(&QuantileFamily::Arcsine, 1.5), Err(Error::Domain { .. })));
        assert!(matches!(std_quantile(&QuantileFamily::Arcsine, -0.1), Err(Error::Domain { .. })));
    }

    #[test]
    fn invert_exponential_cdf() {
        let x = invert_cdf(&|x: f64| 1.0 - (-x).exp(), 0.5, 1e-10).unwrap();
        assert!((x - std::f64::consts::LN_2).abs() < 1e-9);
    }

    #[test]
    fn invert_rejects_non_monotone() {
        let bad = |x: f64| if x <= 0.0 { 0.0 } else if x < 0.5 { 0.9 } else if x < 1.0 { 0.7 } else { 1.0 };
        assert!(matches!(invert_cdf(&bad, 0.5, 1e-10), Err(Error::InvalidInput { .. })));
    }

    #[test]
    fn invert_diverges_for_defective_cdf() {
        let r = invert_cdf(&|x: f64| 0.5 * (1.0 - (-x).exp()), 0.9, 1e-10);
        assert!(matches!(r, Err(Error::Divergence { .. })));
    }

    #[test]
    fn stable_ratio_is_not_a_clock_kernel() {
        assert!(QuantileFunction::new(QuantileFamily::StableRatio { alpha: 0.5 }).is_err());
    }

    #[test]
    fn non_monotone_custom_rejected() {
        let f: ScalarFn = Arc::new(|u: f64| (6.0 * u).sin().abs());
        assert!(QuantileFunction::new(QuantileFamily::Custom { name: "wiggle".into(), f }).is_err());
    }

    #[test]
    fn g_half_is_arcsine() {
        for i in 0..=20 {
            let u = i as f64 / 20.0;
            let g = SpecialVariable::G { alpha: 0.5 }.quantile(u).unwrap();
            assert!((g - QuantileFamily::Arcsine.raw(u)).abs() < 1e-12, "u={u}");
        }
    }

    #[test]
    fn g_one_is_uniform_and_continuous_in_alpha() {
        for i in 1..20 {
            let u = i as f64 / 20.0;
            let g1 = SpecialVariable::G { alpha: 1.0 }.quantile(u).unwrap();
            let gnear = SpecialVariable::G { alpha: 1.0 - 1e-7 }.quantile(u).unwrap();
            assert_eq!(g1, u);
            assert!((gnear - u).abs() < 1e-5);
        }
    }

    #[test]
    fn shift_decompose_affine_uniform() {
        let q = QuantileFunction::new(QuantileFamily::AffineUniform { p: 0.3 }).unwrap();
        let (qt, a) = shift_decompose(&q).unwrap();
        assert!((a - 0.7).abs() < 1e-15);
        assert_eq!(qt.eval(0.0), 0.0);
        for i in 0..=10 {
            let u = i as f64 / 10.0;
            assert!((qt.eval(u) + a - q.eval(u)).abs() < 1e-14);
        }
    }

    #[test]
    fn quantile_means() {
        let k = QuantileFunction::new(QuantileFamily::Kumaraswamy { alpha: 0.5, b: 2.0 }).unwrap();
        // E[(1-(1-U)^2)^(1/2)] = E[sqrt(V(2-V))] for V uniform = pi/4
        assert!((k.mean() - std::f64::consts::FRAC_PI_4).abs() < 1e-8, "{}", k.mean());
        let e = QuantileFunction::new(QuantileFamily::ExpNegGamma { shape: 2.0 }).unwrap();
        assert!((e.mean() - 0.25).abs() < 1e-15);
        let q = QuantileFunction::new(QuantileFamily::ExpNegGamma { shape: 2.0 }).unwrap();
        // the numeric quantile must integrate to the closed-form mean
        let m = integrate("t", &|u: f64| q.eval(u), 0.0, 1.0, QuadTol::new(1e-10, 1e-7)).unwrap();
        assert!((m - 0.25).abs() < 1e-7, "{m}");
    }

    #[test]
    fn straddle_density_normalised() {
        for &a in &[0.0, 0.3, 0.5, 0.9] {
            let v = SpecialVariable::Straddle { alpha: a }.expect(&|_| 1.0, QuadTol::INNER).unwrap();
            assert!((v - 1.0).abs() < 1e-8, "alpha={a}: {v}");
        }
    }

    #[test]
    fn positive_stable_laplace() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 200_000;
        let m: f64 = (0..n).map(|_| (-sample_positive_stable(0.5, &mut rng)).exp()).sum::<f64>() / n as f64;
        assert!((m - (-1.0f64).exp()).abs() < 4e-3, "{m}");
    }

    #[test]
    fn geometric_exp_quantile_and_cdf_agree() {
        let v = SpecialVariable::GeometricExp { p: 0.4, lambda: 0.7 };
        for i in 1..50 {
            let u = i as f64 / 50.0;
            let x = v.quantile(u).unwrap();
            assert!(v.cdf(x).unwrap() >= u - 1e-12);
            assert!(v.cdf(x * (1.0 - 1e-9)).unwrap() < u + 1e-12);
        }
    }

    fn families() -> Vec<QuantileFamily> {
        vec![
            QuantileFamily::Power { delta: 0.3 },
            QuantileFamily::Power { delta: 4.0 },
            QuantileFamily::Arcsine,
            QuantileFamily::ArcsinePower { b: 2.0 },
            QuantileFamily::ArcsinePower { b: 0.5 },
            QuantileFamily::Kumaraswamy { alpha: 0.5, b: 2.0 },
            QuantileFamily::StableRatio { alpha: 0.3 },
            QuantileFamily::StableRatio { alpha: 0.8 },
            QuantileFamily::Occupation { alpha: 0.5 },
            QuantileFamily::AffineUniform { p: 0.3 },
            QuantileFamily::Constant(2.0),
        ]
    }

    proptest! {
        #[test]
        fn families_are_monotone(a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            for fam in families() {
                let ql = std_quantile(&fam, lo).unwrap();
                let qh = std_quantile(&fam, hi).unwrap();
                prop_assert!(ql <= qh, "{} at {lo} / {hi}", fam.name());
            }
        }

        #[test]
        fn special_quantiles_monotone(a in 0.0f64..1.0, b in 0.0f64..1.0, alpha in 0.0f64..=1.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            for v in [SpecialVariable::G { alpha }, SpecialVariable::D { alpha }] {
                prop_assert!(v.quantile(lo).unwrap() <= v.quantile(hi).unwrap() + 1e-15);
            }
        }

        #[test]
        fn cdf_inverts_quantile(u in 0.01f64..0.99) {
            let q = QuantileFunction::new(QuantileFamily::Kumaraswamy { alpha: 0.5, b: 2.0 }).unwrap();
            prop_assert!((q.cdf(q.eval(u)) - u).abs() < 1e-9);
        }
    }
}
